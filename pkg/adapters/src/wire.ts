// Wire formats shared with the scoring engine: synthesis manifests in,
// hypothesis and language-label JSONL out.

import * as fs from 'node:fs';
import * as path from 'node:path';

export interface ManifestEntry {
  prompt_id: string;
  file_path: string;
  sha256: string;
  duration_s: number | null;
  status: string;
}

export interface SynthesisManifest {
  schema_version: number;
  system_id: string;
  voice_id: string;
  provider_version: string;
  run_date: string;
  source_set: string;
  entries: ManifestEntry[];
}

const MANIFEST_KEYS = [
  'system_id',
  'voice_id',
  'provider_version',
  'run_date',
  'source_set',
  'entries',
] as const;

/**
 * Read and structurally check a synthesis manifest.
 */
export function readManifest(manifestPath: string): SynthesisManifest {
  const raw = JSON.parse(fs.readFileSync(manifestPath, 'utf-8'));
  if (raw.schema_version !== 1) {
    throw new Error(`${manifestPath}: unsupported manifest schema_version ${raw.schema_version}`);
  }
  for (const key of MANIFEST_KEYS) {
    if (!(key in raw)) {
      throw new Error(`${manifestPath}: manifest missing key "${key}"`);
    }
  }
  if (!Array.isArray(raw.entries)) {
    throw new Error(`${manifestPath}: manifest entries must be a list`);
  }
  return raw as SynthesisManifest;
}

export interface HypothesisRecord {
  prompt_id: string;
  system_id: string;
  source_set: string;
  backend_id: string;
  text: string;
  status: string;
}

export interface LidRecord {
  prompt_id: string;
  system_id: string;
  source_set: string;
  model_id: string;
  predicted_label: string;
  confidence?: number;
}

/**
 * Write a JSONL file with a meta header line, atomically.
 *
 * The file lands under its final name only once fully written: content goes
 * to a sibling temp file first and is renamed into place. Key order is fixed
 * by the record objects, so identical inputs produce identical bytes.
 */
export function writeJsonl(
  outPath: string,
  meta: Record<string, string>,
  records: Array<Record<string, unknown>>
): void {
  const lines = [JSON.stringify({ meta })];
  for (const record of records) {
    lines.push(JSON.stringify(record));
  }
  const body = lines.join('\n') + '\n';

  fs.mkdirSync(path.dirname(path.resolve(outPath)), { recursive: true });
  const tmpPath = `${outPath}.tmp-${process.pid}`;
  fs.writeFileSync(tmpPath, body, 'utf-8');
  fs.renameSync(tmpPath, outPath);
}

/**
 * Resolve a manifest entry's audio path against the audio root.
 */
export function resolveAudioPath(audioRoot: string, entry: ManifestEntry): string {
  return path.resolve(audioRoot, entry.file_path);
}
