// Disposable workspaces for adapter tests: real WAV files, sidecar model
// outputs, and a synthesis manifest shaped like the scoring engine expects.

import * as crypto from 'node:crypto';
import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';

import { ManifestEntry, SynthesisManifest } from '../src/wire.js';

export function makeTempDir(tag: string): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), `adapters-${tag}-`));
}

/**
 * Write a mono 16 kHz PCM16 WAV of a quiet sine tone.
 */
export function writeWav(filePath: string, seconds = 0.3, rate = 16000, amplitude = 800): void {
  const n = Math.round(seconds * rate);
  const data = Buffer.alloc(n * 2);
  for (let i = 0; i < n; i++) {
    const sample = Math.round(amplitude * Math.sin((2 * Math.PI * 220 * i) / rate));
    data.writeInt16LE(sample, i * 2);
  }
  const header = Buffer.alloc(44);
  header.write('RIFF', 0, 'ascii');
  header.writeUInt32LE(36 + data.length, 4);
  header.write('WAVE', 8, 'ascii');
  header.write('fmt ', 12, 'ascii');
  header.writeUInt32LE(16, 16);
  header.writeUInt16LE(1, 20); // PCM
  header.writeUInt16LE(1, 22); // mono
  header.writeUInt32LE(rate, 24);
  header.writeUInt32LE(rate * 2, 28);
  header.writeUInt16LE(2, 32);
  header.writeUInt16LE(16, 34);
  header.write('data', 36, 'ascii');
  header.writeUInt32LE(data.length, 40);
  fs.mkdirSync(path.dirname(filePath), { recursive: true });
  fs.writeFileSync(filePath, Buffer.concat([header, data]));
}

export function sha256File(filePath: string): string {
  return crypto.createHash('sha256').update(fs.readFileSync(filePath)).digest('hex');
}

export interface ClipPlan {
  promptId: string;
  status?: string;
  // sidecar contents; omit a field to omit the sidecar file
  transcript?: string;
  language?: string;
}

/**
 * Build audio plus sidecars plus a manifest under root/audio, and return the
 * manifest path. Entries keep the order of the plans.
 */
export function buildManifestDir(
  root: string,
  plans: ClipPlan[],
  overrides: Partial<SynthesisManifest> = {}
): string {
  const entries: ManifestEntry[] = plans.map((plan) => {
    const rel = `audio/${plan.promptId}.wav`;
    const status = plan.status ?? 'ok';
    let sha = '0'.repeat(64);
    let duration: number | null = null;
    if (status === 'ok') {
      const wavPath = path.join(root, rel);
      writeWav(wavPath);
      sha = sha256File(wavPath);
      duration = 0.3;
      if (plan.transcript !== undefined) {
        fs.writeFileSync(`${wavPath}.txt`, plan.transcript, 'utf-8');
      }
      if (plan.language !== undefined) {
        fs.writeFileSync(`${wavPath}.lang`, plan.language, 'utf-8');
      }
    }
    return {
      prompt_id: plan.promptId,
      file_path: rel,
      sha256: sha,
      duration_s: duration,
      status,
    };
  });

  const manifest: SynthesisManifest = {
    schema_version: 1,
    system_id: 'smoke_tts',
    voice_id: 'voice_a',
    provider_version: '2026.01',
    run_date: '2026-08-18',
    source_set: 'smoke',
    entries,
    ...overrides,
  };
  const manifestPath = path.join(root, 'manifest.json');
  fs.writeFileSync(manifestPath, JSON.stringify(manifest, null, 2) + '\n', 'utf-8');
  return manifestPath;
}

export interface JsonlFile {
  meta: Record<string, unknown>;
  records: Array<Record<string, unknown>>;
}

export function readJsonl(filePath: string): JsonlFile {
  const lines = fs
    .readFileSync(filePath, 'utf-8')
    .split('\n')
    .filter((line) => line.length > 0)
    .map((line) => JSON.parse(line));
  const first = lines[0] as Record<string, unknown>;
  if (!('meta' in first)) throw new Error(`${filePath}: first line is not a meta header`);
  return { meta: first.meta as Record<string, unknown>, records: lines.slice(1) };
}
