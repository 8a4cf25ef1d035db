// Run a language-identification model over a synthesis manifest and emit one
// label record per entry, in manifest order.

import * as path from 'node:path';

import { LidEngine, makeLidEngine } from './engines.js';
import { AdapterJob, batchSizeOf, chunk } from './job.js';
import { LidRecord, readManifest, resolveAudioPath, writeJsonl } from './wire.js';

export interface LidStats {
  total: number;
  labeled: number;
  undetermined: number;
}

// Clips the model cannot label get this code so every entry still has a row.
export const UNDETERMINED = 'und';

/**
 * Label a manifest and write the language-label JSONL.
 *
 * Every manifest entry yields exactly one record. The predicted label is
 * emitted verbatim; confidence is included only when the model reports one.
 * Unreadable audio and failed synthesis become "und" rows instead of
 * aborting the batch.
 */
export function runLidAdapter(job: AdapterJob, engine?: LidEngine): LidStats {
  const resolved =
    engine ??
    makeLidEngine(job.engine ?? 'sidecar', {
      model: job.model,
      revision: job.revision,
      command: job.command,
      device: job.device,
    });

  const manifest = readManifest(job.manifestPath);
  const audioRoot = job.audioRoot ?? path.dirname(path.resolve(job.manifestPath));

  const scorable = manifest.entries.filter((entry) => entry.status === 'ok');
  const outputs = new Map<string, { label: string; confidence?: number }>();

  for (const batch of chunk(scorable, batchSizeOf(job))) {
    const paths = batch.map((entry) => resolveAudioPath(audioRoot, entry));
    const results = engineBatch(resolved, paths);
    batch.forEach((entry, i) => {
      const result = results[i]!;
      if (result.label === null) {
        outputs.set(entry.prompt_id, { label: UNDETERMINED });
      } else {
        outputs.set(entry.prompt_id, { label: result.label, confidence: result.confidence });
      }
    });
  }

  const records: LidRecord[] = manifest.entries.map((entry) => {
    const labeled = outputs.get(entry.prompt_id) ?? { label: UNDETERMINED };
    const record: LidRecord = {
      prompt_id: entry.prompt_id,
      system_id: manifest.system_id,
      source_set: manifest.source_set,
      model_id: job.model,
      predicted_label: labeled.label,
    };
    if (labeled.confidence !== undefined) {
      record.confidence = labeled.confidence;
    }
    return record;
  });

  writeJsonl(job.outPath, { model_id: job.model, model_revision: resolved.revision }, records as unknown as Array<Record<string, unknown>>);

  return {
    total: records.length,
    labeled: records.filter((r) => r.predicted_label !== UNDETERMINED).length,
    undetermined: records.filter((r) => r.predicted_label === UNDETERMINED).length,
  };
}

function engineBatch(engine: LidEngine, paths: string[]) {
  const results = engine.identifyBatch(paths);
  if (results.length !== paths.length) {
    throw new Error(`engine returned ${results.length} results for ${paths.length} files`);
  }
  return results;
}
