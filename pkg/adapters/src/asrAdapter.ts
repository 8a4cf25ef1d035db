// Run an ASR model over every entry of a synthesis manifest and emit one
// hypothesis record per entry, in manifest order.

import * as path from 'node:path';

import { AsrEngine, makeAsrEngine } from './engines.js';
import { AdapterJob, batchSizeOf, chunk } from './job.js';
import { HypothesisRecord, readManifest, resolveAudioPath, writeJsonl } from './wire.js';

export interface AdapterStats {
  total: number;
  ok: number;
  failed: number;
  empty: number;
}

/**
 * Transcribe a manifest and write the hypothesis JSONL.
 *
 * Every manifest entry yields exactly one record. Entries whose synthesis
 * already failed, and entries the model cannot decode, become asr_failed
 * records rather than aborting the batch. Empty decodes are kept but marked
 * so scoring can exclude them with a reason.
 */
export function runAsrAdapter(job: AdapterJob, engine?: AsrEngine): AdapterStats {
  const resolved =
    engine ??
    makeAsrEngine(job.engine ?? 'sidecar', {
      model: job.model,
      revision: job.revision,
      command: job.command,
      device: job.device,
    });

  const manifest = readManifest(job.manifestPath);
  const audioRoot = job.audioRoot ?? path.dirname(path.resolve(job.manifestPath));

  const decodable = manifest.entries.filter((entry) => entry.status === 'ok');
  const outputs = new Map<string, { text: string; status: string }>();

  for (const batch of chunk(decodable, batchSizeOf(job))) {
    const paths = batch.map((entry) => resolveAudioPath(audioRoot, entry));
    const results = engineBatch(resolved, paths);
    batch.forEach((entry, i) => {
      const result = results[i]!;
      if (result.text === null) {
        outputs.set(entry.prompt_id, { text: '', status: 'asr_failed' });
      } else if (result.text === '') {
        outputs.set(entry.prompt_id, { text: '', status: 'empty' });
      } else {
        outputs.set(entry.prompt_id, { text: result.text, status: 'ok' });
      }
    });
  }

  const records: HypothesisRecord[] = manifest.entries.map((entry) => {
    // no audio was produced for non-ok entries, so there is nothing to decode
    const decoded = outputs.get(entry.prompt_id) ?? { text: '', status: 'asr_failed' };
    return {
      prompt_id: entry.prompt_id,
      system_id: manifest.system_id,
      source_set: manifest.source_set,
      backend_id: job.model,
      text: decoded.text,
      status: decoded.status,
    };
  });

  writeJsonl(job.outPath, { backend_id: job.model, model_revision: resolved.revision }, records as unknown as Array<Record<string, unknown>>);

  return {
    total: records.length,
    ok: records.filter((r) => r.status === 'ok').length,
    failed: records.filter((r) => r.status === 'asr_failed').length,
    empty: records.filter((r) => r.status === 'empty').length,
  };
}

function engineBatch(engine: AsrEngine, paths: string[]) {
  const results = engine.transcribeBatch(paths);
  if (results.length !== paths.length) {
    throw new Error(`engine returned ${results.length} results for ${paths.length} files`);
  }
  return results;
}
