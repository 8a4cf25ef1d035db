#!/usr/bin/env node
// asr-adapter: transcribe a synthesis manifest into hypothesis JSONL.

import { runAsrAdapter } from './asrAdapter.js';
import { parseCli } from './cliArgs.js';

const parsed = parseCli(process.argv.slice(2), 'asr-adapter', 'ASR backend id');
if (parsed.helpText !== undefined) {
  console.log(parsed.helpText);
  process.exit(0);
}
if (parsed.error !== undefined || parsed.job === undefined) {
  console.error(`asr-adapter: ${parsed.error ?? 'bad arguments'}`);
  console.error('run with --help for usage');
  process.exit(2);
}

try {
  const stats = runAsrAdapter(parsed.job);
  console.log(
    `asr-adapter: wrote ${stats.total} records to ${parsed.job.outPath} ` +
      `(${stats.ok} ok, ${stats.failed} asr_failed, ${stats.empty} empty)`
  );
} catch (err) {
  console.error(`asr-adapter: ${(err as Error).message}`);
  process.exit(1);
}
