#!/usr/bin/env node
// lid-adapter: label a synthesis manifest's audio with a language-ID model.

import { parseCli } from './cliArgs.js';
import { runLidAdapter } from './lidAdapter.js';

const parsed = parseCli(process.argv.slice(2), 'lid-adapter', 'LID model id');
if (parsed.helpText !== undefined) {
  console.log(parsed.helpText);
  process.exit(0);
}
if (parsed.error !== undefined || parsed.job === undefined) {
  console.error(`lid-adapter: ${parsed.error ?? 'bad arguments'}`);
  console.error('run with --help for usage');
  process.exit(2);
}

try {
  const stats = runLidAdapter(parsed.job);
  console.log(
    `lid-adapter: wrote ${stats.total} records to ${parsed.job.outPath} ` +
      `(${stats.labeled} labeled, ${stats.undetermined} undetermined)`
  );
} catch (err) {
  console.error(`lid-adapter: ${(err as Error).message}`);
  process.exit(1);
}
