// Shared flag parsing for the two adapter executables.

import { parseArgs } from 'node:util';

import { AdapterJob } from './job.js';

export interface ParsedCli {
  job?: AdapterJob;
  helpText?: string;
  error?: string;
}

export function usage(program: string, modelNoun: string): string {
  return [
    `usage: ${program} --manifest <manifest.json> --out <output.jsonl> --model <${modelNoun}>`,
    '',
    'options:',
    `  --manifest <path>    synthesis manifest to read (required)`,
    `  --out <path>         JSONL file to write (required)`,
    `  --model <id>         ${modelNoun} recorded in every output row (required)`,
    '  --engine <kind>      sidecar (default) or command',
    '  --command <template> shell command for the command engine; {audio} is replaced',
    '                       with the audio path, otherwise the path is appended',
    '  --revision <rev>     model revision pinned in the output header',
    '                       (required for the command engine)',
    '  --audio-root <dir>   directory entry paths resolve from (default: manifest dir)',
    '  --batch-size <n>     entries per engine call (default: 16)',
    '  --device <hint>      device hint forwarded to the engine',
    '  --help               show this message',
  ].join('\n');
}

export function parseCli(argv: string[], program: string, modelNoun: string): ParsedCli {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        manifest: { type: 'string' },
        out: { type: 'string' },
        model: { type: 'string' },
        engine: { type: 'string' },
        command: { type: 'string' },
        revision: { type: 'string' },
        'audio-root': { type: 'string' },
        'batch-size': { type: 'string' },
        device: { type: 'string' },
        help: { type: 'boolean' },
      },
      allowPositionals: false,
    });
  } catch (err) {
    return { error: (err as Error).message };
  }

  const values = parsed.values;
  if (values.help) {
    return { helpText: usage(program, modelNoun) };
  }
  for (const required of ['manifest', 'out', 'model'] as const) {
    if (values[required] === undefined) {
      return { error: `--${required} is required` };
    }
  }

  let batchSize: number | undefined;
  if (values['batch-size'] !== undefined) {
    batchSize = Number(values['batch-size']);
    if (!Number.isInteger(batchSize) || batchSize < 1) {
      return { error: `--batch-size must be a positive integer, got "${values['batch-size']}"` };
    }
  }

  const job: AdapterJob = {
    manifestPath: values.manifest as string,
    outPath: values.out as string,
    model: values.model as string,
  };
  if (values.engine !== undefined) job.engine = values.engine;
  if (values.command !== undefined) job.command = values.command;
  if (values.revision !== undefined) job.revision = values.revision;
  if (values['audio-root'] !== undefined) job.audioRoot = values['audio-root'];
  if (batchSize !== undefined) job.batchSize = batchSize;
  if (values.device !== undefined) job.device = values.device;
  return { job };
}
