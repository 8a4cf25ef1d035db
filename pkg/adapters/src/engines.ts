// Inference engines behind the adapters. An engine maps a batch of audio
// paths to raw model outputs and knows nothing about manifests or JSONL.

import * as fs from 'node:fs';
import { spawnSync } from 'node:child_process';

export interface AsrResult {
  // null means the decode failed outright; '' means an empty decode
  text: string | null;
  error?: string;
}

export interface LidResult {
  label: string | null;
  confidence?: number;
  error?: string;
}

export interface AsrEngine {
  name: string;
  revision: string;
  transcribeBatch(audioPaths: string[]): AsrResult[];
}

export interface LidEngine {
  name: string;
  revision: string;
  identifyBatch(audioPaths: string[]): LidResult[];
}

export interface EngineOptions {
  model: string;
  revision?: string;
  command?: string;
  device?: string;
}

/**
 * Read one sidecar file next to the audio, or explain why it could not be read.
 */
function readSidecar(audioPath: string, extension: string): { content?: string; error?: string } {
  const sidecarPath = `${audioPath}${extension}`;
  try {
    return { content: fs.readFileSync(sidecarPath, 'utf-8') };
  } catch (err) {
    return { error: `sidecar unreadable: ${(err as Error).message}` };
  }
}

/**
 * ASR from pre-decoded sidecar files: the transcript for a.wav lives in a.wav.txt.
 * Used to replay decodes dumped by an offline inference run.
 */
export function sidecarAsrEngine(options: EngineOptions): AsrEngine {
  return {
    name: options.model,
    revision: options.revision ?? 'sidecar-v1',
    transcribeBatch(audioPaths: string[]): AsrResult[] {
      return audioPaths.map((audioPath) => {
        const { content, error } = readSidecar(audioPath, '.txt');
        if (error !== undefined) return { text: null, error };
        return { text: (content as string).trim() };
      });
    },
  };
}

/**
 * LID from sidecar files: a.wav.lang holds "label" or "label confidence".
 */
export function sidecarLidEngine(options: EngineOptions): LidEngine {
  return {
    name: options.model,
    revision: options.revision ?? 'sidecar-v1',
    identifyBatch(audioPaths: string[]): LidResult[] {
      return audioPaths.map((audioPath) => {
        const { content, error } = readSidecar(audioPath, '.lang');
        if (error !== undefined) return { label: null, error };
        return parseLidLine(content as string);
      });
    },
  };
}

export function parseLidLine(content: string): LidResult {
  const tokens = content.trim().split(/\s+/).filter((t) => t.length > 0);
  if (tokens.length === 0) {
    return { label: null, error: 'empty language output' };
  }
  const label = tokens[0] as string;
  if (tokens.length === 1) return { label };
  const confidence = Number(tokens[1]);
  if (!Number.isFinite(confidence)) {
    return { label: null, error: `malformed confidence "${tokens[1]}"` };
  }
  return { label, confidence };
}

function runCommand(template: string, audioPath: string, device?: string): { stdout?: string; error?: string } {
  const cmd = template.includes('{audio}')
    ? template.replaceAll('{audio}', JSON.stringify(audioPath))
    : `${template} ${JSON.stringify(audioPath)}`;
  const env = device !== undefined ? { ...process.env, ADAPTER_DEVICE: device } : process.env;
  const proc = spawnSync('/bin/sh', ['-c', cmd], { encoding: 'utf-8', env });
  if (proc.error) {
    return { error: `command failed to start: ${proc.error.message}` };
  }
  if (proc.status !== 0) {
    const detail = (proc.stderr || '').trim().split('\n')[0] || `exit code ${proc.status}`;
    return { error: `command failed: ${detail}` };
  }
  return { stdout: proc.stdout };
}

/**
 * ASR through an external command run once per file. The command gets the
 * audio path ({audio} placeholder, or appended) and prints the transcript.
 */
export function commandAsrEngine(options: EngineOptions): AsrEngine {
  const template = options.command;
  if (template === undefined) throw new Error('command engine needs --command');
  return {
    name: options.model,
    revision: requireRevision(options),
    transcribeBatch(audioPaths: string[]): AsrResult[] {
      return audioPaths.map((audioPath) => {
        const { stdout, error } = runCommand(template, audioPath, options.device);
        if (error !== undefined) return { text: null, error };
        return { text: (stdout as string).trim() };
      });
    },
  };
}

/**
 * LID through an external command. The command prints "label" or "label confidence".
 */
export function commandLidEngine(options: EngineOptions): LidEngine {
  const template = options.command;
  if (template === undefined) throw new Error('command engine needs --command');
  return {
    name: options.model,
    revision: requireRevision(options),
    identifyBatch(audioPaths: string[]): LidResult[] {
      return audioPaths.map((audioPath) => {
        const { stdout, error } = runCommand(template, audioPath, options.device);
        if (error !== undefined) return { label: null, error };
        return parseLidLine(stdout as string);
      });
    },
  };
}

// External commands can point at anything, so the caller must pin what it was.
function requireRevision(options: EngineOptions): string {
  if (options.revision === undefined || options.revision === '') {
    throw new Error('command engine needs an explicit --revision to pin the model');
  }
  return options.revision;
}

export function makeAsrEngine(engineKind: string, options: EngineOptions): AsrEngine {
  if (engineKind === 'sidecar') return sidecarAsrEngine(options);
  if (engineKind === 'command') return commandAsrEngine(options);
  throw new Error(`unknown engine "${engineKind}" (expected sidecar or command)`);
}

export function makeLidEngine(engineKind: string, options: EngineOptions): LidEngine {
  if (engineKind === 'sidecar') return sidecarLidEngine(options);
  if (engineKind === 'command') return commandLidEngine(options);
  throw new Error(`unknown engine "${engineKind}" (expected sidecar or command)`);
}
