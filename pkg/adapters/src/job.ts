// One adapter invocation: a manifest of synthesized audio, a model to run
// over it, and a JSONL path to fill.

export interface AdapterJob {
  manifestPath: string;
  // identifier recorded in every output row: backend_id for ASR, model_id for LID
  model: string;
  outPath: string;
  // where entry file_paths resolve from; defaults to the manifest's directory
  audioRoot?: string;
  batchSize?: number;
  // forwarded to the engine (external commands see it as ADAPTER_DEVICE)
  device?: string;
  revision?: string;
  engine?: string;
  command?: string;
}

export const DEFAULT_BATCH_SIZE = 16;

export function batchSizeOf(job: AdapterJob): number {
  const size = job.batchSize ?? DEFAULT_BATCH_SIZE;
  if (!Number.isInteger(size) || size < 1) {
    throw new Error(`batch size must be a positive integer, got ${size}`);
  }
  return size;
}

export function chunk<T>(items: T[], size: number): T[][] {
  const out: T[][] = [];
  for (let i = 0; i < items.length; i += size) {
    out.push(items.slice(i, i + size));
  }
  return out;
}
