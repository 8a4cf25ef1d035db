import * as fs from 'node:fs';
import * as path from 'node:path';

import { describe, expect, it } from 'vitest';

import { runAsrAdapter } from '../src/asrAdapter.js';
import { runLidAdapter } from '../src/lidAdapter.js';
import {
  AsrEngine,
  makeAsrEngine,
  makeLidEngine,
  parseLidLine,
  sidecarAsrEngine,
} from '../src/engines.js';
import { parseCli } from '../src/cliArgs.js';
import { readManifest } from '../src/wire.js';
import { buildManifestDir, makeTempDir, readJsonl } from './fixtures.js';

const TEXT_1 = 'سلام نړۍ دا ازموینه ده';
const TEXT_2 = 'دا دویمه جمله ده';

describe('asr adapter', () => {
  it('writes one record per manifest entry, in manifest order', () => {
    const root = makeTempDir('asr');
    const manifestPath = buildManifestDir(root, [
      { promptId: 'p001', transcript: TEXT_1 },
      { promptId: 'p002', transcript: '' },
      { promptId: 'p003' }, // no sidecar: the decode fails
      { promptId: 'p004', status: 'synthesis_failed' },
    ]);
    const outPath = path.join(root, 'hyp.jsonl');

    const stats = runAsrAdapter({ manifestPath, outPath, model: 'asr_v3' });

    expect(stats).toEqual({ total: 4, ok: 1, failed: 2, empty: 1 });
    const { meta, records } = readJsonl(outPath);
    expect(meta).toEqual({ backend_id: 'asr_v3', model_revision: 'sidecar-v1' });
    expect(records.map((r) => r.prompt_id)).toEqual(['p001', 'p002', 'p003', 'p004']);
    expect(records.map((r) => r.status)).toEqual(['ok', 'empty', 'asr_failed', 'asr_failed']);
    expect(records.map((r) => r.text)).toEqual([TEXT_1, '', '', '']);
    for (const record of records) {
      expect(record.system_id).toBe('smoke_tts');
      expect(record.source_set).toBe('smoke');
      expect(record.backend_id).toBe('asr_v3');
    }
  });

  it('pins an explicit revision in the header line', () => {
    const root = makeTempDir('rev');
    const manifestPath = buildManifestDir(root, [{ promptId: 'p001', transcript: TEXT_1 }]);
    const outPath = path.join(root, 'hyp.jsonl');

    runAsrAdapter({ manifestPath, outPath, model: 'asr_v3', revision: 'r9' });

    expect(readJsonl(outPath).meta).toEqual({ backend_id: 'asr_v3', model_revision: 'r9' });
  });

  it('reruns byte-identically and leaves no temp files behind', () => {
    const root = makeTempDir('idem');
    const manifestPath = buildManifestDir(root, [
      { promptId: 'p001', transcript: TEXT_1 },
      { promptId: 'p002', transcript: TEXT_2 },
      { promptId: 'p003' },
    ]);
    const outPath = path.join(root, 'hyp.jsonl');

    runAsrAdapter({ manifestPath, outPath, model: 'asr_v3' });
    const first = fs.readFileSync(outPath);
    runAsrAdapter({ manifestPath, outPath, model: 'asr_v3' });
    const second = fs.readFileSync(outPath);

    expect(second.equals(first)).toBe(true);
    const leftovers = fs.readdirSync(root).filter((name) => name.includes('.tmp-'));
    expect(leftovers).toEqual([]);
  });

  it('honors the batch size without changing the output', () => {
    const root = makeTempDir('batch');
    const plans = ['p001', 'p002', 'p003', 'p004', 'p005'].map((promptId) => ({
      promptId,
      transcript: `${TEXT_1} ${promptId}`,
    }));
    const manifestPath = buildManifestDir(root, plans);

    const batchSizes: number[] = [];
    const inner = sidecarAsrEngine({ model: 'asr_v3' });
    const spy: AsrEngine = {
      name: inner.name,
      revision: inner.revision,
      transcribeBatch(paths) {
        batchSizes.push(paths.length);
        return inner.transcribeBatch(paths);
      },
    };

    const small = path.join(root, 'small.jsonl');
    const large = path.join(root, 'large.jsonl');
    runAsrAdapter({ manifestPath, outPath: small, model: 'asr_v3', batchSize: 2 }, spy);
    runAsrAdapter({ manifestPath, outPath: large, model: 'asr_v3', batchSize: 50 });

    expect(batchSizes).toEqual([2, 2, 1]);
    expect(fs.readFileSync(small).equals(fs.readFileSync(large))).toBe(true);
  });

  it('rejects engines that drop results', () => {
    const root = makeTempDir('mismatch');
    const manifestPath = buildManifestDir(root, [{ promptId: 'p001', transcript: TEXT_1 }]);
    const broken: AsrEngine = {
      name: 'bad',
      revision: 'r1',
      transcribeBatch: () => [],
    };

    expect(() =>
      runAsrAdapter({ manifestPath, outPath: path.join(root, 'hyp.jsonl'), model: 'bad' }, broken)
    ).toThrow(/0 results for 1 files/);
  });
});

describe('lid adapter', () => {
  it('labels every entry and omits confidence when the model gives none', () => {
    const root = makeTempDir('lid');
    const manifestPath = buildManifestDir(root, [
      { promptId: 'p001', language: 'ps 0.97' },
      { promptId: 'p002', language: 'ps' },
      { promptId: 'p003' }, // no sidecar: cannot be labeled
      { promptId: 'p004', status: 'synthesis_failed' },
    ]);
    const outPath = path.join(root, 'lid.jsonl');

    const stats = runLidAdapter({ manifestPath, outPath, model: 'mms_lid' });

    expect(stats).toEqual({ total: 4, labeled: 2, undetermined: 2 });
    const { meta, records } = readJsonl(outPath);
    expect(meta).toEqual({ model_id: 'mms_lid', model_revision: 'sidecar-v1' });
    expect(records.map((r) => r.prompt_id)).toEqual(['p001', 'p002', 'p003', 'p004']);
    expect(records.map((r) => r.predicted_label)).toEqual(['ps', 'ps', 'und', 'und']);
    expect(records[0]!.confidence).toBe(0.97);
    expect('confidence' in records[1]!).toBe(false);
    expect('confidence' in records[2]!).toBe(false);
    for (const record of records) {
      expect(record.model_id).toBe('mms_lid');
    }
  });

  it('emits off-target labels verbatim', () => {
    const root = makeTempDir('verbatim');
    const manifestPath = buildManifestDir(root, [{ promptId: 'p001', language: 'fa 0.81' }]);
    const outPath = path.join(root, 'lid.jsonl');

    runLidAdapter({ manifestPath, outPath, model: 'mms_lid' });

    const { records } = readJsonl(outPath);
    expect(records[0]!.predicted_label).toBe('fa');
    expect(records[0]!.confidence).toBe(0.81);
  });
});

describe('model output parsing', () => {
  it('reads label and optional confidence', () => {
    expect(parseLidLine('ps 0.5')).toEqual({ label: 'ps', confidence: 0.5 });
    expect(parseLidLine(' fa \n')).toEqual({ label: 'fa' });
    expect(parseLidLine('').error).toMatch(/empty/);
    expect(parseLidLine('ps abc').error).toMatch(/malformed confidence/);
  });
});

describe('command engine', () => {
  it('matches the sidecar engine when the command reads the same files', () => {
    const root = makeTempDir('cmd');
    const manifestPath = buildManifestDir(root, [
      { promptId: 'p001', transcript: TEXT_1, language: 'ps 0.93' },
      { promptId: 'p002', transcript: TEXT_2, language: 'ps' },
    ]);

    const viaCommand = path.join(root, 'cmd.jsonl');
    const viaSidecar = path.join(root, 'sidecar.jsonl');
    runAsrAdapter({
      manifestPath,
      outPath: viaCommand,
      model: 'asr_v3',
      engine: 'command',
      command: 'cat {audio}.txt',
      revision: 'sidecar-v1',
    });
    runAsrAdapter({ manifestPath, outPath: viaSidecar, model: 'asr_v3' });
    expect(fs.readFileSync(viaCommand).equals(fs.readFileSync(viaSidecar))).toBe(true);

    const lidOut = path.join(root, 'lid_cmd.jsonl');
    runLidAdapter({
      manifestPath,
      outPath: lidOut,
      model: 'mms_lid',
      engine: 'command',
      command: 'cat {audio}.lang',
      revision: 'mms-r4',
    });
    const { meta, records } = readJsonl(lidOut);
    expect(meta).toEqual({ model_id: 'mms_lid', model_revision: 'mms-r4' });
    expect(records.map((r) => r.predicted_label)).toEqual(['ps', 'ps']);
  });

  it('turns per-file command failures into failed records, not aborts', () => {
    const root = makeTempDir('cmdfail');
    const manifestPath = buildManifestDir(root, [
      { promptId: 'p001', transcript: TEXT_1 },
      { promptId: 'p002', transcript: TEXT_2 },
    ]);
    const outPath = path.join(root, 'hyp.jsonl');

    const stats = runAsrAdapter({
      manifestPath,
      outPath,
      model: 'asr_v3',
      engine: 'command',
      command: 'false',
      revision: 'r1',
    });

    expect(stats.failed).toBe(2);
    const { records } = readJsonl(outPath);
    expect(records.map((r) => r.status)).toEqual(['asr_failed', 'asr_failed']);
  });

  it('refuses to run without a pinned revision', () => {
    expect(() => makeAsrEngine('command', { model: 'x', command: 'cat' })).toThrow(/--revision/);
    expect(() => makeLidEngine('command', { model: 'x', command: 'cat' })).toThrow(/--revision/);
  });

  it('requires a command template', () => {
    expect(() => makeAsrEngine('command', { model: 'x', revision: 'r1' })).toThrow(/--command/);
  });
});

describe('manifest gatekeeping', () => {
  it('rejects unknown schema versions and missing keys', () => {
    const root = makeTempDir('schema');
    const goodPath = buildManifestDir(root, [{ promptId: 'p001', transcript: TEXT_1 }]);
    const manifest = JSON.parse(fs.readFileSync(goodPath, 'utf-8'));

    manifest.schema_version = 2;
    const v2Path = path.join(root, 'v2.json');
    fs.writeFileSync(v2Path, JSON.stringify(manifest));
    expect(() => readManifest(v2Path)).toThrow(/schema_version 2/);

    manifest.schema_version = 1;
    delete manifest.source_set;
    const partialPath = path.join(root, 'partial.json');
    fs.writeFileSync(partialPath, JSON.stringify(manifest));
    expect(() => readManifest(partialPath)).toThrow(/source_set/);
  });

  it('rejects unknown engine kinds', () => {
    expect(() => makeAsrEngine('cloud', { model: 'x' })).toThrow(/unknown engine/);
  });
});

describe('cli parsing', () => {
  it('requires manifest, out, and model', () => {
    expect(parseCli(['--out', 'o.jsonl', '--model', 'm'], 'asr-adapter', 'id').error).toMatch(
      /--manifest is required/
    );
    expect(parseCli(['--manifest', 'm.json', '--model', 'm'], 'asr-adapter', 'id').error).toMatch(
      /--out is required/
    );
    expect(parseCli(['--manifest', 'm.json', '--out', 'o.jsonl'], 'asr-adapter', 'id').error).toMatch(
      /--model is required/
    );
  });

  it('maps every flag onto the job', () => {
    const { job, error } = parseCli(
      [
        '--manifest', 'm.json',
        '--out', 'o.jsonl',
        '--model', 'asr_v3',
        '--engine', 'command',
        '--command', 'decode {audio}',
        '--revision', 'r2',
        '--audio-root', '/data/audio',
        '--batch-size', '8',
        '--device', 'cuda:0',
      ],
      'asr-adapter',
      'id'
    );
    expect(error).toBeUndefined();
    expect(job).toEqual({
      manifestPath: 'm.json',
      outPath: 'o.jsonl',
      model: 'asr_v3',
      engine: 'command',
      command: 'decode {audio}',
      revision: 'r2',
      audioRoot: '/data/audio',
      batchSize: 8,
      device: 'cuda:0',
    });
  });

  it('rejects junk batch sizes and unknown flags', () => {
    const base = ['--manifest', 'm.json', '--out', 'o.jsonl', '--model', 'm'];
    expect(parseCli([...base, '--batch-size', 'zero'], 'asr-adapter', 'id').error).toMatch(
      /--batch-size/
    );
    expect(parseCli([...base, '--batch-size', '0'], 'asr-adapter', 'id').error).toMatch(
      /--batch-size/
    );
    expect(parseCli([...base, '--frobnicate'], 'asr-adapter', 'id').error).toMatch(/frobnicate/);
  });

  it('prints usage on --help', () => {
    const { helpText } = parseCli(['--help'], 'lid-adapter', 'LID model id');
    expect(helpText).toContain('--manifest');
    expect(helpText).toContain('lid-adapter');
  });
});
