"""Benchmark the compiled edit-distance kernel against the pure-Python twin.

Times distance and full alignment on two synthetic workloads shaped like
real scoring traffic: token sequences (5..25 words) and codepoint
sequences (40..90 chars). Run from the repo root:

    python3 benchmarks/bench_editdist.py --pairs 2000
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from insva import _editdist_py

try:
    from insva import _editdist as _editdist_c
except ImportError:
    _editdist_c = None


def make_pairs(n_pairs: int, lo: int, hi: int, alphabet: int, seed: int) -> list[tuple[list[int], list[int]]]:
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(n_pairs):
        n = int(rng.integers(lo, hi + 1))
        a = rng.integers(0, alphabet, size=n).tolist()
        b = a.copy()
        # corrupt ~20% of positions so distances are realistic, not maximal
        for pos in rng.integers(0, n, size=max(1, n // 5)):
            b[int(pos)] = int(rng.integers(0, alphabet))
        pairs.append((a, b))
    return pairs


def time_kernel(module, pairs, mode: str) -> float:
    fn = module.distance if mode == "distance" else module.alignment_ops
    start = time.perf_counter()
    for a, b in pairs:
        fn(a, b)
    return time.perf_counter() - start


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--pairs", type=int, default=2000, help="sequence pairs per workload")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    workloads = {
        "words (5..25 tokens)": make_pairs(args.pairs, 5, 25, alphabet=4000, seed=args.seed),
        "chars (40..90 codepoints)": make_pairs(args.pairs, 40, 90, alphabet=44, seed=args.seed + 1),
    }
    kernels = [("python", _editdist_py)]
    if _editdist_c is not None:
        kernels.append(("compiled", _editdist_c))
    else:
        print("compiled kernel not built; timing the pure-Python kernel only")

    print(f"{args.pairs} pairs per workload\n")
    print(f"{'workload':<28} {'mode':<10} " + " ".join(f"{name:>10}" for name, _ in kernels) + "   speedup")
    for workload_name, pairs in workloads.items():
        for mode in ("distance", "alignment"):
            times = [time_kernel(module, pairs, mode) for _, module in kernels]
            cells = " ".join(f"{t * 1000:>8.1f}ms" for t in times)
            speedup = f"{times[0] / times[-1]:>8.1f}x" if len(times) == 2 else "       -"
            print(f"{workload_name:<28} {mode:<10} {cells} {speedup}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
