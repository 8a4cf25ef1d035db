"""Edit-distance kernels against an independent recursive oracle."""

from __future__ import annotations

import random
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from insva import _editdist_py
from insva.alignment import BACKEND, align, backend_name, edit_distance, substitutions

try:
    from insva import _editdist  # compiled twin, absent on source-only installs

    HAVE_COMPILED = True
except ImportError:
    HAVE_COMPILED = False


def oracle_distance(a: tuple, b: tuple, memo=None) -> int:
    """Straight from the recurrence; shares no code with the kernels."""
    if memo is None:
        memo = {}
    key = (a, b)
    if key in memo:
        return memo[key]
    if not a:
        return len(b)
    if not b:
        return len(a)
    cost = 0 if a[0] == b[0] else 1
    result = min(
        oracle_distance(a[1:], b[1:], memo) + cost,
        oracle_distance(a[1:], b, memo) + 1,
        oracle_distance(a, b[1:], memo) + 1,
    )
    memo[key] = result
    return result


def random_cases(n: int, seed: int, max_len: int = 8, alphabet: int = 5):
    rng = random.Random(seed)
    for _ in range(n):
        a = tuple(rng.randrange(alphabet) for _ in range(rng.randrange(max_len + 1)))
        b = tuple(rng.randrange(alphabet) for _ in range(rng.randrange(max_len + 1)))
        yield a, b


def test_kernel_matches_recursive_oracle_1000_cases():
    start = time.monotonic()
    for a, b in random_cases(1000, seed=1234):
        assert edit_distance(a, b) == oracle_distance(a, b), (a, b)
    assert time.monotonic() - start < 10.0


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled kernel not built")
def test_compiled_and_python_kernels_agree():
    for a, b in random_cases(500, seed=99, max_len=12, alphabet=6):
        la, lb = list(a), list(b)
        assert _editdist.distance(la, lb) == _editdist_py.distance(la, lb)
        assert _editdist.alignment_ops(la, lb) == _editdist_py.alignment_ops(la, lb)


def test_backend_is_reported():
    assert backend_name() == BACKEND
    assert BACKEND in ("compiled", "python")


def test_alignment_reconstructs_inputs_and_cost():
    for a, b in random_cases(300, seed=5):
        pairs = align(a, b)
        assert tuple(r for r, _ in pairs if r is not None) == a
        assert tuple(h for _, h in pairs if h is not None) == b
        assert sum(1 for r, h in pairs if r != h) == edit_distance(a, b)


def test_alignment_prefers_matches():
    # One substitution, not a delete+insert pair.
    assert align("ab", "ax") == [("a", "a"), ("b", "x")]
    # The shared letter must align to itself.
    assert ("b", "b") in align("ab", "b")


def test_substitutions_only_reports_changed_pairs():
    subs = substitutions("abc", "axc")
    assert subs == [("b", "x")]


@given(
    st.lists(st.integers(0, 4), max_size=10),
    st.lists(st.integers(0, 4), max_size=10),
)
@settings(max_examples=200)
def test_distance_bounds(a, b):
    d = edit_distance(a, b)
    assert abs(len(a) - len(b)) <= d <= max(len(a), len(b))
    assert (d == 0) == (a == b)
    assert d == edit_distance(b, a)


@given(st.lists(st.integers(0, 4), max_size=10))
@settings(max_examples=100)
def test_distance_identity(a):
    assert edit_distance(a, a) == 0


def test_empty_sequences():
    assert edit_distance([], []) == 0
    assert edit_distance([], [1, 2]) == 2
    assert edit_distance([1, 2], []) == 2
    assert align([], [1]) == [(None, 1)]
    assert align([1], []) == [(1, None)]
