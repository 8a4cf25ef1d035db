"""Pure-Python Levenshtein kernels (fallback for the compiled extension).

Both kernels operate on integer-encoded token sequences and must stay
behaviourally identical to ``_editdist.pyx``: unit costs, and traceback
tie-break diagonal-match > substitution > deletion > insertion.
"""

from __future__ import annotations

OP_MATCH = 0
OP_SUB = 1
OP_DEL = 2
OP_INS = 3


def distance(a: list, b: list) -> int:
    la, lb = len(a), len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    prev = list(range(lb + 1))
    cur = [0] * (lb + 1)
    for i in range(1, la + 1):
        cur[0] = i
        ai = a[i - 1]
        for j in range(1, lb + 1):
            cost = 0 if ai == b[j - 1] else 1
            d = prev[j - 1] + cost
            u = prev[j] + 1
            l = cur[j - 1] + 1
            if u < d:
                d = u
            if l < d:
                d = l
            cur[j] = d
        prev, cur = cur, prev
    return prev[lb]


def alignment_ops(a: list, b: list) -> list:
    """Full-matrix DP plus traceback; returns op codes in ref/hyp order."""
    la, lb = len(a), len(b)
    width = lb + 1
    dp = [0] * ((la + 1) * width)
    for j in range(1, width):
        dp[j] = j
    for i in range(1, la + 1):
        row = i * width
        dp[row] = i
        ai = a[i - 1]
        for j in range(1, width):
            cost = 0 if ai == b[j - 1] else 1
            d = dp[row - width + j - 1] + cost
            u = dp[row - width + j] + 1
            l = dp[row + j - 1] + 1
            if u < d:
                d = u
            if l < d:
                d = l
            dp[row + j] = d

    ops = []
    i, j = la, lb
    while i > 0 or j > 0:
        here = dp[i * width + j]
        if i > 0 and j > 0:
            diag = dp[(i - 1) * width + j - 1]
            if a[i - 1] == b[j - 1] and diag == here:
                ops.append(OP_MATCH)
                i -= 1
                j -= 1
                continue
            if diag + 1 == here:
                ops.append(OP_SUB)
                i -= 1
                j -= 1
                continue
        if i > 0 and dp[(i - 1) * width + j] + 1 == here:
            ops.append(OP_DEL)
            i -= 1
            continue
        ops.append(OP_INS)
        j -= 1
    ops.reverse()
    return ops
