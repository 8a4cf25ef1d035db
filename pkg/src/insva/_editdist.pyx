# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Levenshtein kernels.

Mirror of ``_editdist_py`` (unit costs; traceback tie-break
diagonal-match > substitution > deletion > insertion). Any behavioural
change must land in both files.
"""

from libc.stdlib cimport free, malloc

OP_MATCH = 0
OP_SUB = 1
OP_DEL = 2
OP_INS = 3


def distance(list a, list b):
    cdef Py_ssize_t la = len(a)
    cdef Py_ssize_t lb = len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    cdef long *enc_a = <long *> malloc(la * sizeof(long))
    cdef long *enc_b = <long *> malloc(lb * sizeof(long))
    cdef long *prev = <long *> malloc((lb + 1) * sizeof(long))
    cdef long *cur = <long *> malloc((lb + 1) * sizeof(long))
    if enc_a == NULL or enc_b == NULL or prev == NULL or cur == NULL:
        free(enc_a); free(enc_b); free(prev); free(cur)
        raise MemoryError()
    cdef Py_ssize_t i, j
    cdef long ai, cost, d, u, l, result
    cdef long *tmp
    try:
        for i in range(la):
            enc_a[i] = <long> a[i]
        for j in range(lb):
            enc_b[j] = <long> b[j]
        for j in range(lb + 1):
            prev[j] = j
        for i in range(1, la + 1):
            cur[0] = i
            ai = enc_a[i - 1]
            for j in range(1, lb + 1):
                cost = 0 if ai == enc_b[j - 1] else 1
                d = prev[j - 1] + cost
                u = prev[j] + 1
                l = cur[j - 1] + 1
                if u < d:
                    d = u
                if l < d:
                    d = l
                cur[j] = d
            tmp = prev
            prev = cur
            cur = tmp
        result = prev[lb]
    finally:
        free(enc_a); free(enc_b); free(prev); free(cur)
    return result


def alignment_ops(list a, list b):
    cdef Py_ssize_t la = len(a)
    cdef Py_ssize_t lb = len(b)
    cdef Py_ssize_t width = lb + 1
    cdef long *enc_a = NULL
    cdef long *enc_b = NULL
    cdef long *dp = <long *> malloc((la + 1) * width * sizeof(long))
    if la > 0:
        enc_a = <long *> malloc(la * sizeof(long))
    if lb > 0:
        enc_b = <long *> malloc(lb * sizeof(long))
    if dp == NULL or (la > 0 and enc_a == NULL) or (lb > 0 and enc_b == NULL):
        free(enc_a); free(enc_b); free(dp)
        raise MemoryError()
    cdef Py_ssize_t i, j, row
    cdef long ai, cost, d, u, l, here, diag
    ops = []
    try:
        for i in range(la):
            enc_a[i] = <long> a[i]
        for j in range(lb):
            enc_b[j] = <long> b[j]
        for j in range(width):
            dp[j] = j
        for i in range(1, la + 1):
            row = i * width
            dp[row] = i
            ai = enc_a[i - 1]
            for j in range(1, width):
                cost = 0 if ai == enc_b[j - 1] else 1
                d = dp[row - width + j - 1] + cost
                u = dp[row - width + j] + 1
                l = dp[row + j - 1] + 1
                if u < d:
                    d = u
                if l < d:
                    d = l
                dp[row + j] = d

        i = la
        j = lb
        while i > 0 or j > 0:
            here = dp[i * width + j]
            if i > 0 and j > 0:
                diag = dp[(i - 1) * width + j - 1]
                if enc_a[i - 1] == enc_b[j - 1] and diag == here:
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
    finally:
        free(enc_a); free(enc_b); free(dp)
    ops.reverse()
    return ops
