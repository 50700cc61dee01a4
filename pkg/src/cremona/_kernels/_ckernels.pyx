# cython: language_level=3
"""Compiled twins of the kernels in _pykernels.py (same contracts)."""

from libc.stdlib cimport malloc, free


cdef void _rec(long s, long q, long cap, long slots, long depth,
               long *prefix, list out):
    cdef long m, top
    if s == 0:
        if q == 0:
            out.append(tuple([prefix[i] for i in range(depth)]))
        return
    if slots == 0 or q <= 0:
        return
    if s * s > slots * q or q > cap * s:
        return
    top = cap if cap < s else s
    m = top
    while m > 0:
        if m * m <= q:
            prefix[depth] = m
            _rec(s - m, q - m * m, m, slots - 1, depth + 1, prefix, out)
        m -= 1


def minus_one_profiles(long delta, long n):
    if delta < 1 or n < 1:
        return []
    cdef list out = []
    cdef long *prefix = <long *>malloc((n + 1) * sizeof(long))
    try:
        _rec(3 * delta - 1, delta * delta + 1, delta, n, 0, prefix, out)
    finally:
        free(prefix)
    return out


def max_weight_ideal(parents, weights, long k):
    cdef long n = len(parents)
    cdef long root = n
    cdef long v, a, b, size, idx, j
    cdef long va, vb, t
    if k > n:
        k = n
    if k < 0:
        k = 0
    cdef list children = [[] for _ in range(n + 1)]
    for v in range(n):
        p = parents[v]
        children[root if p < 0 else p].append(v)
    cdef list dp = [None] * (n + 1)
    cdef list hist = [None] * (n + 1)
    cdef list cur, new, arg, child, steps
    order = list(range(n - 1, -1, -1)) + [root]
    for v in order:
        cur = [0]
        steps = []
        for c in children[v]:
            child = dp[c]
            size = min(len(cur) + len(child) - 1, k + 1)
            new = [None] * size
            arg = [0] * size
            for a in range(len(cur)):
                if cur[a] is None:
                    continue
                va = cur[a]
                for b in range(len(child)):
                    if child[b] is None or a + b >= size:
                        continue
                    vb = child[b]
                    t = va + vb
                    if new[a + b] is None or t > new[a + b]:
                        new[a + b] = t
                        arg[a + b] = b
            steps.append(arg)
            cur = new
        hist[v] = steps
        if v == root:
            dp[v] = cur
        else:
            w = weights[v]
            dp[v] = [0] + [None if x is None else x + w for x in cur[:k]]

    chosen = []
    stack = [(root, k)]
    while stack:
        v, j = stack.pop()
        if v != root:
            if j == 0:
                continue
            chosen.append(v)
            j -= 1
        for idx in range(len(children[v]) - 1, -1, -1):
            b = hist[v][idx][j]
            stack.append((children[v][idx], b))
            j -= b
    return dp[root][k], sorted(chosen)
