"""Pure-Python versions of the combinatorial kernels.

Both functions have compiled twins in ``_ckernels.pyx``; the two must agree
exactly (see tests/test_kernels.py).
"""


def minus_one_profiles(delta, n):
    """Non-increasing positive tuples ``mu`` of length <= n with

        sum(mu) == 3*delta - 1   and   sum(m*m for m in mu) == delta**2 + 1,

    i.e. the multiplicity profiles of (-1)-classes of degree ``delta`` on a
    blowup of the plane at ``n`` points.  Every entry is at most ``delta``.
    """
    if delta < 1 or n < 1:
        return []
    target_sum = 3 * delta - 1
    target_sq = delta * delta + 1
    out = []
    prefix = []

    def rec(s, q, cap, slots):
        if s == 0:
            if q == 0:
                out.append(tuple(prefix))
            return
        if slots == 0 or q <= 0:
            return
        # Cauchy-Schwarz and the trivial bound m*m <= cap*m
        if s * s > slots * q or q > cap * s:
            return
        top = min(cap, s)
        for m in range(top, 0, -1):
            if m * m > q:
                continue
            prefix.append(m)
            rec(s - m, q - m * m, m, slots - 1)
            prefix.pop()

    rec(target_sum, target_sq, delta, n)
    return out


def max_weight_ideal(parents, weights, k):
    """Maximum total weight of an order ideal of size ``min(k, n)`` in a forest.

    ``parents[i]`` is the index of the parent of node i or -1; parents precede
    children.  Returns ``(total, chosen)`` with ``chosen`` sorted.  Ties go to
    allocations that favour earlier children.
    """
    n = len(parents)
    k = max(0, min(k, n))
    root = n
    children = [[] for _ in range(n + 1)]
    for i, p in enumerate(parents):
        children[root if p < 0 else p].append(i)
    dp = [None] * (n + 1)
    hist = [None] * (n + 1)
    for v in list(range(n - 1, -1, -1)) + [root]:
        cur = [0]
        steps = []
        for c in children[v]:
            child = dp[c]
            size = min(len(cur) + len(child) - 1, k + 1)
            new = [None] * size
            arg = [0] * size
            for a, va in enumerate(cur):
                if va is None:
                    continue
                for b, vb in enumerate(child):
                    if vb is None or a + b >= size:
                        continue
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
            dp[v] = [0] + [None if x is None else x + weights[v] for x in cur[:k]]

    chosen = []

    def take(v, j):
        if v != root:
            if j == 0:
                return
            chosen.append(v)
            j -= 1
        for idx in range(len(children[v]) - 1, -1, -1):
            b = hist[v][idx][j]
            take(children[v][idx], b)
            j -= b

    take(root, k)
    return dp[root][k], sorted(chosen)
