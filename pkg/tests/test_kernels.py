import itertools

import pytest
from hypothesis import given, settings, strategies as st

from cremona import _kernels
from cremona._kernels import _pykernels

try:
    from cremona._kernels import _ckernels
except ImportError:  # pragma: no cover - pure-Python install
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def brute_profiles(delta, n):
    out = []
    for length in range(1, n + 1):
        for mu in itertools.combinations_with_replacement(range(delta, 0, -1), length):
            if sum(mu) == 3 * delta - 1 and sum(m * m for m in mu) == delta * delta + 1:
                out.append(tuple(mu))
    return sorted(out)


def brute_ideal(parents, weights, k):
    n = len(parents)
    k = min(k, n)
    best = None
    for subset in itertools.combinations(range(n), k):
        s = set(subset)
        if all(parents[i] < 0 or parents[i] in s for i in s):
            t = sum(weights[i] for i in s)
            best = t if best is None else max(best, t)
    return best


@pytest.mark.parametrize("delta,n", [(d, n) for d in range(1, 7) for n in (1, 3, 6, 9)])
def test_profiles_match_brute_force(delta, n):
    assert sorted(_pykernels.minus_one_profiles(delta, n)) == brute_profiles(delta, n)


def test_known_profiles():
    assert _pykernels.minus_one_profiles(1, 2) == [(1, 1)]
    assert _pykernels.minus_one_profiles(2, 5) == [(1, 1, 1, 1, 1)]
    assert _pykernels.minus_one_profiles(3, 7) == [(2, 1, 1, 1, 1, 1, 1)]
    assert _pykernels.minus_one_profiles(0, 5) == []


forests = st.integers(1, 9).flatmap(lambda n: st.tuples(
    st.lists(st.integers(-1, n), min_size=n, max_size=n),
    st.lists(st.integers(0, 7), min_size=n, max_size=n),
    st.integers(0, n + 1),
))


def _normalise(raw_parents):
    return [p if 0 <= p < i else -1 for i, p in enumerate(raw_parents)]


@settings(max_examples=300, deadline=None)
@given(forests)
def test_ideal_matches_brute_force(case):
    raw, weights, k = case
    parents = _normalise(raw)
    total, chosen = _pykernels.max_weight_ideal(parents, weights, k)
    assert total == brute_ideal(parents, weights, k)
    assert len(chosen) == min(k, len(parents))
    assert sum(weights[i] for i in chosen) == total
    assert all(parents[i] < 0 or parents[i] in chosen for i in chosen)


@needs_ext
@settings(max_examples=300, deadline=None)
@given(forests)
def test_compiled_ideal_agrees(case):
    raw, weights, k = case
    parents = _normalise(raw)
    assert _ckernels.max_weight_ideal(parents, weights, k) == _pykernels.max_weight_ideal(parents, weights, k)


@needs_ext
@pytest.mark.parametrize("delta", range(0, 9))
def test_compiled_profiles_agree(delta):
    for n in (1, 4, 8, 12):
        assert _ckernels.minus_one_profiles(delta, n) == _pykernels.minus_one_profiles(delta, n)


def test_backend_flag():
    assert _kernels.BACKEND in ("python", "cython")


def test_pure_python_switch():
    import subprocess
    import sys
    code = "import cremona._kernels as k; print(k.BACKEND)"
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                         env={**__import__("os").environ, "CREMONA_PURE_PYTHON": "1"})
    assert out.stdout.strip() == "python"
