"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Also times one end-to-end workload (is_minimal_degree over random curves)
under whichever backend ``cremona`` picked at import.
"""
import argparse
import random
import sys
import timeit
from pathlib import Path

from cremona._kernels import BACKEND, _pykernels

try:
    from cremona._kernels import _ckernels
except ImportError:
    _ckernels = None


def random_forest(rng, n):
    parents = [-1 if i == 0 or rng.random() < 0.3 else rng.randrange(i) for i in range(n)]
    weights = [rng.randint(1, 9) for _ in range(n)]
    return parents, weights


def kernel_cases():
    rng = random.Random(0)
    forests = [random_forest(rng, n) for n in (8, 16, 32, 64) for _ in range(5)]
    return {
        "max_weight_ideal (20 forests, n<=64)":
            lambda mod: [mod.max_weight_ideal(p, w, len(p) // 2) for p, w in forests],
        "minus_one_profiles (delta<=6, n<=12)":
            lambda mod: [mod.minus_one_profiles(d, n) for d in range(1, 7) for n in range(2, 13)],
    }


def workload():
    sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
    from randpairs import random_plane_pair, seeded
    from cremona.minimality import is_minimal_degree
    rng = seeded(11)
    pairs = [random_plane_pair(rng) for _ in range(200)]
    return lambda: [is_minimal_degree(p, branch_bound=16) for p in pairs]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"selected backend: {BACKEND}")
    if _ckernels is None:
        print("compiled extension not built; timing the fallback only")
    print(f"{'kernel':40s} {'python ms':>10s} {'cython ms':>10s} {'speedup':>8s}")
    for name, fn in kernel_cases().items():
        py = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat)) * 1e3
        if _ckernels is None:
            print(f"{name:40s} {py:10.2f} {'-':>10s} {'-':>8s}")
            continue
        cy = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:40s} {py:10.2f} {cy:10.2f} {py / cy:7.1f}x")
    run = workload()
    t = min(timeit.repeat(run, number=1, repeat=max(1, args.repeat // 2))) * 1e3
    print(f"end-to-end is_minimal_degree x200 ({BACKEND}): {t:.1f} ms")


if __name__ == "__main__":
    main()
