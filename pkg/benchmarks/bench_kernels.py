"""Time the compiled and NumPy kernels on tournament-sized inputs.

    python benchmarks/bench_kernels.py [--n 1000] [--pool 41] [--repeat 5]

Prints the best-of-``repeat`` time for every kernel under each available
backend, the speedup, and a whole-tournament timing with each backend
swapped in. Results are checked for bit equality along the way.
"""

import argparse
import timeit
from contextlib import contextmanager

import numpy as np

from mom_tournament import kernels, tournament
from mom_tournament.core import CandidatePool, RngSpec, TournamentConfig
from mom_tournament.datagen import ProblemSpec, generate
from mom_tournament.theory import rate_full_space

KERNELS = ("column_med_of_means", "phi_matrix", "match_tallies", "home_tallies")


def workloads(n, K, rng):
    pred = rng.standard_normal((n, K))
    y = rng.standard_t(5, n)
    m = max(1, n // 50)
    return {
        "column_med_of_means": (pred, 8),
        "phi_matrix": (pred, 8),
        "match_tallies": (pred, y, m, n // m),
        "home_tallies": (pred, y, m, n // m, -0.01),
    }


@contextmanager
def using(backend):
    """Route the package-level kernel names to ``backend`` temporarily."""
    saved = {name: getattr(kernels, name) for name in KERNELS + ("med_of_means", "block_means")}
    try:
        for name in saved:
            setattr(kernels, name, getattr(backend, name))
        yield
    finally:
        for name, fn in saved.items():
            setattr(kernels, name, fn)


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1000, help="rows per sample part")
    ap.add_argument("--pool", type=int, default=41, help="candidates")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    impls = kernels.backends()
    rng = np.random.default_rng(0)
    work = workloads(args.n, args.pool, rng)
    print(f"n={args.n} K={args.pool} backends={sorted(impls)} (default: {kernels.BACKEND})")
    print(f"{'kernel':<22}" + "".join(f"{b:>12}" for b in sorted(impls)) + f"{'speedup':>10}")
    for name, wargs in work.items():
        times, outs = {}, {}
        for b in sorted(impls):
            fn = getattr(impls[b], name)
            outs[b] = fn(*wargs)
            times[b] = best(lambda: fn(*wargs), args.repeat)
        ref = outs["python"]
        assert all(np.array_equal(ref, o) for o in outs.values()), f"{name}: backends disagree"
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{name:<22}" + "".join(f"{times[b] * 1e3:>10.2f}ms" for b in sorted(impls)) + f"{speed:>9.1f}x")

    t0 = np.zeros(5)
    t0[0] = 1.0
    ds = generate(ProblemSpec(5, args.n, t0, noise="student_t", noise_param=5.0), RngSpec(0, 0))
    r = rate_full_space(5, args.n, 1.0).r_star
    pool = CandidatePool.from_vectors(t0 + r * rng.standard_normal((args.pool, 5)))
    cfg = TournamentConfig(r, 1.0)
    totals = {}
    for b in sorted(impls):
        with using(impls[b]):
            totals[b] = best(lambda: tournament.run_tournament(ds, pool, cfg), args.repeat)
    line = "  ".join(f"{b} {t * 1e3:.2f}ms" for b, t in sorted(totals.items()))
    print(f"{'run_tournament':<22}{line}")


if __name__ == "__main__":
    main()
