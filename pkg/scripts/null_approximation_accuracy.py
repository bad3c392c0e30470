"""Poisson and binomial tails against the exact simulated null on a grid.

For each (N, r, n) the expected count, the approximation flags and the
three tail estimates at a few observed sizes are printed, so the region
where the closed forms can be trusted is visible at a glance.
"""

import argparse

import numpy as np

from listintersect.montecarlo import SimConfig, simulate_null
from listintersect.null_model import expected_null_count_discovery, set_pvalue
from listintersect.params import EnsembleParams, TestParams


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--genes", type=int, default=10_000)
    ap.add_argument("--reps", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    print(f"{'N':>3}{'r':>6}{'n':>3}{'E':>10}{'ok':>4}{'x':>5}{'poisson':>10}{'binom':>10}{'sim':>10}{'SE':>9}")
    for N in (4, 6, 10):
        for r in (10, 100, 500, 2000):
            for n in (2, 3):
                e, t = EnsembleParams(N, args.genes), TestParams(r, n)
                s = expected_null_count_discovery(e, t)
                dist = simulate_null(SimConfig(e, t, replications=args.reps, seed=args.seed))
                lam = s.expected_count
                for x in sorted({1, max(1, round(lam)), int(np.ceil(lam + 2 * np.sqrt(lam))) + 1}):
                    pv = set_pvalue(s, x)
                    print(f"{N:>3}{r:>6}{n:>3}{lam:>10.4g}{'y' if s.flags.all_ok else 'n':>4}{x:>5}"
                          f"{pv.poisson_pvalue:>10.4g}{pv.binomial_pvalue:>10.4g}"
                          f"{dist.tail(x):>10.4g}{dist.tail_se(x):>9.2g}")


if __name__ == "__main__":
    main()
