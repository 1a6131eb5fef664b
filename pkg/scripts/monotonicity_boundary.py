"""Scan r for the f_r and g_r families with the operator-monotonicity probe.

A found counterexample is conclusive; "none" only means none turned up in the
given number of trials.
"""

import argparse

import numpy as np

from ccrflow.pwcalc import f_r, g_r, probe_operator_monotone


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--dim", type=int, default=2)
    a = p.parse_args()
    scans = {"f_r": (f_r, np.round(np.arange(0.5, 1.55, 0.1), 2)),
             "g_r": (g_r, np.round(np.arange(1.5, 2.55, 0.1), 2))}
    print(f"{'family':<6} {'r':>5}  {'result':<14} {'trial':>6}  worst eigenvalue")
    for name, (make, rs) in scans.items():
        for r in rs:
            res = probe_operator_monotone(make(float(r)).at_one, a.dim, a.trials, seed=a.seed)
            verdict = "counterexample" if res.found else "none"
            print(f"{name:<6} {r:>5.2f}  {verdict:<14} {res.trials_run:>6}  {res.worst_eigenvalue:.3e}")


if __name__ == "__main__":
    main()
