"""Distance to the zero-temperature limit along r = 2^k for single modes of varying mu.

Prints one CSV row per (mu, r). Near mu = 0 convergence slows like exp(-4 mu r).
"""

import argparse
import sys

from ccrflow.flow import flow_trajectory
from ccrflow.matrixio import format_float
from ccrflow.sampling import form_from_modes


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--mus", default="0.3,0.1,0.01,0.003,0.0015")
    p.add_argument("--kmax", type=int, default=10)
    a = p.parse_args()
    grid = [2.0**k for k in range(a.kmax + 1)]
    out = sys.stdout
    out.write("mu,r,dist_to_limit,extremality_residual\n")
    for mu in (float(x) for x in a.mus.split(",")):
        for row in flow_trajectory(form_from_modes([mu]), grid).rows:
            out.write(f"{mu},{format_float(row.r)},{format_float(row.dist_to_limit)},{format_float(row.extremality_residual)}\n")


if __name__ == "__main__":
    main()
