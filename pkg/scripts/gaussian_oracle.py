"""Compare the closed-form twisted product of mode Gaussians with brute-force quadrature."""

import argparse

import numpy as np

from ccrflow import gaussian as gs
from ccrflow.sampling import rng_for

DESIGNS = [(0.3, 0.6, 0.6), (0.5, 1.0, 1.0), (0.3, 0.6, 15 / 17), (0.3, 0.05, 0.95), (0.2, 0.3, 0.7)]


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--nodes", type=int, default=512)
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args()
    print(f"{'mu':>4} {'a':>6} {'b':>6} {'a*b':>8} {'weight':>10}  max rel err  quad err est")
    for j, (mu, x, y) in enumerate(DESIGNS):
        ctx = gs.mode_context(mu, mu)
        f, g = gs.mode_element(mu, x), gs.mode_element(mu, y)
        closed = gs.twisted_convolve_gaussian(f, g, ctx)
        pts = rng_for(a.seed, j).normal(size=(a.points, 2)) / np.sqrt(closed.Q[0, 0])
        num = gs.twisted_convolve_numeric(f, g, ctx, pts, nodes=a.nodes, tol=None)
        err = np.max(np.abs(num.values - closed(pts)) / closed(pts))
        print(f"{mu:>4} {x:>6.3f} {y:>6.3f} {gs.star(x, y):>8.5f} {closed.w:>10.5f}  {err:.2e}     {num.error_estimate:.1e}")


if __name__ == "__main__":
    main()
