"""Property suites for every module, driven by one seed.

Each check draws its instances from ``rng_for(seed, check_index, k)`` so a
check's result does not depend on which other checks run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import fermion, gaussian
from .flow import (
    flow,
    flow_trajectory,
    freeze_limit,
    kms_rescaling_check,
    one_particle_group,
    quotient_sigma,
    semigroup_check,
)
from .pwcalc import (
    arith,
    check_representation_independence,
    f_r,
    form_concavity_probe,
    g_r,
    geo,
    left,
    probe_operator_monotone,
    pw_apply,
    right,
)
from .sampling import (
    random_extremal_form,
    random_form,
    random_symplectic,
    rng_for,
)
from .starlinalg import (
    classify,
    direct_sum,
    normal_form,
    pullback,
    ratio_operator,
)


@dataclass(frozen=True)
class CheckResult:
    module: str
    name: str
    deviation: float
    tolerance: float
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.module:<13} {self.name:<34} {status}  {self.deviation:.3e}  (tol {self.tolerance:.1e})"


Check = Callable[[int, int], float]


def _normal_form_roundtrip(seed, idx):
    worst = 0.0
    for k in range(20):
        rng = rng_for(seed, idx, k)
        n = int(rng.integers(1, 13))
        n_center = n % 2 + 2 * int(rng.integers(0, 2)) if n > 2 else n % 2
        form = random_form(rng, n, n_center=n_center)
        nf = normal_form(form)
        B = nf.B
        worst = max(
            worst,
            np.max(np.abs(B.T @ form.real_part @ B - np.eye(n))),
            np.max(np.abs(B.T @ form.sigma @ B - nf.canonical_sigma())),
        )
    return worst


def _conj_ratio(seed, idx):
    worst = 0.0
    for k in range(20):
        rng = rng_for(seed, idx, k)
        form = random_form(rng, 6, kernel_dim=int(rng.integers(0, 3)) * 2)
        M = ratio_operator(form).M
        worst = max(worst, np.max(np.abs(M.conj() - (np.eye(len(M)) - M))))
    return worst


def _quotient(seed, idx):
    worst = 0.0
    for k in range(20):
        rng = rng_for(seed, idx, k)
        form = random_form(rng, 7, n_center=1, kernel_dim=2)
        ratio = ratio_operator(form)
        worst = max(worst, np.max(np.abs(ratio.to_form(ratio.M) - form.S)))
    return worst


def _classify_extremal(seed, idx):
    mismatches = 0
    for k in range(100):
        rng = rng_for(seed, idx, k)
        form = random_extremal_form(rng, 4) if k % 2 else random_form(rng, 4, mu_range=(0.01, 0.49))
        s = ratio_operator(form).eigenvalues
        residual = np.max(np.abs(s * (1 - s)))
        mismatches += classify(form).is_extremal != (residual < 1e-8)
    return float(mismatches)


_LIBRARY = [f_r(0.5), f_r(2.0), g_r(1.5), geo(), arith(), left()]


def _linearity(seed, idx):
    worst = 0.0
    for k in range(20):
        rng = rng_for(seed, idx, k)
        form = random_form(rng, 4)
        f, g = _LIBRARY[k % 6], _LIBRARY[(k + 1) % 6]
        worst = max(worst, np.max(np.abs(pw_apply(f + g, form) - pw_apply(f, form) - pw_apply(g, form))))
    return worst


def _representation(seed, idx):
    worst = 0.0
    for k in range(20):
        rng = rng_for(seed, idx, k)
        form = random_form(rng, 4)
        for j, f in enumerate(_LIBRARY):
            worst = max(worst, check_representation_independence(f, form, trials=2, seed=seed * 1000 + k * 10 + j).max_deviation)
    return worst


def _conjugation(seed, idx):
    worst = 0.0
    for k in range(20):
        form = random_form(rng_for(seed, idx, k), 4)
        f = _LIBRARY[k % 6]
        worst = max(worst, np.max(np.abs(pw_apply(f.swapped(), form) - pw_apply(f, form).conj())))
    return worst


def _monotone_falsified(fn):
    def check(seed, idx):
        return 0.0 if probe_operator_monotone(fn, 2, 10_000, seed=seed).found else 1.0
    return check


def _monotone_supported(fn, trials=2000):
    def check(seed, idx):
        return 0.0 if not probe_operator_monotone(fn, 2, trials, seed=seed).found else 1.0
    return check


def _concavity(f, expect_violation, trials):
    def check(seed, idx):
        found = form_concavity_probe(f, trials, seed=seed).found
        return 0.0 if found == expect_violation else 1.0
    return check


def _semigroup(seed, idx):
    worst = 0.0
    for k in range(100):
        rng = rng_for(seed, idx, k)
        form = random_form(rng, 6, mu_range=(0.0, 0.49))
        a, b = rng.uniform(0.2, 5.0, size=2)
        worst = max(worst, semigroup_check(form, a, b))
    return worst


def _imaginary_part(seed, idx):
    worst = 0.0
    for k in range(20):
        form = random_form(rng_for(seed, idx, k), 6, n_center=2)
        for r in (0.1, 0.5, 1.0, 2.0, 10.0):
            worst = max(worst, np.max(np.abs(flow(form, r).form.sigma - form.sigma)))
    return worst


def _fixed_points(seed, idx):
    worst = 0.0
    for k in range(20):
        rng = rng_for(seed, idx, k)
        ext = random_extremal_form(rng, 4)
        gen = random_form(rng, 4, mu_range=(0.05, 0.45))
        for r in (0.5, 2.0, 7.0):
            worst = max(worst, np.max(np.abs(flow(ext, r).form.S - ext.S)))
            moved = np.max(np.abs(flow(gen, r).form.S - gen.S))
            if moved < 1e-4:
                worst = max(worst, 1.0)
    return worst


def _freeze(seed, idx):
    worst = 0.0
    grid = [2.0 ** j for j in range(11)]
    for k in range(20):
        form = random_form(rng_for(seed, idx, k), 4, mu_range=(0.0, 0.5), avoid_half=0.01)
        tr = flow_trajectory(form, grid)
        if not (tr.distance_decreasing and tr.loewner_decreasing):
            return 1.0
        worst = max(worst, tr.rows[-1].dist_to_limit)
    return worst


def _kms(seed, idx):
    worst = 0.0
    for k in range(100):
        form = random_form(rng_for(seed, idx, k), 4, mu_range=(0.01, 0.45))
        for r in (0.3, 2.0, 5.0):
            worst = max(worst, kms_rescaling_check(form, r))
    return worst


def _sigma_invariance(seed, idx):
    worst = 0.0
    for k in range(20):
        rng = rng_for(seed, idx, k)
        form = random_form(rng, 4, mu_range=(0.01, 0.45))
        U = one_particle_group(form, rng.uniform(-5, 5))
        A = quotient_sigma(ratio_operator(form))
        worst = max(worst, np.max(np.abs(U.conj().T @ A @ U - A)), np.max(np.abs(U.imag)))
    return worst


def _direct_sum(seed, idx):
    worst = 0.0
    for k in range(20):
        rng = rng_for(seed, idx, k)
        a, b = random_form(rng, 2), random_form(rng, 3, n_center=1)
        r = rng.uniform(0.2, 5)
        lhs = flow(direct_sum([a, b]), r).form.S
        rhs = direct_sum([flow(a, r).form, flow(b, r).form]).S
        worst = max(worst, np.max(np.abs(lhs - rhs)))
    return worst


def _aut_equivariance(seed, idx):
    worst = 0.0
    for k in range(20):
        rng = rng_for(seed, idx, k)
        form = random_form(rng, 4, mu_range=(0.05, 0.45))
        G = random_symplectic(form.sigma, rng, scale=0.3)
        r = rng.uniform(0.2, 5)
        lhs = flow(pullback(form, G), r).form.S
        rhs = pullback(flow(form, r).form, G).S
        worst = max(worst, np.max(np.abs(lhs - rhs)) / max(1.0, np.max(np.abs(rhs))))
    return worst


def _trace_routes(seed, idx):
    worst = 0.0
    for k, n in enumerate((2, 4, 6, 8)):
        form = random_form(rng_for(seed, idx, k), n, mu_range=(0.01, 0.5))
        for r in (0.5, 2.0, 3.7):
            for measure in gaussian.MEASURES:
                a = gaussian.trace_per_mode(form, r, measure)
                b = gaussian.trace_determinant(form, r, measure)
                worst = max(worst, abs(a - b) / a)
    return worst


def _power_semigroup(seed, idx):
    worst = 0.0
    for k in range(50):
        rng = rng_for(seed, idx, k)
        mu = rng.uniform(0.01, 0.5)
        r, r2 = rng.uniform(0.1, 5, size=2)
        form = random_form(rng, 2, mu_range=(mu, mu))
        worst = max(worst, gaussian.power_semigroup_check(form, r, r2))
    return worst


def _extremal_mode(seed, idx):
    form = random_extremal_form(rng_for(seed, idx, 0), 2)
    return max(
        abs(gaussian.density_power(form, r).w - (2 * np.pi) ** (r - 1)) / (2 * np.pi) ** (r - 1)
        for r in (0.5, 1.0, 2.0, 5.0)
    )


def _quadrature(seed, idx):
    rng = rng_for(seed, idx, 0)
    mu = 0.3
    ctx = gaussian.mode_context(mu, mu)
    a, b = 0.6, 15 / 17
    f, g = gaussian.mode_element(mu, a), gaussian.mode_element(mu, b)
    closed = gaussian.twisted_convolve_gaussian(f, g, ctx)
    pts = rng.normal(size=(5, 2))
    num = gaussian.twisted_convolve_numeric(f, g, ctx, pts, nodes=256, tol=None)
    return float(np.max(np.abs(num.values - closed(pts)) / closed(pts)))


def _fermion_semigroup(seed, idx):
    worst = 0.0
    for k in range(50):
        rng = rng_for(seed, idx, k)
        form = random_form(rng, 4, mu_range=(0.01, 0.49))
        cov = fermion.make_covariance(ratio_operator(form).M)
        a, b = rng.uniform(0.2, 5, size=2)
        two = fermion.fermion_flow(fermion.fermion_flow(cov, a), b).C
        one = fermion.fermion_flow(cov, a * b).C
        worst = max(worst, np.max(np.abs(two - one)))
    return worst


def _fermion_tables(seed, idx):
    grid = np.round(np.linspace(0, 1, 11), 12)
    expected_high = np.array([0.0] + [0.5] * 9 + [1.0])
    expected_low = np.array([0.0] * 5 + [0.5] + [1.0] * 5)
    dev = np.max(np.abs(fermion.high_temp_map(grid) - expected_high))
    dev = max(dev, np.max(np.abs(fermion.low_temp_map(grid) - expected_low)))
    cov = fermion.standard_covariance(grid[grid > 0.5])
    lim = fermion.fermion_limits(cov).low_temp
    return max(dev, np.max(np.abs(fermion.fermion_flow(cov, 1024).C - lim)))


CHECKS: list[tuple[str, str, Check, float]] = [
    ("star-linalg", "normal_form_roundtrip", _normal_form_roundtrip, 1e-10),
    ("star-linalg", "conj_M_equals_1_minus_M", _conj_ratio, 1e-10),
    ("star-linalg", "quotient_reproduces_S", _quotient, 1e-10),
    ("star-linalg", "classify_extremal_mismatches", _classify_extremal, 0.5),
    ("pw-calculus", "linearity", _linearity, 1e-10),
    ("pw-calculus", "representation_independence", _representation, 1e-8),
    ("pw-calculus", "conjugation_equivariance", _conjugation, 1e-10),
    ("pw-calculus", "f_3_not_monotone", _monotone_falsified(f_r(3.0).at_one), 0.5),
    ("pw-calculus", "g_3_not_monotone", _monotone_falsified(g_r(3.0).at_one), 0.5),
    ("pw-calculus", "f_0.9_no_counterexample", _monotone_supported(f_r(0.9).at_one), 0.5),
    ("pw-calculus", "g_1.9_no_counterexample", _monotone_supported(g_r(1.9).at_one), 0.5),
    ("pw-calculus", "f_2_not_form_concave", _concavity(f_r(2.0), True, 10_000), 0.5),
    ("pw-calculus", "f_0.5_form_concave", _concavity(f_r(0.5), False, 200), 0.5),
    ("scaling-flow", "semigroup", _semigroup, 1e-8),
    ("scaling-flow", "imaginary_part_conserved", _imaginary_part, 1e-9),
    ("scaling-flow", "extremal_fixed_points", _fixed_points, 1e-10),
    ("scaling-flow", "freeze_convergence", _freeze, 1e-6),
    ("scaling-flow", "kms_rescaling", _kms, 1e-8),
    ("scaling-flow", "sigma_invariance_of_U_t", _sigma_invariance, 1e-10),
    ("scaling-flow", "direct_sums", _direct_sum, 1e-10),
    ("scaling-flow", "aut_equivariance", _aut_equivariance, 1e-8),
    ("ccr-gaussian", "trace_two_routes", _trace_routes, 1e-9),
    ("ccr-gaussian", "power_semigroup", _power_semigroup, 1e-10),
    ("ccr-gaussian", "extremal_mode_power", _extremal_mode, 1e-12),
    ("ccr-gaussian", "quadrature_oracle", _quadrature, 1e-6),
    ("fermion-flow", "semigroup", _fermion_semigroup, 1e-10),
    ("fermion-flow", "limit_tables", _fermion_tables, 1e-6),
]


def run_verify(
    seed: int = 42, only: str | None = None, tolerances: dict[str, float] | None = None
) -> list[CheckResult]:
    """Run every check (or those of module ``only``); ``tolerances`` overrides by check name."""
    tolerances = tolerances or {}
    unknown = set(tolerances) - {name for _, name, _, _ in CHECKS}
    if unknown:
        raise ValueError(f"unknown check names in tolerance overrides: {sorted(unknown)}")
    results = []
    for idx, (module, name, check, tol) in enumerate(CHECKS):
        if only and only != module:
            continue
        tol = tolerances.get(name, tol)
        try:
            dev = float(check(seed, idx))
        except Exception as exc:  # a crash is a failed check, not a crashed suite
            results.append(CheckResult(module, f"{name} [{type(exc).__name__}]", float("inf"), tol, False))
            continue
        results.append(CheckResult(module, name, dev, tol, bool(dev < tol)))
    return results


def report(results: list[CheckResult], seed: int) -> str:
    lines = [f"verify seed={seed}", f"{'module':<13} {'check':<34} status  max deviation"]
    lines += [r.line() for r in results]
    n_pass = sum(r.passed for r in results)
    lines.append(f"{n_pass}/{len(results)} checks passed")
    return "\n".join(lines) + "\n"
