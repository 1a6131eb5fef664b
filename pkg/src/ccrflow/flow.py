"""The scaling flow ``S -> S^(r) = f_r(S, conj S)`` and its zero-temperature limit."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import expit

from .errors import BoundarySpectrum, CenterNotFree, NonPositiveR
from .pwcalc import f_r, pw_apply_ratio
from .starlinalg import (
    TOL_SPEC,
    CovarianceForm,
    RatioOperator,
    make_form,
    ratio_operator,
)

TOL_LOEWNER = 1e-9


def _check_r(r: float) -> float:
    r = float(r)
    if not r > 0 or not np.isfinite(r):
        raise NonPositiveR(f"r must be a positive finite number, got {r}")
    return r


@dataclass(frozen=True, eq=False)
class FlowPoint:
    r: float
    form: CovarianceForm


def flow(form: CovarianceForm, r: float) -> FlowPoint:
    r = _check_r(r)
    ratio = ratio_operator(form)
    S_r = pw_apply_ratio(f_r(r), ratio)
    return FlowPoint(r, make_form(form.space, (S_r + S_r.conj().T) / 2))


def flow_operator(ratio: RatioOperator, r: float) -> np.ndarray:
    """Operator representing ``S^(r)`` in the quotient coordinates of ``S``."""
    return ratio.apply(f_r(_check_r(r)).section)


def semigroup_check(form: CovarianceForm, a: float, b: float) -> float:
    """Entrywise max of ``|(S^(a))^(b) - S^(ab)|``."""
    two_step = flow(flow(form, a).form, b).form.S
    one_step = flow(form, a * b).form.S
    return float(np.max(np.abs(two_step - one_step)))


def _positive_cut(s: np.ndarray) -> np.ndarray:
    return np.maximum(2.0 * s - 1.0, 0.0)


def freeze_limit(form: CovarianceForm) -> CovarianceForm:
    """``S^(inf)``: the form of the spectral positive part ``(2M - 1)_+``."""
    ratio = ratio_operator(form)
    X = ratio.to_form(ratio.apply(_positive_cut))
    return make_form(form.space, (X + X.conj().T) / 2)


@dataclass(frozen=True)
class TrajectoryRow:
    r: float
    eigenvalues: tuple[float, ...]
    dist_to_limit: float
    extremality_residual: float

    @property
    def lambda_min(self) -> float:
        return self.eigenvalues[0] if self.eigenvalues else 0.0

    @property
    def lambda_max(self) -> float:
        return self.eigenvalues[-1] if self.eigenvalues else 0.0


@dataclass(frozen=True, eq=False)
class Trajectory:
    points: tuple[FlowPoint, ...]
    rows: tuple[TrajectoryRow, ...]
    limit: CovarianceForm
    # loewner_steps[i]: min eigenvalue of op(r_i) - op(r_{i+1})
    loewner_steps: tuple[float, ...]

    @property
    def distances(self) -> np.ndarray:
        return np.array([row.dist_to_limit for row in self.rows])

    @property
    def loewner_decreasing(self) -> bool:
        return all(step > -TOL_LOEWNER for step in self.loewner_steps)

    @property
    def distance_decreasing(self) -> bool:
        """Non-increasing distances; ties are allowed once roundoff is reached."""
        d = self.distances
        if len(d) < 2:
            return True
        floor = 1e-15 * max(1.0, float(d[0]))
        return bool(np.all(np.diff(d) <= floor))


def extremality_residual(form: CovarianceForm) -> float:
    """``||M (1 - M)||`` for the ratio operator ``M`` of ``form``."""
    s = np.clip(ratio_operator(form).eigenvalues, 0.0, 1.0)
    return float(np.max(s * (1 - s))) if s.size else 0.0


def flow_trajectory(form: CovarianceForm, r_grid: Sequence[float]) -> Trajectory:
    grid = [_check_r(r) for r in r_grid]
    if not grid:
        raise ValueError("r_grid must be nonempty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("r_grid must be strictly ascending")
    ratio = ratio_operator(form)
    limit = freeze_limit(form)
    points, rows, ops = [], [], []
    for r in grid:
        point = flow(form, r)
        op = flow_operator(ratio, r)
        ops.append(op)
        eig = np.linalg.eigvalsh(op)
        rows.append(
            TrajectoryRow(
                r=r,
                eigenvalues=tuple(float(x) for x in eig),
                dist_to_limit=float(np.linalg.norm(point.form.S - limit.S)),
                extremality_residual=extremality_residual(point.form),
            )
        )
        points.append(point)
    steps = tuple(
        float(np.linalg.eigvalsh(a - b)[0]) if a.size else 0.0
        for a, b in zip(ops, ops[1:])
    )
    return Trajectory(tuple(points), tuple(rows), limit, steps)


@dataclass(frozen=True, eq=False)
class Generator:
    """``h = log((1 - M) / M)`` on the quotient space, with ``M = (1 + e^h)^-1``."""

    h: np.ndarray
    ratio: RatioOperator
    non_boundary: bool = True


def _require_non_boundary(ratio: RatioOperator, tol_spec: float = TOL_SPEC) -> None:
    s = ratio.eigenvalues
    if np.any(s <= tol_spec) or np.any(s >= 1 - tol_spec):
        raise BoundarySpectrum(
            "ratio operator has spectrum at 0 or 1; the generator would be infinite"
        )


def generator(form: CovarianceForm) -> Generator:
    ratio = ratio_operator(form)
    _require_non_boundary(ratio)
    h = ratio.apply(lambda s: np.log1p(-s) - np.log(s))
    return Generator((h + h.conj().T) / 2, ratio)


def align(op: np.ndarray, source: RatioOperator, target: RatioOperator) -> np.ndarray:
    """Express an operator given in ``source`` quotient coordinates in ``target``'s.

    Both forms must have the same kernel of the real part (true along a flow).
    """
    return target.transform.T @ source.coords @ op @ source.transform.T @ target.coords


def kms_rescaling_check(form: CovarianceForm, r: float) -> float:
    """Max deviation of the ratio/generator rescaling identities along the flow.

    Compares the ratio operator of ``S^(r)`` with ``M^r / (M^r + (1-M)^r)`` and
    the generator of ``S^(r)`` with ``r h``, both in the coordinates of ``S``.
    """
    r = _check_r(r)
    ratio = ratio_operator(form)
    _require_non_boundary(ratio)
    if np.any(np.abs(ratio.eigenvalues - 0.5) < TOL_SPEC):
        raise CenterNotFree("ratio operator has eigenvalue 1/2")
    T = flow(form, r).form
    ratio_T = ratio_operator(T)

    # independent route: scalar map on the spectrum of M
    def rescaled(s):
        return expit(-r * (np.log1p(-s) - np.log(s)))

    expected_M = ratio.apply(rescaled)
    got_M = align(ratio_T.M, ratio_T, ratio)
    dev_M = float(np.max(np.abs(got_M - expected_M)))

    h = generator(form).h
    h_T = generator(T).h
    dev_h = float(np.max(np.abs(align(h_T, ratio_T, ratio) - r * h)))
    return max(dev_M, dev_h)


def one_particle_group(form: CovarianceForm, t: float) -> np.ndarray:
    """``U_t = exp(i t h)`` on the quotient space; a real orthogonal matrix."""
    gen = generator(form)
    lam, V = np.linalg.eigh(gen.h)
    U = (V * np.exp(1j * t * lam)) @ V.conj().T
    return U


def quotient_sigma(ratio: RatioOperator) -> np.ndarray:
    """Matrix of ``sigma_S`` in quotient coordinates: ``-i (2M - 1)``."""
    return (-1j * (2 * ratio.M - np.eye(ratio.rank))).real
