"""Gaussian sector of the twisted convolution algebra and powers of free densities.

Elements are ``x -> w exp(-Q(x, x) / 2)`` on ``V = R^n``; the product is

    (f g)(x) = int f(y) g(x - y) exp(i sigma(x, y) / 2) m dy

with ``m`` the density of the chosen Lebesgue measure against coordinate
``dy``. The trace is evaluation at the origin, so ``trace(f) = w``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    BlockMismatch,
    DegenerateRealPart,
    DimensionMismatch,
    GridTooCoarse,
    MeasureMismatch,
    ValidationError,
)
from .flow import flow
from .starlinalg import (
    TOL_DEGENERATE_REL,
    CovarianceForm,
    normal_form,
    ratio_operator,
)

LIOUVILLE = "liouville"
EUCLIDEAN = "euclidean"
EXPLICIT = "explicit"
MEASURES = (LIOUVILLE, EUCLIDEAN)

# 2 mu this close to 1 is treated as an extremal (Fock) mode
EXTREMAL_GAP = 1e-12


@dataclass(frozen=True, eq=False)
class TwistedAlgebraContext:
    sigma: np.ndarray
    density: float
    measure: str = EXPLICIT

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=float)
        if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
            raise DimensionMismatch("sigma must be square")
        if np.max(np.abs(sigma + sigma.T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(sigma), initial=0.0)):
            raise ValidationError("sigma must be antisymmetric")
        if not self.density > 0:
            raise ValidationError("measure density must be positive")
        object.__setattr__(self, "sigma", (sigma - sigma.T) / 2)

    @property
    def n(self) -> int:
        return self.sigma.shape[0]


def liouville_context(form: CovarianceForm) -> TwistedAlgebraContext:
    """Liouville measure: ``2 mu_j dx dy`` per symplectic mode, i.e. ``|Pf(sigma)|``."""
    sigma = form.sigma
    sign, logdet = np.linalg.slogdet(sigma)
    nf = normal_form(form)
    if nf.degenerate_dim > 0 or sign == 0:
        raise MeasureMismatch("Liouville measure needs a nondegenerate sigma")
    return TwistedAlgebraContext(sigma, float(np.exp(logdet / 2)), LIOUVILLE)


def euclidean_context(form: CovarianceForm) -> TwistedAlgebraContext:
    """Lebesgue measure of the inner product ``S + conj(S)``."""
    R = form.real_part
    d = np.linalg.eigvalsh(R)
    if d[0] <= TOL_DEGENERATE_REL * d[-1]:
        raise DegenerateRealPart("Euclidean measure needs S + conj(S) nondegenerate")
    return TwistedAlgebraContext(form.sigma, float(np.exp(np.sum(np.log(d)) / 2)), EUCLIDEAN)


def context_for(form: CovarianceForm, measure: str) -> TwistedAlgebraContext:
    if measure == LIOUVILLE:
        return liouville_context(form)
    if measure == EUCLIDEAN:
        return euclidean_context(form)
    raise MeasureMismatch(f"unknown measure {measure!r}; use one of {MEASURES}")


@dataclass(frozen=True, eq=False)
class GaussianElement:
    Q: np.ndarray
    w: float
    measure: str = EXPLICIT

    def __post_init__(self):
        Q = np.asarray(self.Q, dtype=float)
        Q = (Q + Q.T) / 2
        if np.linalg.eigvalsh(Q)[0] <= 0:
            raise ValidationError("Q must be positive definite")
        if not self.w > 0:
            raise ValidationError("weight must be positive")
        object.__setattr__(self, "Q", Q)

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        """Evaluate at points ``x`` of shape ``(..., n)``."""
        x = np.asarray(x, dtype=float)
        return self.w * np.exp(-0.5 * np.einsum("...i,ij,...j->...", x, self.Q, x))


def trace(f: GaussianElement) -> float:
    return float(f.w)


def twisted_convolve_gaussian(
    f: GaussianElement, g: GaussianElement, ctx: TwistedAlgebraContext
) -> GaussianElement:
    """Closed-form product of two centered Gaussians.

    Completing the square in ``y`` gives ``Q = Q2 - (Q2 + i s/2) K^-1 (Q2 - i s/2)``
    with ``K = Q1 + Q2`` and weight ``w1 w2 m (2 pi)^(n/2) det(K)^(-1/2)``. The
    result is a real Gaussian only when the imaginary part of ``Q`` vanishes,
    which holds for elements built from one covariance form.
    """
    if f.n != ctx.n or g.n != ctx.n:
        raise DimensionMismatch("elements and context have different dimensions")
    if f.measure != g.measure or (f.measure != EXPLICIT and f.measure != ctx.measure):
        raise MeasureMismatch(f"cannot multiply {f.measure!r} and {g.measure!r} elements in a {ctx.measure!r} context")
    Q1, Q2, s = f.Q, g.Q, ctx.sigma
    K = Q1 + Q2
    left = Q2 + 0.5j * s
    right = Q2 - 0.5j * s
    Q = Q2 - left @ np.linalg.solve(K, right)
    Q = (Q + Q.T) / 2
    scale = max(1.0, float(np.max(np.abs(Q.real))))
    if np.max(np.abs(Q.imag)) > 1e-9 * scale:
        raise BlockMismatch("product is not a real Gaussian: quadratic forms do not share a block structure")
    sign, logdet = np.linalg.slogdet(K)
    n = ctx.n
    w = f.w * g.w * ctx.density * np.exp(0.5 * n * np.log(2 * np.pi) - 0.5 * logdet)
    return GaussianElement(Q.real, float(w), f.measure)


# -- single-mode parametrization ----------------------------------------------


def star(a, b):
    """Parameter law ``a * b = (a + b) / (1 + a b)`` of isotropic mode Gaussians."""
    return (a + b) / (1 + a * b)


def mode_product_weight(a, b, mu, m):
    """Weight picked up by ``exp(-mu|x|^2/2a) exp(-mu|x|^2/2b)`` under measure ``2 m dx dy``."""
    return 4 * np.pi * m * a * b / (mu * (a + b))


def mode_context(mu: float, m: float) -> TwistedAlgebraContext:
    """One mode in coordinates ``x p + y q`` with ``sigma(q, p) = 2 mu``."""
    sigma = np.array([[0.0, -2 * mu], [2 * mu, 0.0]])
    return TwistedAlgebraContext(sigma, 2 * m, EXPLICIT)


def mode_element(mu: float, a: float, w: float = 1.0) -> GaussianElement:
    """``w exp(-mu (x^2 + y^2) / 2a)``."""
    return GaussianElement((mu / a) * np.eye(2), w, EXPLICIT)


# -- powers of free density operators ----------------------------------------


def _log_sinh(theta):
    theta = np.asarray(theta, dtype=float)
    return theta + np.log1p(-np.exp(-2 * theta)) - np.log(2.0)


def _mode_log_weight(mu: float, r: float, measure: str) -> float:
    if 2 * mu >= 1 - EXTREMAL_GAP:
        return (r - 1) * np.log(2 * np.pi)
    theta = np.arctanh(2 * mu)
    sinh_part = r * _log_sinh(theta) - _log_sinh(r * theta)
    if measure == LIOUVILLE:
        return float((r - 1) * np.log(4 * np.pi) + sinh_part)
    return float((r - 1) * np.log(2 * np.pi / mu) + sinh_part)


def _center_log_weight(r: float, s: float = 0.5) -> float:
    """One direction with ``sigma = 0`` and ``S(h, h) = s``, via Fourier transform."""
    return 0.5 * (r - 1) * np.log(2 * np.pi) - 0.5 * np.log(r) + 0.5 * (1 - r) * np.log(s)


@dataclass(frozen=True, eq=False)
class DensityPower:
    element: GaussianElement
    r: float
    measure: str
    mus: tuple[float, ...]
    thetas: tuple[float, ...]
    degenerate_dim: int

    @property
    def w(self) -> float:
        return self.element.w

    def record(self) -> dict:
        return {
            "r": self.r,
            "measure": self.measure,
            "w": self.w,
            "Q_eigenvalues": [float(x) for x in np.linalg.eigvalsh(self.element.Q)],
            "degenerate_dim": self.degenerate_dim,
            "modes": [{"mu": m, "theta": t} for m, t in zip(self.mus, self.thetas)],
        }


def trace_per_mode(form: CovarianceForm, r: float, measure: str = LIOUVILLE) -> float:
    """``tau(rho_S^r)`` as a product over the symplectic normal form."""
    return float(np.exp(_per_mode_log(form, r, measure)[0]))


def _per_mode_log(form: CovarianceForm, r: float, measure: str):
    if measure not in MEASURES:
        raise MeasureMismatch(f"unknown measure {measure!r}")
    nf = normal_form(form)
    if measure == LIOUVILLE and nf.degenerate_dim > 0:
        raise MeasureMismatch("Liouville measure needs a nondegenerate sigma")
    logw = sum(_mode_log_weight(float(mu), r, measure) for mu in nf.mus)
    logw += nf.degenerate_dim * _center_log_weight(r)
    return logw, nf


def _degree0_liouville(s: np.ndarray, r: float) -> np.ndarray:
    """``|s - t|^r / |s^r - t^r|`` on ``s + t = 1``; infinite/zero at the center."""
    big = np.maximum(s, 1 - s)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.log1p(-big) - np.log(big)
        out = np.exp(r * np.log(-np.expm1(u)) - np.log(-np.expm1(r * u)))
    center = u == 0
    out[center] = np.inf if r < 1 else (1.0 if r == 1 else 0.0)
    return out


def _degree0_euclidean(s: np.ndarray, r: float) -> np.ndarray:
    """``(s + t)^(r-1) |s - t| / |s^r - t^r|`` on ``s + t = 1``; ``2^(r-1)/r`` at the center."""
    big = np.maximum(s, 1 - s)
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.log1p(-big) - np.log(big)
        out = big ** (1 - r) * np.expm1(u) / np.expm1(r * u)
    center = u == 0
    out[center] = 2.0 ** (r - 1) / r
    out[np.isneginf(u)] = 1.0
    return out


def trace_determinant(form: CovarianceForm, r: float, measure: str = LIOUVILLE) -> float:
    """``tau(rho_S^r)`` from the global determinant formula.

    The degree-zero calculus ``|S - conj S|^r / |S^r - conj S^r|`` (Liouville) or
    ``(S + conj S)^(r-1) |S - conj S| / |S^r - conj S^r|`` (Euclidean) is an
    operator on the quotient space; its determinant is taken directly.
    """
    ratio = ratio_operator(form)
    n = form.n
    if ratio.rank < n:
        raise DegenerateRealPart("S + conj(S) must be nondegenerate")
    s = np.clip(ratio.eigenvalues, 0.0, 1.0)
    if measure == LIOUVILLE:
        if np.any(np.abs(s - 0.5) < 1e-8):
            raise MeasureMismatch("Liouville measure needs a nondegenerate sigma")
        vals = _degree0_liouville(s, r)
    elif measure == EUCLIDEAN:
        vals = _degree0_euclidean(s, r)
    else:
        raise MeasureMismatch(f"unknown measure {measure!r}")
    op = (ratio.eigenvectors * vals) @ ratio.eigenvectors.conj().T
    sign, logdet = np.linalg.slogdet(op)
    return float(np.exp(0.5 * (r - 1) * n * np.log(2 * np.pi) + 0.5 * logdet.real))


def density_power(form: CovarianceForm, r: float, measure: str = LIOUVILLE) -> DensityPower:
    """``rho_S^r = w(r) rho_{S^(r)}`` with ``w(r)`` from the normal form."""
    r = float(r)
    logw, nf = _per_mode_log(form, r, measure)
    context_for(form, measure)
    Q = flow(form, r).form.quadratic()
    thetas = tuple(float(np.inf) if 2 * mu >= 1 - EXTREMAL_GAP else float(np.arctanh(2 * mu)) for mu in nf.mus)
    element = GaussianElement(Q, float(np.exp(logw)), measure)
    return DensityPower(element, r, measure, tuple(float(m) for m in nf.mus), thetas, nf.degenerate_dim)


def power_semigroup_check(form: CovarianceForm, r: float, r2: float, measure: str = LIOUVILLE) -> float:
    """Relative deviation of ``rho^r rho^r2`` (closed form) from ``rho^(r + r2)``."""
    ctx = context_for(form, measure)
    prod = twisted_convolve_gaussian(
        density_power(form, r, measure).element, density_power(form, r2, measure).element, ctx
    )
    target = density_power(form, r + r2, measure).element
    dQ = float(np.max(np.abs(prod.Q - target.Q)) / np.max(np.abs(target.Q)))
    dw = abs(prod.w - target.w) / target.w
    return max(dQ, dw)


# -- quadrature oracle ---------------------------------------------------------


@dataclass(frozen=True)
class NumericConvolution:
    points: np.ndarray
    values: np.ndarray
    error_estimate: float


def _quadrature(f, g, ctx, x, nodes, half_width, center):
    t = np.linspace(-half_width, half_width, nodes)
    h = t[1] - t[0]
    wts = np.full(nodes, h)
    wts[0] = wts[-1] = h / 2
    Y1, Y2 = np.meshgrid(center[0] + t, center[1] + t, indexing="ij")
    y = np.stack([Y1, Y2], axis=-1)
    phase = 0.5 * np.einsum("i,ij,...j->...", x, ctx.sigma, y)
    integrand = f(y) * g(x - y) * np.exp(1j * phase)
    return ctx.density * np.einsum("i,ij,j->", wts, integrand, wts)


def twisted_convolve_numeric(
    f: GaussianElement,
    g: GaussianElement,
    ctx: TwistedAlgebraContext,
    points: Sequence[Sequence[float]],
    nodes: int = 512,
    n_sd: float = 8.0,
    tol: Optional[float] = 1e-6,
) -> NumericConvolution:
    """Brute-force ``(f g)(x)`` by tensor trapezoid quadrature, ``n = 2`` only.

    The error estimate is the largest relative change between ``nodes`` and
    ``nodes // 2``; :class:`GridTooCoarse` is raised when it exceeds ``tol``.
    """
    if ctx.n != 2 or f.n != 2 or g.n != 2:
        raise DimensionMismatch("numeric convolution is implemented for n = 2")
    if nodes < 256:
        raise GridTooCoarse("need at least 256 nodes per axis")
    K = f.Q + g.Q
    sd = 1.0 / np.sqrt(np.linalg.eigvalsh(K)[0])
    half_width = n_sd * sd
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    fine, coarse = [], []
    for x in pts:
        center = np.linalg.solve(K, g.Q @ x)
        fine.append(_quadrature(f, g, ctx, x, nodes, half_width, center))
        coarse.append(_quadrature(f, g, ctx, x, nodes // 2, half_width, center))
    fine_arr, coarse_arr = np.array(fine), np.array(coarse)
    scale = np.maximum(np.abs(fine_arr), np.finfo(float).tiny)
    err = float(np.max(np.abs(fine_arr - coarse_arr) / scale))
    if tol is not None and err > tol:
        raise GridTooCoarse(f"quadrature error estimate {err:.2e} exceeds {tol:.1e}")
    return NumericConvolution(pts, fine_arr, err)
