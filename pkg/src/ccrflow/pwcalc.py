"""Two-variable functional calculus ``f(alpha, beta)`` for pairs of positive forms.

A form function ``f`` (homogeneous of degree one on the closed quadrant) is
stored through two one-variable kernels on ``u <= 0``::

    F(u) = f(1, e^u)        G(v) = f(e^v, 1)

so that ``f(s, t) = s F(log(t/s))`` when ``s >= t`` and ``t G(log(s/t))``
otherwise. Evaluating only on ratios ``<= 1`` keeps every kernel free of
overflow, and the kernels below use ``expm1`` so that the removable
singularity at ``s = t`` costs no precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import UnboundedSection
from .sampling import rng_for
from .starlinalg import CovarianceForm, RatioOperator, ratio_operator, real_part_eigh

Kernel = Callable[[np.ndarray], np.ndarray]

TOL_ORDER = 1e-9
SECTION_GRID = 10_000
OVERFLOW_GUARD = 1e300


def _kernel_eval(k: Kernel, u: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return np.asarray(k(u), dtype=float)


@dataclass(frozen=True)
class FormFunction:
    F: Kernel
    G: Kernel
    label: str = "f"

    def section(self, s) -> np.ndarray:
        """``phi(s) = f(s, 1 - s)`` on ``[0, 1]``."""
        s = np.asarray(s, dtype=float)
        return self(s, 1.0 - s)

    def __call__(self, s, t) -> np.ndarray:
        s, t = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
        out = np.zeros(s.shape)
        with np.errstate(divide="ignore"):
            big_s = (s >= t) & (s > 0)
            big_t = (t > s)
            if np.any(big_s):
                u = np.log(t[big_s]) - np.log(s[big_s])
                out[big_s] = s[big_s] * _kernel_eval(self.F, u)
            if np.any(big_t):
                v = np.log(s[big_t]) - np.log(t[big_t])
                out[big_t] = t[big_t] * _kernel_eval(self.G, v)
        return out

    def at_one(self, t) -> np.ndarray:
        """``f(1, t)`` for ``t >= 0``, the function probed for operator monotonicity."""
        return self(np.ones_like(np.asarray(t, dtype=float)), t)

    def __add__(self, other: "FormFunction") -> "FormFunction":
        F1, G1, F2, G2 = self.F, self.G, other.F, other.G
        return FormFunction(
            lambda u: _kernel_eval(F1, u) + _kernel_eval(F2, u),
            lambda v: _kernel_eval(G1, v) + _kernel_eval(G2, v),
            f"({self.label}+{other.label})",
        )

    def scaled(self, c: float) -> "FormFunction":
        F, G = self.F, self.G
        return FormFunction(
            lambda u: c * _kernel_eval(F, u), lambda v: c * _kernel_eval(G, v),
            f"{c}*{self.label}",
        )

    def swapped(self) -> "FormFunction":
        """``(s, t) -> f(t, s)``."""
        return FormFunction(self.G, self.F, f"swap({self.label})")

    def check_bounded(self, n: int = SECTION_GRID) -> float:
        vals = self.section(np.linspace(0.0, 1.0, n))
        peak = float(np.max(np.abs(vals)))
        if not np.isfinite(peak) or peak > OVERFLOW_GUARD:
            raise UnboundedSection(f"section of {self.label} is unbounded on [0, 1]")
        return peak


def _expm1_ratio(u: np.ndarray, r: float) -> np.ndarray:
    """``expm1(u) / expm1(r u)`` for ``u <= 0``; equals ``1/r`` at ``u = 0``."""
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    zero = u == 0
    out[zero] = 1.0 / r
    nz = ~zero
    out[nz] = np.expm1(u[nz]) / np.expm1(r * u[nz])
    out[np.isneginf(u)] = 1.0
    return out


def _expm1_over(c: float, u: np.ndarray) -> np.ndarray:
    """``expm1(c u) / c``, continuous at ``c = 0``."""
    if c == 0:
        return np.asarray(u, dtype=float)
    return np.expm1(c * u) / c


def f_r(r: float) -> FormFunction:
    """``f_r(s, t) = s^r (s - t) / (s^r - t^r)``, value ``t/r`` on the diagonal."""
    if r <= 0:
        raise ValueError("r must be positive")

    def F(u):
        return _expm1_ratio(u, r)

    def G(v):
        v = np.asarray(v, dtype=float)
        with np.errstate(under="ignore"):
            return np.exp(r * v) * _expm1_ratio(v, r)

    return FormFunction(F, G, f"f_{r:g}")


def g_r(r: float) -> FormFunction:
    """Symmetric ``g_r(s, t) = r/(1-r) (s t^r - s^r t) / (s^r - t^r)``, ``g_r(t, t) = t``."""
    if r <= 0:
        raise ValueError("r must be positive")
    c = 1.0 - r

    def K(u):
        u = np.asarray(u, dtype=float)
        out = np.empty_like(u)
        zero = u == 0
        out[zero] = 1.0
        fin = ~zero & np.isfinite(u)
        uf = u[fin]
        small = np.abs(c * uf) < 1.0
        # (t^r - t) / (1 - t^r) * r / (1 - r) with t = e^u, in two stable forms
        num = np.where(
            small,
            np.exp(r * uf) * _expm1_over(c, uf),
            (np.exp(uf) - np.exp(r * uf)) / (c if c != 0 else 1.0),
        )
        out[fin] = r * num / np.expm1(r * uf)
        out[np.isneginf(u)] = 0.0
        return out

    return FormFunction(K, K, f"g_{r:g}")


def geo() -> FormFunction:
    k = lambda u: np.exp(np.asarray(u, dtype=float) / 2)
    return FormFunction(k, k, "geo")


def arith() -> FormFunction:
    k = lambda u: (1.0 + np.exp(np.asarray(u, dtype=float))) / 2
    return FormFunction(k, k, "arith")


def left() -> FormFunction:
    return FormFunction(lambda u: np.ones_like(np.asarray(u, dtype=float)),
                        lambda v: np.exp(np.asarray(v, dtype=float)), "left")


def right() -> FormFunction:
    base = left()
    return FormFunction(base.G, base.F, "right")


CATALOG: dict[str, Callable[..., FormFunction]] = {
    "f_r": f_r,
    "g_r": g_r,
    "geo": geo,
    "arith": arith,
    "left": left,
    "right": right,
}


def catalog(name: str, r: Optional[float] = None) -> FormFunction:
    try:
        make = CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown form function {name!r}; known: {sorted(CATALOG)}") from None
    if name in ("f_r", "g_r"):
        if r is None:
            raise ValueError(f"{name} needs a parameter r")
        return make(r)
    return make()


# -- calculus ---------------------------------------------------------------


def pw_apply_ratio(f: FormFunction, ratio: RatioOperator) -> np.ndarray:
    return ratio.to_form(ratio.apply(f.section))


def pw_apply(f: FormFunction, form: CovarianceForm) -> np.ndarray:
    """Matrix of the form ``f(S, conj S)`` on ``V^C``."""
    f.check_bounded()
    out = pw_apply_ratio(f, ratio_operator(form))
    return (out + out.conj().T) / 2


def pw_pair(f: FormFunction, alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """``f(alpha, beta)`` for two arbitrary positive forms on ``C^d``.

    Represented on the Hilbert space of ``alpha + beta``; ``alpha`` becomes an
    operator ``A`` with ``0 <= A <= 1`` and ``beta`` becomes ``1 - A``.
    """
    alpha = np.asarray(alpha, dtype=complex)
    beta = np.asarray(beta, dtype=complex)
    total = alpha + beta
    total = (total + total.conj().T) / 2
    d, U = np.linalg.eigh(total)
    keep = d > 1e-12 * max(float(d[-1]), np.finfo(float).tiny)
    d, U = d[keep], U[:, keep]
    W = U / np.sqrt(d)
    A = W.conj().T @ alpha @ W
    A = (A + A.conj().T) / 2
    a, V = np.linalg.eigh(A)
    phi = f.section(np.clip(a, 0.0, 1.0))
    op = (V * phi) @ V.conj().T
    iota = (U * np.sqrt(d)).conj().T  # rows: iota(x) = sqrt(d) U^H x
    out = iota.conj().T @ op @ iota
    return (out + out.conj().T) / 2


def _cholesky_route(f: FormFunction, form: CovarianceForm) -> np.ndarray:
    """Second representation of ``(S, conj S)``: Cholesky factor of the real part."""
    d, U = real_part_eigh(form.real_part)
    R_range = (U.T @ form.real_part @ U)
    L = np.linalg.cholesky((R_range + R_range.T) / 2)
    # iota(x) = L^T U^T x is an isometry for the real part
    Linv = np.linalg.inv(L)
    A = Linv @ (U.T @ form.S @ U) @ Linv.T
    A = (A + A.conj().T) / 2
    a, V = np.linalg.eigh(A)
    op = (V * f.section(np.clip(a, 0.0, 1.0))) @ V.conj().T
    iota = L.T @ U.T
    return iota.T @ op @ iota


@dataclass(frozen=True)
class IndependenceReport:
    max_deviation: float
    deviations: tuple[float, ...]
    passed: bool


def check_representation_independence(
    f: FormFunction, form: CovarianceForm, trials: int = 10, seed: int = 0,
    tol: float = 1e-8,
) -> IndependenceReport:
    """Compare ``pw_apply`` with the same calculus in other representations.

    Each trial pulls the pair back along a random invertible real ``G``, runs the
    calculus there through a Cholesky-based representation, and pushes the
    result forward again with ``G^{-1}``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    ref = pw_apply(f, form)
    scale = max(1.0, float(np.max(np.abs(ref))))
    n = form.n
    devs = []
    for k in range(trials):
        rng = rng_for(seed, k)
        G = rng.normal(size=(n, n)) + 2.0 * np.eye(n)
        while abs(np.linalg.det(G)) < 1e-3:
            G = rng.normal(size=(n, n)) + 2.0 * np.eye(n)
        pulled = CovarianceForm(form.space, G.T @ form.S @ G)
        moved = _cholesky_route(f, pulled)
        Ginv = np.linalg.inv(G)
        back = Ginv.T @ moved @ Ginv
        devs.append(float(np.max(np.abs(back - ref))) / scale)
    worst = max(devs)
    return IndependenceReport(worst, tuple(devs), worst < tol)


# -- probes -------------------------------------------------------------------


def _spectral(phi: Callable, A: np.ndarray) -> np.ndarray:
    lam, U = np.linalg.eigh(A)
    vals = np.asarray(phi(np.clip(lam, 0.0, None)), dtype=float)
    return (U * vals) @ U.conj().T


def _random_psd(rng: np.random.Generator, d: int, complex_: bool = True) -> np.ndarray:
    U = rng.normal(size=(d, d)) + (1j * rng.normal(size=(d, d)) if complex_ else 0)
    U, _ = np.linalg.qr(U)
    lam = np.exp(rng.uniform(np.log(1e-3), np.log(1e3), size=d))
    return (U * lam) @ U.conj().T


@dataclass(frozen=True)
class ProbeResult:
    counterexample: Optional[tuple[np.ndarray, ...]]
    trials_run: int
    worst_eigenvalue: float

    @property
    def found(self) -> bool:
        return self.counterexample is not None


def probe_operator_monotone(
    phi: Callable, dim: int = 2, trials: int = 10_000, seed: int = 0,
    tol: float = TOL_ORDER,
) -> ProbeResult:
    """Search for ``0 <= A <= B`` with ``phi(A) <= phi(B)`` violated.

    A returned counterexample is certified by its eigenvalue; finding none is
    only evidence. Increments ``B - A`` are low-rank and spread over many
    scales, since violations of matrix monotonicity for these kernels show up
    as first-order (Loewner matrix) effects.
    """
    if dim not in (2, 3, 4):
        raise ValueError("dim must be 2, 3 or 4")
    worst = np.inf
    for k in range(trials):
        rng = rng_for(seed, k)
        A = _random_psd(rng, dim)
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        v /= np.linalg.norm(v)
        eps = np.exp(rng.uniform(np.log(1e-4), np.log(1e2)))
        rank = rng.integers(1, dim + 1)
        if rank == 1:
            inc = eps * np.outer(v, v.conj())
        else:
            inc = eps * _random_psd(rng, dim) / 1e3
        B = A + inc
        diff = _spectral(phi, B) - _spectral(phi, A)
        scale = max(1.0, float(np.max(np.abs(diff))))
        lam = float(np.linalg.eigvalsh((diff + diff.conj().T) / 2)[0]) / scale
        worst = min(worst, lam)
        if lam < -tol:
            return ProbeResult((A, B), k + 1, worst)
    return ProbeResult(None, trials, worst)


def form_concavity_probe(
    f: FormFunction, trials: int = 1000, seed: int = 0, dim: int = 2,
    tol: float = TOL_ORDER,
) -> ProbeResult:
    """Search for a violation of joint concavity of ``f`` on positive forms.

    Checks ``(1-t) f(a0, b0) + t f(a1, b1) <= f((1-t) a0 + t a1, (1-t) b0 + t b1)``
    as a matrix inequality on ``C^dim``.
    """
    worst = np.inf
    for k in range(trials):
        rng = rng_for(seed, k)
        a0, b0, a1, b1 = (_random_psd(rng, dim) for _ in range(4))
        t = rng.uniform(0.05, 0.95)
        lhs = (1 - t) * pw_pair(f, a0, b0) + t * pw_pair(f, a1, b1)
        rhs = pw_pair(f, (1 - t) * a0 + t * a1, (1 - t) * b0 + t * b1)
        diff = rhs - lhs
        scale = max(1.0, float(np.max(np.abs(rhs))))
        lam = float(np.linalg.eigvalsh((diff + diff.conj().T) / 2)[0]) / scale
        worst = min(worst, lam)
        if lam < -tol:
            return ProbeResult((a0, b0, a1, b1, np.array(t)), k + 1, worst)
    return ProbeResult(None, trials, worst)
