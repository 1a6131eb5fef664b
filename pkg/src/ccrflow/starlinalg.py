"""Covariance forms on complexified real spaces.

Everything lives in a fixed real basis of ``V``, so complex conjugation of
vectors, operators and sesquilinear forms is entrywise conjugation. A form is
stored as the matrix ``S`` with ``S(x, y) = x^H S y``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import DegenerateRealPart, DimensionMismatch, NotHermitian, NotPositive

TOL_HERM_REL = 1e-10
TOL_PSD_REL = 1e-10
TOL_SPEC = 1e-8
TOL_DEGENERATE_REL = 1e-12
SNAP = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _scale(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, 2)) if a.size else 0.0


@dataclass(frozen=True)
class StarSpace:
    """Real vector space ``V`` of dimension ``dim`` with its complexification."""

    dim: int
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if int(self.dim) < 1:
            raise DimensionMismatch(f"dim must be >= 1, got {self.dim}")
        if self.labels is not None and len(self.labels) != self.dim:
            raise DimensionMismatch("need one label per basis vector")


@dataclass(frozen=True, eq=False)
class CovarianceForm:
    """Positive sesquilinear form on ``V^C``; build it with :func:`make_form`."""

    space: StarSpace
    S: np.ndarray

    @property
    def n(self) -> int:
        return self.space.dim

    @property
    def conj(self) -> np.ndarray:
        return self.S.conj()

    @property
    def real_part(self) -> np.ndarray:
        """``S + conj(S)``, a real symmetric PSD matrix (not halved)."""
        return (self.S + self.S.conj()).real

    @property
    def sigma(self) -> np.ndarray:
        """``(S - conj(S)) / i``, the real antisymmetric imaginary part."""
        return ((self.S - self.S.conj()) / 1j).real

    def quadratic(self) -> np.ndarray:
        """Matrix of ``x -> S(x, x)`` on real vectors."""
        return self.S.real


def make_form(space: StarSpace | int, S) -> CovarianceForm:
    if not isinstance(space, StarSpace):
        space = StarSpace(int(space))
    S = np.asarray(S, dtype=complex)
    n = space.dim
    if S.shape != (n, n):
        raise DimensionMismatch(f"expected {n}x{n} matrix, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise NotHermitian("matrix has non-finite entries")
    scale = _scale(S)
    herm_err = float(np.max(np.abs(S - S.conj().T)))
    if herm_err > TOL_HERM_REL * scale:
        raise NotHermitian(f"||S - S^H|| = {herm_err:.3e} exceeds tolerance")
    S = (S + S.conj().T) / 2
    lam_min = float(np.linalg.eigvalsh(S)[0])
    if lam_min < -TOL_PSD_REL * scale:
        raise NotPositive(f"minimum eigenvalue {lam_min:.6g} is negative")
    return CovarianceForm(space, _frozen(S))


@dataclass(frozen=True, eq=False)
class RatioOperator:
    """Operator of ``S`` against the inner product ``S + conj(S)``.

    ``M`` acts on quotient coordinates ``xi = transform.T @ x`` of ``V^C``
    modulo ``ker(S + conj S)``; these coordinates are orthonormal for the real
    part. ``transform`` (n x m) and ``coords`` (n x m) are real with
    ``S = transform @ M @ transform.T`` and ``M = coords.T @ S @ coords``.
    """

    M: np.ndarray
    transform: np.ndarray
    coords: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def rank(self) -> int:
        return self.M.shape[0]

    def apply(self, fn) -> np.ndarray:
        """Spectral calculus ``fn(M)`` with eigenvalues clipped to [0, 1].

        Values within ``SNAP`` of 0 or 1 are set to the endpoint: they are
        roundoff, and sections like ``s^r`` with ``r < 1`` would amplify them.
        """
        s = np.clip(self.eigenvalues, 0.0, 1.0)
        s = np.where(s < SNAP, 0.0, np.where(s > 1.0 - SNAP, 1.0, s))
        U = self.eigenvectors
        return (U * np.asarray(fn(s), dtype=complex)) @ U.conj().T

    def to_form(self, op: np.ndarray) -> np.ndarray:
        """Matrix on ``V^C`` of the form ``(x, y) -> ([x] | op [y])``."""
        E = self.transform
        return E @ op @ E.T


def real_part_eigh(R: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Range of a real PSD matrix: kept eigenvalues and eigenvectors."""
    d, U = np.linalg.eigh(R)
    keep = d > TOL_DEGENERATE_REL * max(_scale(R), np.finfo(float).tiny)
    return d[keep], U[:, keep]


def ratio_operator(form: CovarianceForm) -> RatioOperator:
    d, U = real_part_eigh(form.real_part)
    transform = U * np.sqrt(d)
    coords = U / np.sqrt(d)
    M = coords.T @ form.S @ coords
    M = (M + M.conj().T) / 2
    s, V = np.linalg.eigh(M)
    return RatioOperator(
        _frozen(M), _frozen(transform), _frozen(coords), _frozen(s), _frozen(V)
    )


@dataclass(frozen=True, eq=False)
class SymplecticNormalForm:
    """Basis ``(h_1..h_k, p_1, q_1, ..., p_m, q_m)`` as columns of ``B``.

    Columns are orthonormal for ``S + conj(S)`` and ``sigma(q_j, p_j) = 2 mu_j``.
    """

    B: np.ndarray
    mus: np.ndarray
    degenerate_dim: int

    @property
    def n_modes(self) -> int:
        return len(self.mus)

    def canonical_sigma(self) -> np.ndarray:
        """The block form ``B.T @ sigma @ B`` should take."""
        k = self.degenerate_dim
        n = k + 2 * self.n_modes
        out = np.zeros((n, n))
        for j, mu in enumerate(self.mus):
            p, q = k + 2 * j, k + 2 * j + 1
            out[q, p] = 2 * mu
            out[p, q] = -2 * mu
        return out


def normal_form(form: CovarianceForm) -> SymplecticNormalForm:
    R = form.real_part
    d, U = np.linalg.eigh(R)
    if d[0] <= TOL_DEGENERATE_REL * _scale(R):
        raise DegenerateRealPart(
            f"S + conj(S) is degenerate (min eigenvalue {d[0]:.3e})"
        )
    W = U / np.sqrt(d)
    A = W.T @ form.sigma @ W
    A = (A - A.T) / 2
    T, Z = scipy.linalg.schur(A, output="real")
    n = A.shape[0]
    tol = 1e-12 * max(1.0, _scale(A))

    modes: list[tuple[float, np.ndarray, np.ndarray]] = []
    kernel: list[np.ndarray] = []
    i = 0
    while i < n:
        if i + 1 < n and abs(T[i + 1, i]) > tol:
            b = T[i, i + 1]
            z1, z2 = Z[:, i], Z[:, i + 1]
            # the block is [[~0, b], [-b, ~0]] up to rounding: z1^T A z2 = b
            if b > 0:
                q, p = z1, z2
            else:
                q, p = z2, z1
            modes.append((abs(b) / 2, p, q))
            i += 2
        else:
            kernel.append(Z[:, i])
            i += 1

    modes.sort(key=lambda m: -m[0])
    cols = kernel + [v for _, p, q in modes for v in (p, q)]
    Zs = np.column_stack(cols) if cols else np.zeros((n, 0))
    B = W @ Zs
    mus = np.array([min(m, 0.5) for m, _, _ in modes])
    return SymplecticNormalForm(_frozen(B), _frozen(mus), len(kernel))


@dataclass(frozen=True)
class Classification:
    is_extremal: bool
    is_center_free: bool
    is_non_boundary: bool


def classify(form: CovarianceForm, tol_spec: float = TOL_SPEC) -> Classification:
    s = ratio_operator(form).eigenvalues
    near0 = s <= tol_spec
    near1 = s >= 1 - tol_spec
    return Classification(
        is_extremal=bool(np.all(near0 | near1)),
        is_center_free=not bool(np.any(np.abs(s - 0.5) < tol_spec)),
        is_non_boundary=not bool(np.any(near0 | near1)),
    )


def direct_sum(forms: Sequence[CovarianceForm]) -> CovarianceForm:
    S = scipy.linalg.block_diag(*[f.S for f in forms])
    return make_form(StarSpace(S.shape[0]), S)


def pullback(form: CovarianceForm, G: np.ndarray) -> CovarianceForm:
    """``(S G)(x, y) = S(G x, G y)`` for a real linear map ``G``."""
    G = np.asarray(G, dtype=float)
    if G.shape[0] != form.n:
        raise DimensionMismatch("G must map into the form's space")
    return make_form(StarSpace(G.shape[1]), G.T @ form.S @ G)
