"""Fermionic scaling ``C -> C^r / (C^r + conj(C)^r)`` on covariance operators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotCommuting, NotHermitian, NotPositive, SingularDenominator
from .starlinalg import TOL_SPEC

TOL = 1e-10
NEAR_HALF = 1e-3


@dataclass(frozen=True, eq=False)
class FermionCovariance:
    C: np.ndarray

    @property
    def n(self) -> int:
        return self.C.shape[0]

    @property
    def conj(self) -> np.ndarray:
        return self.C.conj()

    @property
    def is_standard(self) -> bool:
        """``conj(C) = 1 - C``, the case the limit tables are written for."""
        return bool(np.max(np.abs(self.C.conj() + self.C - np.eye(self.n))) < TOL)


def make_covariance(C) -> FermionCovariance:
    C = np.asarray(C, dtype=complex)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise DimensionMismatch("C must be square")
    if np.max(np.abs(C - C.conj().T)) > TOL:
        raise NotHermitian("C is not Hermitian")
    C = (C + C.conj().T) / 2
    lam = np.linalg.eigvalsh(C)
    if lam[0] < -TOL or lam[-1] > 1 + TOL:
        raise NotPositive(f"spectrum [{lam[0]:.6g}, {lam[-1]:.6g}] not inside [0, 1]")
    if np.max(np.abs(C @ C.conj() - C.conj() @ C)) > TOL:
        raise NotCommuting("C does not commute with its complex conjugate")
    return FermionCovariance(C)


def standard_covariance(c_upper) -> FermionCovariance:
    """Block-diagonal ``C`` with ``conj(C) = 1 - C`` and spectrum ``{c, 1 - c}``.

    Each ``c`` in ``c_upper`` (values in [1/2, 1]) gives the 2x2 block
    ``[[1/2, i d], [-i d, 1/2]]`` with ``d = c - 1/2``.
    """
    c = np.asarray(c_upper, dtype=float)
    if np.any(c < 0.5) or np.any(c > 1):
        raise NotPositive("block spectra need c in [1/2, 1]")
    n = 2 * len(c)
    C = 0.5 * np.eye(n, dtype=complex)
    for j, d in enumerate(c - 0.5):
        C[2 * j, 2 * j + 1] = 1j * d
        C[2 * j + 1, 2 * j] = -1j * d
    return FermionCovariance(C)


def _joint_eig(C: np.ndarray):
    """Common eigenbasis of the commuting Hermitian pair ``(C, conj C)``.

    Diagonalizes a generic real combination, then reads both spectra off it.
    """
    X = C + np.sqrt(2.0) * C.conj()
    _, U = np.linalg.eigh((X + X.conj().T) / 2)
    c = np.real(np.einsum("ij,ik,kj->j", U.conj(), C, U))
    cbar = np.real(np.einsum("ij,ik,kj->j", U.conj(), C.conj(), U))
    return np.clip(c, 0, 1), np.clip(cbar, 0, 1), U


def fermion_flow(cov: FermionCovariance, r: float) -> FermionCovariance:
    if not r > 0:
        raise ValueError("r must be positive")
    c, cbar, U = _joint_eig(cov.C)
    with np.errstate(divide="ignore"):
        lc, lcb = np.log(c), np.log(cbar)
    if np.any(np.isneginf(lc) & np.isneginf(lcb)):
        raise SingularDenominator("C^r + conj(C)^r is singular")
    # c^r / (c^r + cbar^r) = 1 / (1 + exp(r (log cbar - log c)))
    with np.errstate(invalid="ignore", over="ignore"):
        vals = 1.0 / (1.0 + np.exp(r * (lcb - lc)))
    vals = np.where(np.isneginf(lc), 0.0, np.where(np.isneginf(lcb), 1.0, vals))
    out = (U * vals) @ U.conj().T
    return FermionCovariance((out + out.conj().T) / 2)


def high_temp_map(c: np.ndarray, tol: float = TOL_SPEC) -> np.ndarray:
    """``r -> 0`` limit of ``c^r / (c^r + (1-c)^r)``."""
    c = np.asarray(c, dtype=float)
    return np.where(c <= tol, 0.0, np.where(c >= 1 - tol, 1.0, 0.5))


def low_temp_map(c: np.ndarray, tol: float = TOL_SPEC) -> np.ndarray:
    """``r -> inf`` limit of ``c^r / (c^r + (1-c)^r)``."""
    c = np.asarray(c, dtype=float)
    return np.where(np.abs(c - 0.5) <= tol, 0.5, np.where(c < 0.5, 0.0, 1.0))


@dataclass(frozen=True, eq=False)
class FermionLimits:
    low_temp: np.ndarray
    high_temp: np.ndarray
    near_threshold: tuple[float, ...]


def fermion_limits(cov: FermionCovariance) -> FermionLimits:
    if not cov.is_standard:
        raise NotCommuting("limit tables need conj(C) = 1 - C")
    lam, U = np.linalg.eigh(cov.C)
    near = tuple(float(x) for x in lam if 0 < abs(x - 0.5) < NEAR_HALF)
    low = (U * low_temp_map(lam)) @ U.conj().T
    high = (U * high_temp_map(lam)) @ U.conj().T
    return FermionLimits(low, high, near)
