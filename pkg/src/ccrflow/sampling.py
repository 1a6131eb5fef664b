"""Seeded random covariance forms with prescribed ratio-operator spectra.

Forms are assembled as ``S = E M E^T`` where ``M = (1 + i A) / 2`` in
coordinates orthonormal for the real part, ``A`` real antisymmetric with
singular values ``2 mu_j``, and ``E`` a random real map.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.stats

from .starlinalg import CovarianceForm, StarSpace, make_form


def rng_for(seed: int, *counter: int) -> np.random.Generator:
    """Counter-based generator: one independent stream per ``(seed, *counter)``."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *counter])
    return np.random.Generator(np.random.Philox(ss))


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    if n == 1:
        return np.array([[1.0 if rng.random() < 0.5 else -1.0]])
    return scipy.stats.ortho_group.rvs(n, random_state=rng)


def random_real_map(n: int, m: int, rng: np.random.Generator, cond: float = 10.0) -> np.ndarray:
    """Real ``n x m`` map (``m <= n``) with singular values in ``[1, cond]``."""
    U = random_orthogonal(n, rng)[:, :m]
    V = random_orthogonal(m, rng)
    sv = np.exp(rng.uniform(0.0, np.log(cond), size=m))
    return (U * sv) @ V.T


def canonical_antisymmetric(mus: Sequence[float], n_center: int = 0) -> np.ndarray:
    mus = list(mus)
    n = n_center + 2 * len(mus)
    A = np.zeros((n, n))
    for j, mu in enumerate(mus):
        p, q = n_center + 2 * j, n_center + 2 * j + 1
        A[q, p] = 2 * mu
        A[p, q] = -2 * mu
    return A


def form_from_modes(
    mus: Sequence[float],
    n_center: int = 0,
    E: Optional[np.ndarray] = None,
    rng: Optional[np.random.Generator] = None,
) -> CovarianceForm:
    """Form whose ratio operator has eigenvalues ``1/2 +- mu_j`` and ``1/2`` (x n_center).

    Without ``E`` and ``rng`` the modes sit in the standard basis, so the real
    part is the identity.
    """
    A = canonical_antisymmetric(mus, n_center)
    m = A.shape[0]
    if E is None:
        if rng is None:
            E = np.eye(m)
        else:
            O = random_orthogonal(m, rng)
            A = O @ A @ O.T
            E = random_real_map(m, m, rng)
    M = (np.eye(m) + 1j * A) / 2
    S = E @ M @ E.T
    return make_form(StarSpace(E.shape[0]), S)


def random_mus(
    rng: np.random.Generator,
    k: int,
    low: float = 0.0,
    high: float = 0.5,
    avoid_half: float = 0.0,
) -> np.ndarray:
    """``k`` values of ``mu`` uniform on ``[low, high]`` with ``mu > avoid_half``."""
    out = []
    while len(out) < k:
        mu = rng.uniform(low, high)
        if mu > avoid_half:
            out.append(mu)
    return np.array(out)


def random_form(
    rng: np.random.Generator,
    n: int,
    *,
    mu_range: tuple[float, float] = (0.0, 0.5),
    n_center: int = 0,
    avoid_half: float = 0.0,
    kernel_dim: int = 0,
    cond: float = 10.0,
) -> CovarianceForm:
    """Random form on ``C^n``.

    ``n_center`` directions carry ratio eigenvalue 1/2, ``kernel_dim`` directions
    lie in ``ker(S + conj S)``, and the remaining ``n - n_center - kernel_dim``
    (must be even) are symplectic modes with ``mu`` drawn from ``mu_range``.
    """
    m = n - kernel_dim
    n_modes, rem = divmod(m - n_center, 2)
    if rem or n_modes < 0:
        raise ValueError("n - n_center - kernel_dim must be a nonnegative even number")
    mus = random_mus(rng, n_modes, *mu_range, avoid_half=avoid_half)
    A = canonical_antisymmetric(mus, n_center)
    O = random_orthogonal(m, rng)
    A = O @ A @ O.T
    E = random_real_map(n, m, rng, cond=cond)
    M = (np.eye(m) + 1j * A) / 2
    return make_form(StarSpace(n), E @ M @ E.T)


def random_extremal_form(rng: np.random.Generator, n: int, cond: float = 10.0) -> CovarianceForm:
    """Form whose ratio operator is a projection (all ``mu_j = 1/2``); ``n`` even."""
    return random_form(rng, n, mu_range=(0.5, 0.5), cond=cond)


def random_symplectic(sigma: np.ndarray, rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    """Real ``G`` with ``G^T sigma G = sigma`` (``sigma`` nondegenerate)."""
    n = sigma.shape[0]
    H = rng.normal(size=(n, n))
    H = scale * (H + H.T) / 2
    X = np.linalg.solve(sigma, H)
    return scipy.linalg.expm(X)
