import numpy as np
import pytest

from ccrflow.sampling import (
    canonical_antisymmetric,
    form_from_modes,
    random_form,
    random_mus,
    random_symplectic,
    rng_for,
)
from ccrflow.starlinalg import normal_form, ratio_operator


def test_streams_are_reproducible_and_independent():
    a = rng_for(1, 2, 3).random(4)
    assert np.array_equal(a, rng_for(1, 2, 3).random(4))
    assert not np.array_equal(a, rng_for(1, 2, 4).random(4))


def test_form_from_modes_identity_real_part():
    form = form_from_modes([0.3, 0.1])
    assert np.allclose(form.real_part, np.eye(4))
    assert np.allclose(sorted(ratio_operator(form).eigenvalues), [0.2, 0.4, 0.6, 0.8])


def test_random_form_shapes():
    form = random_form(rng_for(0), 7, n_center=1, kernel_dim=2)
    assert form.n == 7 and ratio_operator(form).rank == 5
    with pytest.raises(ValueError):
        random_form(rng_for(0), 4, n_center=1)


def test_random_mus_respects_bounds():
    mus = random_mus(rng_for(0), 200, 0.0, 0.5, avoid_half=0.01)
    assert mus.min() > 0.01 and mus.max() <= 0.5


def test_random_symplectic_preserves_sigma():
    sigma = canonical_antisymmetric([0.3, 0.2])
    G = random_symplectic(sigma, rng_for(5))
    assert np.max(np.abs(G.T @ sigma @ G - sigma)) < 1e-12


def test_spectrum_matches_requested_mus():
    rng = rng_for(8)
    form = random_form(rng, 6, mu_range=(0.1, 0.2))
    mus = normal_form(form).mus
    assert np.all((mus >= 0.1 - 1e-12) & (mus <= 0.2 + 1e-12))
