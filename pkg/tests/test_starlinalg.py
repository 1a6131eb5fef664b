import numpy as np
import pytest
from hypothesis import given, strategies as st

from ccrflow.errors import (
    DegenerateRealPart,
    DimensionMismatch,
    NotHermitian,
    NotPositive,
    ValidationError,
)
from ccrflow.sampling import random_extremal_form, random_form, rng_for
from ccrflow.starlinalg import (
    StarSpace,
    classify,
    direct_sum,
    make_form,
    normal_form,
    pullback,
    ratio_operator,
)

from conftest import max_abs

SEEDS = st.integers(0, 2**32 - 1)


def test_real_scalar_form():
    f = make_form(1, [[1.0]])
    assert f.real_part.tolist() == [[2.0]]
    assert f.sigma.tolist() == [[0.0]]


def test_sigma_of_single_mode(mu03):
    assert np.allclose(mu03.sigma, [[0, 0.6], [-0.6, 0]], atol=1e-15)


def test_not_positive():
    with pytest.raises(NotPositive):
        make_form(2, np.array([[0.5, 0.6j], [-0.6j, 0.5]]))


def test_not_hermitian():
    with pytest.raises(NotHermitian):
        make_form(2, np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        make_form(3, np.eye(2))
    with pytest.raises(DimensionMismatch):
        make_form(2, np.ones((2, 3)))


def test_validation_errors_are_value_errors():
    assert issubclass(NotPositive, ValidationError)
    assert issubclass(ValidationError, ValueError)


def test_space_labels():
    space = StarSpace(2, ("x", "y"))
    assert make_form(space, np.eye(2)).space.labels == ("x", "y")
    with pytest.raises(ValueError):
        StarSpace(2, ("x",))


def test_ratio_operator_single_mode(mu03):
    ratio = ratio_operator(mu03)
    assert np.allclose(sorted(ratio.eigenvalues), [0.2, 0.8], atol=1e-14)
    # R is the identity, so M is S in the original basis up to the choice of eigvectors
    assert np.allclose(ratio.to_form(ratio.M), mu03.S, atol=1e-14)


def test_real_form_ratio_is_half():
    ratio = ratio_operator(make_form(1, [[3.0]]))
    assert np.allclose(ratio.M, [[0.5]])


def test_rank_one_form_is_projection():
    ratio = ratio_operator(make_form(2, np.array([[1, 1j], [-1j, 1]])))
    assert np.allclose(sorted(ratio.eigenvalues), [0.0, 1.0], atol=1e-14)
    s = ratio.eigenvalues
    assert max_abs(s * (1 - s)) < 1e-14


@given(SEEDS, st.integers(0, 2))
def test_conj_M_is_one_minus_M(seed, half_kernel):
    rng = rng_for(seed)
    form = random_form(rng, 6, kernel_dim=2 * half_kernel)
    M = ratio_operator(form).M
    assert max_abs(M.conj() - (np.eye(len(M)) - M)) < 1e-10


def test_normal_form_single_mode(mu03):
    nf = normal_form(mu03)
    assert nf.degenerate_dim == 0
    assert np.allclose(nf.mus, [0.3])
    B = nf.B
    assert np.allclose(B.T @ mu03.sigma @ B, nf.canonical_sigma(), atol=1e-14)
    # sigma(q, p) = +2 mu with columns (p, q)
    assert np.isclose(B[:, 1] @ mu03.sigma @ B[:, 0], 0.6)


def test_normal_form_real_scalar():
    nf = normal_form(make_form(1, [[0.5]]))
    assert nf.degenerate_dim == 1 and nf.mus.size == 0


def test_normal_form_two_blocks():
    a = np.array([[0.5, 0.3j], [-0.3j, 0.5]])
    b = np.array([[0.5, 0.5j], [-0.5j, 0.5]])
    S = np.block([[a, np.zeros((2, 2))], [np.zeros((2, 2)), b]])
    nf = normal_form(make_form(4, S))
    assert nf.degenerate_dim == 0
    assert np.allclose(nf.mus, [0.5, 0.3])


def test_normal_form_refuses_degenerate_real_part():
    with pytest.raises(DegenerateRealPart):
        normal_form(make_form(2, np.diag([1.0, 0.0])))


@pytest.mark.parametrize("n", range(1, 13))
def test_normal_form_roundtrip(n):
    for k in range(8):
        rng = rng_for(2024, n, k)
        n_center = n % 2 + (2 if n > 3 and k % 2 else 0)
        form = random_form(rng, n, n_center=n_center)
        nf = normal_form(form)
        B = nf.B
        assert nf.degenerate_dim == n_center
        assert max_abs(B.T @ form.real_part @ B - np.eye(n)) < 1e-10
        assert max_abs(B.T @ form.sigma @ B - nf.canonical_sigma()) < 1e-10
        assert np.all(np.diff(nf.mus) <= 0)


def test_normal_form_mus_match_construction():
    from ccrflow.sampling import form_from_modes

    rng = rng_for(5)
    form = form_from_modes([0.1, 0.4, 0.25], n_center=1, rng=rng)
    nf = normal_form(form)
    assert np.allclose(nf.mus, [0.4, 0.25, 0.1], atol=1e-12)
    assert nf.degenerate_dim == 1


def test_classify_examples():
    c = classify(make_form(2, np.array([[1, 1j], [-1j, 1]])))
    assert (c.is_extremal, c.is_center_free, c.is_non_boundary) == (True, True, False)
    c = classify(make_form(2, np.array([[0.5, 0.3j], [-0.3j, 0.5]])))
    assert (c.is_extremal, c.is_center_free, c.is_non_boundary) == (False, True, True)
    c = classify(make_form(1, [[0.5]]))
    assert (c.is_extremal, c.is_center_free, c.is_non_boundary) == (False, False, True)


def test_classify_extremal_agrees_with_residual():
    for k in range(100):
        rng = rng_for(77, k)
        form = random_extremal_form(rng, 4) if k % 2 else random_form(rng, 4, mu_range=(0.01, 0.49))
        s = ratio_operator(form).eigenvalues
        assert classify(form).is_extremal == (max_abs(s * (1 - s)) < 1e-8)


@given(SEEDS)
def test_quotient_reproduces_form(seed):
    rng = rng_for(seed)
    form = random_form(rng, 7, n_center=1, kernel_dim=2)
    ratio = ratio_operator(form)
    assert ratio.rank == 5
    # every basis pair (x, y): S(x, y) = ([x] | M [y])
    assert max_abs(ratio.to_form(ratio.M) - form.S) < 1e-10


def test_direct_sum_blocks(mu03):
    other = make_form(1, [[2.0]])
    total = direct_sum([mu03, other])
    assert total.n == 3
    assert np.allclose(total.S[:2, :2], mu03.S)
    assert np.allclose(total.S[2:, 2:], other.S)
    assert np.allclose(total.S[:2, 2:], 0)


def test_pullback_definition(mu03):
    G = np.array([[1.0, 2.0], [0.0, 1.0]])
    x, y = np.array([1.0, -1.0]), np.array([0.5, 2.0])
    pulled = pullback(mu03, G)
    assert np.isclose(x @ pulled.S @ y, (G @ x) @ mu03.S @ (G @ y))
