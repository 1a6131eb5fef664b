import numpy as np
import pytest
from hypothesis import given, strategies as st

from ccrflow.errors import BoundarySpectrum, CenterNotFree, NonPositiveR
from ccrflow.flow import (
    extremality_residual,
    flow,
    flow_operator,
    flow_trajectory,
    freeze_limit,
    generator,
    kms_rescaling_check,
    one_particle_group,
    quotient_sigma,
    semigroup_check,
)
from ccrflow.sampling import (
    form_from_modes,
    random_extremal_form,
    random_form,
    random_symplectic,
    rng_for,
)
from ccrflow.starlinalg import classify, direct_sum, make_form, normal_form, pullback, ratio_operator

from conftest import max_abs

SEEDS = st.integers(0, 2**32 - 1)


def test_r_one_is_identity():
    form = random_form(rng_for(1), 5, n_center=1)
    assert max_abs(flow(form, 1.0).form.S - form.S) < 1e-12


def test_real_form_scales_by_one_over_r():
    rng = rng_for(2)
    X = rng.normal(size=(3, 3))
    form = make_form(3, X @ X.T)
    for r in (0.3, 2.0, 9.0):
        assert max_abs(flow(form, r).form.S - form.S / r) < 1e-12


@pytest.mark.parametrize("r", [0.0, -1.0, np.inf, np.nan])
def test_bad_r(mu03, r):
    with pytest.raises(NonPositiveR):
        flow(mu03, r)


def test_single_mode_r2(mu03):
    s = np.sort(ratio_operator(flow(mu03, 2.0).form).eigenvalues)
    assert np.allclose(s, [1 / 17, 16 / 17], atol=1e-14)


def test_semigroup_examples(mu03):
    assert semigroup_check(mu03, 1.0, 1.0) < 1e-15
    assert semigroup_check(mu03, 2.0, 3.0) < 1e-10
    form = random_form(rng_for(3), 6)
    assert semigroup_check(form, 0.5, 4.0) < 1e-8


@given(SEEDS, st.floats(0.2, 5), st.floats(0.2, 5))
def test_semigroup_property(seed, a, b):
    form = random_form(rng_for(seed), 6, n_center=2, kernel_dim=0)
    assert semigroup_check(form, a, b) < 1e-8


@given(SEEDS)
def test_imaginary_part_conserved(seed):
    form = random_form(rng_for(seed), 5, n_center=1)
    for r in (0.1, 0.5, 1.0, 2.0, 10.0):
        assert max_abs(flow(form, r).form.sigma - form.sigma) < 1e-9


def _h(x, r):
    return (1 - x) * (1 + x**r) / ((1 + x) * (1 - x**r))


@given(SEEDS, st.floats(0.1, 10))
def test_real_part_equivalence(seed, r):
    form = random_form(rng_for(seed), 4, mu_range=(0.01, 0.49))
    ratio = ratio_operator(form)
    s = ratio.eigenvalues
    x = (1 - s) / s
    R = form.real_part
    d, U = np.linalg.eigh(R)
    Rm = (U / np.sqrt(d)) @ U.T
    rel = np.linalg.eigvalsh(Rm @ flow(form, r).form.real_part @ Rm)
    hx = _h(x, r)
    assert rel.min() >= hx.min() * (1 - 1e-9)
    assert rel.max() <= hx.max() * (1 + 1e-9)
    # the relative eigenvalues are exactly h over the spectrum
    assert np.allclose(np.sort(rel), np.sort(hx), rtol=1e-9)


def test_fixed_points_iff_extremal():
    for k in range(20):
        rng = rng_for(30, k)
        ext = random_extremal_form(rng, 4)
        gen = random_form(rng, 4, mu_range=(0.05, 0.45))
        assert classify(ext).is_extremal and not classify(gen).is_extremal
        for r in (0.5, 2.0, 7.0):
            assert max_abs(flow(ext, r).form.S - ext.S) < 1e-10
            assert max_abs(flow(gen, r).form.S - gen.S) > 1e-4


def test_freeze_limit_single_mode(mu03):
    lim = freeze_limit(mu03)
    assert np.allclose(sorted(ratio_operator(lim).eigenvalues), [0.0, 1.0], atol=1e-14)
    assert np.allclose(np.linalg.eigvalsh(lim.S), [0.0, 0.6], atol=1e-14)


def test_freeze_limit_of_extremal_is_itself():
    form = random_extremal_form(rng_for(9), 4)
    assert max_abs(freeze_limit(form).S - form.S) < 1e-12


def test_freeze_limit_of_real_form_is_zero():
    assert max_abs(freeze_limit(make_form(2, np.eye(2))).S) == 0


def test_trajectory_single_mode(mu03):
    tr = flow_trajectory(mu03, [1, 2, 4, 8, 16, 32])
    d = tr.distances
    assert np.all(np.diff(d[:5]) < 0)
    assert tr.distance_decreasing and tr.loewner_decreasing
    assert d[-1] < 1e-12


def test_trajectory_single_point(mu03):
    tr = flow_trajectory(mu03, [1.0])
    assert len(tr.rows) == 1
    assert np.isclose(tr.rows[0].dist_to_limit, np.linalg.norm(mu03.S - freeze_limit(mu03).S))


def test_trajectory_high_temperature_growth():
    form = random_form(rng_for(12), 4, mu_range=(0.05, 0.45))
    tr = flow_trajectory(form, [0.01, 0.1])
    # the grid is ascending, so the r = 0.01 row must carry the larger eigenvalue
    assert tr.rows[0].lambda_max > tr.rows[1].lambda_max


def test_trajectory_rejects_bad_grids(mu03):
    with pytest.raises(ValueError):
        flow_trajectory(mu03, [2, 1])
    with pytest.raises(ValueError):
        flow_trajectory(mu03, [])
    with pytest.raises(NonPositiveR):
        flow_trajectory(mu03, [0, 1])


@given(SEEDS)
def test_loewner_monotone_along_grid(seed):
    form = random_form(rng_for(seed), 6, n_center=2)
    ratio = ratio_operator(form)
    grid = np.geomspace(0.1, 100, 12)
    ops = [flow_operator(ratio, r) for r in grid]
    for a, b in zip(ops, ops[1:]):
        assert np.linalg.eigvalsh(a - b)[0] > -1e-9


def test_extremality_residual_along_flow(mu03):
    res = [extremality_residual(flow(mu03, r).form) for r in (1, 4, 16)]
    assert res[0] == pytest.approx(0.16)
    assert res[0] > res[1] > res[2]


@given(SEEDS, st.floats(0.2, 5))
def test_direct_sums(seed, r):
    rng = rng_for(seed)
    a, b = random_form(rng, 2), random_form(rng, 3, n_center=1)
    lhs = flow(direct_sum([a, b]), r).form.S
    rhs = direct_sum([flow(a, r).form, flow(b, r).form]).S
    assert max_abs(lhs - rhs) < 1e-10


@given(SEEDS, st.floats(0.2, 5))
def test_aut_equivariance(seed, r):
    rng = rng_for(seed)
    form = random_form(rng, 4, mu_range=(0.05, 0.45))
    G = random_symplectic(form.sigma, rng, scale=0.3)
    assert max_abs(G.T @ form.sigma @ G - form.sigma) < 1e-10
    lhs = flow(pullback(form, G), r).form.S
    rhs = pullback(flow(form, r).form, G).S
    assert max_abs(lhs - rhs) < 1e-8 * max(1.0, max_abs(rhs))


@given(SEEDS, st.floats(-2, 2), st.floats(0.2, 2), st.floats(0.2, 5))
def test_pullback_commuting_with_ratio(seed, b, a, r):
    """If ``G`` commutes with the ratio operator, pulling back commutes with the flow."""
    form = random_form(rng_for(seed), 4, mu_range=(0.05, 0.45))
    nf = normal_form(form)
    B, Binv = nf.B, np.linalg.inv(nf.B)
    A = nf.canonical_sigma()
    G = B @ (a * np.eye(4) + b * A) @ Binv  # real polynomial in the ratio operator
    lhs = flow(pullback(form, G), r).form.S
    rhs = pullback(flow(form, r).form, G).S
    assert max_abs(lhs - rhs) < 1e-8 * max(1.0, max_abs(rhs))


# -- generator and dynamics ---------------------------------------------------


def test_generator_single_mode(mu03):
    h = generator(mu03).h
    assert np.allclose(np.linalg.eigvalsh(h), [-np.log(4), np.log(4)])


def test_generator_real_form_is_zero():
    assert max_abs(generator(make_form(2, np.eye(2))).h) < 1e-15


def test_generator_boundary():
    with pytest.raises(BoundarySpectrum):
        generator(make_form(2, np.array([[1, 1j], [-1j, 1]])))


def test_kms_examples(mu03):
    ratio = ratio_operator(flow(mu03, 2.0).form)
    assert np.isclose(ratio.eigenvalues.max(), 16 / 17)
    assert kms_rescaling_check(mu03, 1.0) < 1e-14
    form = random_form(rng_for(4), 4, mu_range=(0.01, 0.45))
    assert kms_rescaling_check(form, 0.5) < 1e-8


def test_kms_needs_center_free():
    with pytest.raises(CenterNotFree):
        kms_rescaling_check(form_from_modes([0.3], n_center=1), 2.0)


def test_one_particle_group(mu03):
    assert max_abs(one_particle_group(mu03, 0.0) - np.eye(2)) < 1e-15
    t = 0.7
    U = one_particle_group(mu03, t)
    ratio = ratio_operator(mu03)
    lam, V = np.linalg.eigh(ratio.M - 0.5 * np.eye(2))
    # U acts as exp(i t h) with h = -log 4 on the +0.3 eigenvector of M - 1/2
    for val, v in zip(lam, V.T):
        expected = np.exp(1j * t * (-np.sign(val)) * np.log(4))
        assert np.allclose(U @ v, expected * v)


def test_sigma_invariance():
    for k in range(20):
        rng = rng_for(50, k)
        form = random_form(rng, 4, mu_range=(0.01, 0.45))
        U = one_particle_group(form, rng.uniform(-5, 5))
        A = quotient_sigma(ratio_operator(form))
        assert max_abs(U.conj().T @ A @ U - A) < 1e-10
        assert max_abs(U.imag) < 1e-10
