import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groupflow import DimensionMismatch, dual_norm, make_structure, omega, singletons
from groupflow.oracle import dualnorm_oracle
from conftest import random_structure


def test_singletons_dual_of_l1_is_linf():
    gs = singletons(2)
    assert dual_norm(np.array([0.3, -0.7]), gs).tau == pytest.approx(0.7, abs=1e-12)


def test_single_group_dual_of_linf_is_l1():
    gs = make_structure(2, [(1.0, [0, 1])])
    assert dual_norm(np.array([0.3, 0.7]), gs).tau == pytest.approx(1.0, abs=1e-12)


def test_three_variable_overlap():
    gs = make_structure(3, [(1.0, [0, 1]), (1.0, [1, 2])])
    tau = dual_norm(np.array([0.4, 0.6, 0.4]), gs).tau
    assert tau == pytest.approx(0.7, abs=1e-8)


def test_zero_vector():
    gs = singletons(3)
    res = dual_norm(np.zeros(3), gs)
    assert res.tau == 0.0 and res.iterations == 0


def test_uncovered_variable_with_mass_is_infinite():
    gs = make_structure(3, [(1.0, [0, 1])])
    assert math.isinf(dual_norm(np.array([0.1, 0.0, 0.5]), gs).tau)
    assert math.isfinite(dual_norm(np.array([0.1, 0.2, 0.0]), gs).tau)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        dual_norm(np.zeros(4), singletons(3))


def test_omega_value():
    gs = make_structure(3, [(2.0, [0, 1]), (1.0, [1, 2])])
    w = np.array([0.5, -1.0, 0.25])
    assert omega(w, gs) == pytest.approx(2.0 * 1.0 + 1.0 * 1.0)


def test_matches_oracle_random():
    rng = np.random.default_rng(23)
    for _ in range(40):
        gs = random_structure(rng, p_max=12, m_max=5)
        kappa = rng.uniform(-1.0, 1.0, gs.p)
        covered = gs.membership_counts() > 0
        kappa[~covered] = 0.0
        got = dual_norm(kappa, gs).tau
        want = dualnorm_oracle(kappa, gs)
        assert got == pytest.approx(want, abs=1e-8)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 100_000), c=st.floats(0.1, 10.0))
def test_positive_homogeneity(seed, c):
    rng = np.random.default_rng(seed)
    gs = random_structure(rng, p_max=10, m_max=4)
    kappa = rng.uniform(-1.0, 1.0, gs.p)
    kappa[gs.membership_counts() == 0] = 0.0
    base = dual_norm(kappa, gs).tau
    scaled = dual_norm(c * kappa, gs).tau
    assert scaled == pytest.approx(c * base, rel=1e-10, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 100_000))
def test_generalized_cauchy_schwarz(seed):
    # kappa' w <= omega(w) * dual_norm(kappa) for any w
    rng = np.random.default_rng(seed)
    gs = random_structure(rng, p_max=10, m_max=4)
    kappa = rng.uniform(-1.0, 1.0, gs.p)
    kappa[gs.membership_counts() == 0] = 0.0
    w = rng.uniform(-1.0, 1.0, gs.p)
    tau = dual_norm(kappa, gs).tau
    assert float(kappa @ w) <= omega(w, gs) * tau + 1e-9
