import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groupflow import project_l1_box
from groupflow.oracle import project_l1_box_oracle

finite_floats = st.floats(0.0, 10.0, allow_nan=False, allow_infinity=False)


def test_simplex_example():
    out = project_l1_box(np.array([0.5, 0.5, 0.5]), 0.3)
    np.testing.assert_allclose(out, [0.1, 0.1, 0.1], atol=1e-12)


def test_inactive_constraint_is_identity():
    out = project_l1_box(np.array([0.1, 0.1]), 1.0)
    np.testing.assert_allclose(out, [0.1, 0.1], atol=0)


def test_box_clamp_makes_sum_feasible():
    out = project_l1_box(np.array([1.0, 0.2]), 0.9, box=np.array([0.5, np.inf]))
    np.testing.assert_allclose(out, [0.5, 0.2], atol=1e-12)


def test_zero_radius():
    out = project_l1_box(np.array([0.3, 0.7]), 0.0)
    np.testing.assert_allclose(out, [0.0, 0.0], atol=0)


def test_tight_box_everywhere():
    out = project_l1_box(np.array([1.0, 1.0, 1.0]), 10.0,
                         box=np.array([0.25, 0.25, 0.25]))
    np.testing.assert_allclose(out, [0.25, 0.25, 0.25], atol=1e-12)


def test_matches_oracle_on_random_inputs():
    rng = np.random.default_rng(0)
    for _ in range(300):
        n = int(rng.integers(1, 40))
        u = rng.uniform(-0.2, 1.5, n)
        box = rng.uniform(0.0, 1.0, n)
        box[rng.random(n) < 0.3] = np.inf
        radius = float(rng.uniform(0.0, 0.7 * n))
        got = project_l1_box(u, radius, box, rng=rng)
        want = project_l1_box_oracle(u, radius, box)
        np.testing.assert_allclose(got, want, atol=1e-10)


@settings(max_examples=80, deadline=None)
@given(u=st.lists(finite_floats, min_size=1, max_size=20),
       radius=st.floats(0.0, 30.0))
def test_feasibility_and_optimality(u, radius):
    u = np.array(u)
    out = project_l1_box(u, radius)
    assert np.all(out >= 0)
    assert out.sum() <= radius + 1e-8 * (1 + radius)
    want = project_l1_box_oracle(u, radius)
    obj = 0.5 * np.sum((u - out) ** 2)
    obj_oracle = 0.5 * np.sum((u - want) ** 2)
    assert obj <= obj_oracle + 1e-8 * (1 + obj_oracle)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 100_000))
def test_matches_oracle_with_boxes(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 25))
    u = rng.uniform(0.0, 2.0, n)
    box = np.where(rng.random(n) < 0.5, rng.uniform(0.1, 1.0, n), np.inf)
    radius = float(rng.uniform(0.0, n))
    got = project_l1_box(u, radius, box, rng=rng)
    want = project_l1_box_oracle(u, radius, box)
    np.testing.assert_allclose(got, want, atol=1e-10)


def test_result_independent_of_rng():
    u = np.array([0.9, 0.3, 0.8, 0.1, 0.5])
    a = project_l1_box(u, 1.0, rng=np.random.default_rng(1))
    b = project_l1_box(u, 1.0, rng=np.random.default_rng(999))
    np.testing.assert_allclose(a, b, atol=1e-12)
