import numpy as np
import pytest

from groupflow import InvalidKind, generate_synthetic, make_structure


def test_deterministic_given_seed():
    a_prob, a_w = generate_synthetic(20, 30, "gaussian", seed=5)
    b_prob, b_w = generate_synthetic(20, 30, "gaussian", seed=5)
    np.testing.assert_array_equal(a_prob.X, b_prob.X)
    np.testing.assert_array_equal(a_prob.y, b_prob.y)
    np.testing.assert_array_equal(a_w, b_w)
    assert a_prob.lam == b_prob.lam


def test_seeds_differ():
    a_prob, _ = generate_synthetic(20, 30, "gaussian", seed=5)
    b_prob, _ = generate_synthetic(20, 30, "gaussian", seed=6)
    assert not np.array_equal(a_prob.y, b_prob.y)


@pytest.mark.parametrize("kind,n,p", [("dct-1d", 20, 50),
                                      ("dct-2d", 16, 36),
                                      ("gaussian", 20, 50)])
def test_shapes_and_unit_columns(kind, n, p):
    prob, w = generate_synthetic(n, p, kind, seed=0)
    assert prob.X.shape == (n, p)
    assert prob.y.shape == (n,)
    assert w.shape == (p,)
    np.testing.assert_allclose(np.linalg.norm(prob.X, axis=0), 1.0, atol=1e-12)
    assert prob.lam > 0


def test_unknown_kind():
    with pytest.raises(InvalidKind):
        generate_synthetic(10, 10, "wavelet")


def test_dct_2d_needs_square_sizes():
    with pytest.raises(InvalidKind):
        generate_synthetic(16, 35, "dct-2d")


def test_support_is_union_of_groups_near_target():
    prob, w = generate_synthetic(50, 200, "dct-1d", seed=1)
    support = set(np.nonzero(w)[0])
    frac = len(support) / 200
    assert 0.10 <= frac <= 0.40
    # support decomposes into whole groups of the structure
    covered = set()
    for g in prob.gs.groups:
        if set(g.members) <= support:
            covered |= set(g.members)
    assert covered == support


def test_noise_scaling():
    quiet, w = generate_synthetic(40, 60, "dct-1d", noise=0.0, seed=2)
    np.testing.assert_allclose(quiet.y, quiet.X @ w, atol=1e-12)
    loud, w2 = generate_synthetic(40, 60, "dct-1d", noise=100.0, seed=2)
    assert np.linalg.norm(loud.y - loud.X @ w2) > \
        np.linalg.norm(quiet.y - quiet.X @ w)


def test_custom_groups_and_lambda():
    gs = make_structure(12, [(1.0, list(range(6))), (1.0, list(range(6, 12)))])
    prob, _ = generate_synthetic(10, 12, "gaussian", seed=3, lam=0.5, gs=gs)
    assert prob.lam == 0.5
    assert prob.gs is gs
