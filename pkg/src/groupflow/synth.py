"""Synthetic regression instances with overlapping group structure.

Design matrices come in three flavors: an overcomplete 1-d cosine
dictionary, its 2-d separable analogue, and iid Gaussian columns. The
ground truth is sparse with support equal to a union of groups, and the
observation noise variance scales with the signal energy.
"""

from __future__ import annotations

import math

import numpy as np

from .dualnorm import dual_norm
from .errors import InvalidKind
from .groups import GroupStructure, grid_squares, sliding_windows
from .solver import Problem

KINDS = ("dct-1d", "dct-2d", "gaussian")


def _cosine_dictionary_1d(n: int, p: int) -> np.ndarray:
    # p frequencies evenly covering the band resolvable by n samples
    i = np.arange(n)[:, None] + 0.5
    j = np.arange(p)[None, :]
    X = np.cos(np.pi * i * j / p)
    return X / np.linalg.norm(X, axis=0, keepdims=True)


def _cosine_dictionary_2d(n: int, p: int) -> np.ndarray:
    n1 = math.isqrt(n)
    p1 = math.isqrt(p)
    if n1 * n1 != n or p1 * p1 != p:
        raise InvalidKind("dct-2d needs square n and p")
    A = _cosine_dictionary_1d(n1, p1)
    X = np.einsum("ik,jl->ijkl", A, A).reshape(n, p)
    return X / np.linalg.norm(X, axis=0, keepdims=True)


def default_groups(p: int, kind: str) -> GroupStructure:
    """Unit-weight overlapping groups matched to the dictionary layout."""
    if kind == "dct-2d":
        side = math.isqrt(p)
        return grid_squares(side, side, 3)
    return sliding_windows(p, 3)


def generate_synthetic(n: int, p: int, kind: str, noise: float = 1.0,
                       seed: int = 0, lam: float | None = None,
                       gs: GroupStructure | None = None,
                       target_density: float = 0.2
                       ) -> tuple[Problem, np.ndarray]:
    """Build a (Problem, w_true) pair with group-sparse ground truth.

    The support of w_true is a union of randomly chosen groups grown until
    roughly target_density * p coordinates are active; active entries are
    uniform on [-1, 1]. Noise is iid Gaussian with per-coordinate variance
    noise * 0.01 * ||X w_true||^2 / n. When lam is None it is set to
    0.1 * Omega*(X^T y), which keeps the solution nontrivially sparse.
    """
    if kind not in KINDS:
        raise InvalidKind(f"unknown kind {kind!r}; expected one of {KINDS}")
    rng = np.random.default_rng(seed)

    if kind == "dct-1d":
        X = _cosine_dictionary_1d(n, p)
    elif kind == "dct-2d":
        X = _cosine_dictionary_2d(n, p)
    else:
        X = rng.standard_normal((n, p))
        X /= np.linalg.norm(X, axis=0, keepdims=True)

    if gs is None:
        gs = default_groups(p, kind)

    support = np.zeros(p, dtype=bool)
    order = rng.permutation(gs.n_groups)
    for k in order:
        if support.sum() >= target_density * p:
            break
        support[list(gs.groups[k].members)] = True
    w_true = np.zeros(p)
    w_true[support] = rng.uniform(-1.0, 1.0, size=int(support.sum()))

    signal = X @ w_true
    sigma2 = noise * 0.01 * float(signal @ signal) / n
    y = signal + rng.normal(0.0, math.sqrt(sigma2), size=n)

    if lam is None:
        lam = 0.1 * dual_norm(X.T @ y, gs).tau
    return Problem(X=X, y=y, gs=gs, lam=float(lam)), w_true
