"""Independent brute-force references for tests and acceptance runs.

Nothing here shares code with the modules it checks: the prox reference is
block-coordinate descent on the dense dual, the max-flow reference is
shortest augmenting paths, the dual-norm reference is bisection over the
scale parameter, and the projection reference sorts breakpoints.
"""

from __future__ import annotations

import numpy as np

from .errors import ToleranceNotReached
from .groups import GroupStructure


def project_l1_box_oracle(targets: np.ndarray, radius: float,
                          box: np.ndarray | None = None) -> np.ndarray:
    """Sort-based projection onto {0 <= g <= box, sum g <= radius}."""
    u = np.asarray(targets, dtype=float)
    b = np.full(len(u), np.inf) if box is None else np.asarray(box, dtype=float)
    base = np.clip(u, 0.0, b)
    if base.sum() <= radius:
        return base

    def shrink(tau: float) -> np.ndarray:
        return np.clip(u - tau, 0.0, b)

    # S(tau) = sum(shrink(tau)) is piecewise linear and nonincreasing
    bps = np.concatenate([u, (u - b)[np.isfinite(b)]])
    bps = np.unique(np.concatenate([bps[bps > 0], [0.0]]))
    sums = np.array([shrink(tau).sum() for tau in bps])
    k = int(np.searchsorted(-sums, -radius))  # first bp with S(bp) <= radius
    if k == 0:
        return shrink(bps[0])
    lo, hi = bps[k - 1], bps[k]
    s_lo, s_hi = sums[k - 1], sums[k]
    if s_lo == s_hi:
        return shrink(lo)
    tau = lo + (s_lo - radius) * (hi - lo) / (s_lo - s_hi)
    return shrink(tau)


def _project_simplex_leq(z: np.ndarray, radius: float) -> np.ndarray:
    """Projection onto {v >= 0, sum v <= radius}, sort-based."""
    zp = np.clip(z, 0.0, None)
    if zp.sum() <= radius:
        return zp
    zs = np.sort(z)[::-1]
    css = np.cumsum(zs)
    ks = np.arange(1, len(z) + 1)
    cond = zs - (css - radius) / ks > 0
    rho = int(np.nonzero(cond)[0].max()) + 1
    tau = (css[rho - 1] - radius) / rho
    return np.clip(z - tau, 0.0, None)


def prox_oracle(u: np.ndarray, gs: GroupStructure, lam: float,
                tol: float = 1e-12, max_sweeps: int = 200_000) -> np.ndarray:
    """Reference prox via block-coordinate descent on the dense dual.

    Cycles over groups projecting each block onto its scaled simplex until
    the objective decrease over a full sweep falls below tol**0.5 * tol**0.5
    (i.e. tol), all in the sign-flipped nonnegative domain.
    """
    u = np.asarray(u, dtype=float)
    sign = np.where(u < 0, -1.0, 1.0)
    a = np.abs(u)
    m = gs.n_groups
    xi = np.zeros((m, gs.p))
    members = [np.array(g.members, dtype=int) for g in gs.groups]
    r = a.copy()  # residual a - sum_g xi^g

    if lam == 0.0:
        return u.copy()

    prev_obj = 0.5 * np.dot(r, r)
    for _ in range(max_sweeps):
        for k in range(m):
            idx = members[k]
            z = r[idx] + xi[k, idx]
            v = _project_simplex_leq(z, lam * gs.groups[k].weight)
            r[idx] = z - v
            xi[k, idx] = v
        obj = 0.5 * np.dot(r, r)
        assert obj <= prev_obj + 1e-12, "dual objective must not increase"
        if prev_obj - obj < tol:
            return sign * r
        prev_obj = obj
    raise ToleranceNotReached(f"prox oracle did not reach tol={tol}")


def maxflow_oracle(n_nodes: int, s: int, t: int, tail: np.ndarray,
                   head: np.ndarray, cap: np.ndarray) -> float:
    """Shortest-augmenting-path (BFS) max-flow value on real capacities."""
    cap = np.asarray(cap, dtype=float)
    finite = cap[np.isfinite(cap)]
    sentinel = (finite.sum() if len(finite) else 0.0) + 1.0
    res = np.where(np.isfinite(cap), cap, sentinel)
    eps = 1e-12 * (1.0 + (res.max() if len(res) else 0.0))

    m = len(tail)
    adj: list[list[tuple[int, int, int]]] = [[] for _ in range(n_nodes)]
    resid = np.concatenate([res, np.zeros(m)])
    for i in range(m):
        adj[int(tail[i])].append((int(head[i]), i, i + m))
        adj[int(head[i])].append((int(tail[i]), i + m, i))

    value = 0.0
    while True:
        parent_arc = np.full(n_nodes, -1, dtype=np.int64)
        parent = np.full(n_nodes, -1, dtype=np.int64)
        parent[s] = s
        queue = [s]
        qi = 0
        while qi < len(queue) and parent[t] < 0:
            v = queue[qi]
            qi += 1
            for w, a, _ in adj[v]:
                if parent[w] < 0 and resid[a] > eps:
                    parent[w] = v
                    parent_arc[w] = a
                    queue.append(w)
        if parent[t] < 0:
            return value
        # bottleneck along the path
        delta = np.inf
        v = t
        while v != s:
            delta = min(delta, resid[parent_arc[v]])
            v = parent[v]
        v = t
        while v != s:
            a = parent_arc[v]
            resid[a] -= delta
            resid[a + m if a < m else a - m] += delta
            v = parent[v]
        value += delta


def dualnorm_oracle(kappa: np.ndarray, gs: GroupStructure,
                    tol: float = 1e-11) -> float:
    """Bisection on the scale parameter with a feasibility max-flow per step."""
    a = np.abs(np.asarray(kappa, dtype=float))
    total = a.sum()
    if total == 0.0:
        return 0.0
    p, m = gs.p, gs.n_groups
    eta = gs.weights()
    covered = np.zeros(p, dtype=bool)
    for g in gs.groups:
        covered[list(g.members)] = True
    if (a[~covered] > 0).any():
        return np.inf

    s, t = p + m, p + m + 1
    tails, heads, caps = [], [], []
    for k, g in enumerate(gs.groups):
        tails.append(s)
        heads.append(p + k)
        caps.append(0.0)  # set per candidate tau
    for k, g in enumerate(gs.groups):
        for j in g.members:
            tails.append(p + k)
            heads.append(j)
            caps.append(np.inf)
    for j in range(p):
        tails.append(j)
        heads.append(t)
        caps.append(a[j])
    tails = np.array(tails)
    heads = np.array(heads)
    caps = np.array(caps)

    def feasible(tau: float) -> bool:
        caps[:m] = tau * eta
        value = maxflow_oracle(p + m + 2, s, t, tails, heads, caps)
        return value >= total - 1e-11 * (1.0 + total)

    lo, hi = 0.0, total / eta.min()
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def least_squares_oracle(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Normal-equations solution for the unpenalized problem."""
    return np.linalg.lstsq(X, y, rcond=None)[0]
