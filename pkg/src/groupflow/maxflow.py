"""Push-relabel maximum flow with highest-active selection, gap and global
relabeling heuristics, warm restarts, and min-cut extraction.

Capacities are real-valued; all saturation tests use a per-instance
tolerance eps = 1e-10 * (1 + max finite capacity). The discharge kernel
operates on flat arrays and is JIT-compiled with numba when available.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import InvalidWarmStart, NotMaximal
from .graph import FlowNetwork

try:
    from numba import njit as _njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    _njit = None

_USE_NUMBA = _njit is not None and not os.environ.get("GROUPFLOW_PURE_PY")


def _maybe_jit(fn):
    if _USE_NUMBA:
        return _njit(cache=True)(fn)
    return fn


def _bfs_heights(src, adj_start, adj_arc, rhead, res, eps, dist, queue):
    """BFS distances *to* src along residual arcs (reverse traversal)."""
    dist[src] = 0
    queue[0] = src
    qh, qt = 0, 1
    while qh < qt:
        v = queue[qh]
        qh += 1
        dv = dist[v]
        for idx in range(adj_start[v], adj_start[v + 1]):
            a = adj_arc[idx]
            w = rhead[a]
            if dist[w] < 0 and res[a ^ 1] > eps:
                dist[w] = dv + 1
                queue[qt] = w
                qt += 1


_bfs_heights = _maybe_jit(_bfs_heights)


def _rebuild_labels(n, s, t, adj_start, adj_arc, rhead, res, eps, excess,
                    height, counts, bhead, bnext, bprev, inb, cur,
                    dist_t, dist_s, queue):
    """Global relabeling: exact residual distances, bucket rebuild.

    Nodes that cannot reach t are labeled n + (distance to s) so their
    excess drains back to the source. Returns the highest active level.
    """
    for v in range(n):
        dist_t[v] = -1
        dist_s[v] = -1
    _bfs_heights(t, adj_start, adj_arc, rhead, res, eps, dist_t, queue)
    _bfs_heights(s, adj_start, adj_arc, rhead, res, eps, dist_s, queue)
    top = 2 * n
    for h in range(top + 2):
        counts[h] = 0
        bhead[h] = -1
    hi = -1
    for v in range(n):
        if v == s:
            height[v] = n
            continue
        if dist_t[v] >= 0:
            h = dist_t[v]
        elif dist_s[v] >= 0:
            h = n + dist_s[v]
        else:
            h = top
        height[v] = h
        counts[h] += 1
        inb[v] = False
        cur[v] = adj_start[v]
        if v != t and excess[v] > eps and h < top:
            bnext[v] = bhead[h]
            bprev[v] = -1
            if bhead[h] >= 0:
                bprev[bhead[h]] = v
            bhead[h] = v
            inb[v] = True
            if h > hi:
                hi = h
    return hi


_rebuild_labels = _maybe_jit(_rebuild_labels)


def _discharge_loop(n, s, t, adj_start, adj_arc, rhead, res, excess, height,
                    eps, global_freq):
    """Highest-active push-relabel main loop; runs the preflow to a flow."""
    top = 2 * n
    counts = np.zeros(top + 2, dtype=np.int64)
    bhead = np.full(top + 2, -1, dtype=np.int64)
    bnext = np.full(n, -1, dtype=np.int64)
    bprev = np.full(n, -1, dtype=np.int64)
    inb = np.zeros(n, dtype=np.bool_)
    cur = adj_start[:n].copy()
    dist_t = np.empty(n, dtype=np.int64)
    dist_s = np.empty(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)

    pushes = 0
    relabels = 0
    n_global = 0
    n_gap = 0
    since_global = 0

    hi = _rebuild_labels(n, s, t, adj_start, adj_arc, rhead, res, eps, excess,
                         height, counts, bhead, bnext, bprev, inb, cur,
                         dist_t, dist_s, queue)
    n_global += 1

    while hi >= 0:
        v = bhead[hi]
        if v < 0:
            hi -= 1
            continue
        bhead[hi] = bnext[v]
        if bnext[v] >= 0:
            bprev[bnext[v]] = -1
        inb[v] = False

        e = excess[v]
        start = adj_start[v]
        end = adj_start[v + 1]
        ci = cur[v]
        need_global = False
        while e > eps:
            if ci == end:
                oldh = height[v]
                minh = top + 2
                for idx in range(start, end):
                    a = adj_arc[idx]
                    if res[a] > eps:
                        hh = height[rhead[a]]
                        if hh < minh:
                            minh = hh
                if minh >= top + 2:
                    # isolated in the residual graph; park the node
                    counts[oldh] -= 1
                    height[v] = top
                    counts[top] += 1
                    break
                newh = minh + 1
                relabels += 1
                since_global += 1
                counts[oldh] -= 1
                if counts[oldh] == 0 and oldh < n:
                    # gap: every node strictly above oldh (below n) lost its
                    # last path to t through this level. Lift them past n so
                    # their excess routes back to the source.
                    n_gap += 1
                    for u in range(n):
                        if u != s and u != t and oldh < height[u] < n:
                            hu = height[u]
                            counts[hu] -= 1
                            if inb[u]:
                                if bprev[u] >= 0:
                                    bnext[bprev[u]] = bnext[u]
                                else:
                                    bhead[hu] = bnext[u]
                                if bnext[u] >= 0:
                                    bprev[bnext[u]] = bprev[u]
                            height[u] = n + 1
                            counts[n + 1] += 1
                            cur[u] = adj_start[u]
                            if inb[u]:
                                bnext[u] = bhead[n + 1]
                                bprev[u] = -1
                                if bhead[n + 1] >= 0:
                                    bprev[bhead[n + 1]] = u
                                bhead[n + 1] = u
                    if hi < n + 1:
                        hi = n + 1
                    if newh < n + 1:
                        newh = n + 1
                height[v] = newh if newh <= top else top
                counts[height[v]] += 1
                ci = start
                cur[v] = ci
                if since_global >= global_freq:
                    excess[v] = e
                    hi = _rebuild_labels(n, s, t, adj_start, adj_arc, rhead,
                                         res, eps, excess, height, counts,
                                         bhead, bnext, bprev, inb, cur,
                                         dist_t, dist_s, queue)
                    n_global += 1
                    since_global = 0
                    need_global = True
                    break
                if height[v] >= top:
                    break
                continue
            a = adj_arc[ci]
            if res[a] > eps:
                w = rhead[a]
                if height[v] == height[w] + 1:
                    delta = e if e < res[a] else res[a]
                    res[a] -= delta
                    res[a ^ 1] += delta
                    e -= delta
                    excess[w] += delta
                    pushes += 1
                    if w != s and w != t and not inb[w] and excess[w] > eps:
                        hw = height[w]
                        bnext[w] = bhead[hw]
                        bprev[w] = -1
                        if bhead[hw] >= 0:
                            bprev[bhead[hw]] = w
                        bhead[hw] = w
                        inb[w] = True
                        if hw > hi:
                            hi = hw
                    continue
            ci += 1
        if need_global:
            continue
        excess[v] = e
        cur[v] = ci
        if e > eps and height[v] < top:
            h = height[v]
            bnext[v] = bhead[h]
            bprev[v] = -1
            if bhead[h] >= 0:
                bprev[bhead[h]] = v
            bhead[h] = v
            inb[v] = True
            if h > hi:
                hi = h
    return pushes, relabels, n_global, n_gap


_discharge_loop = _maybe_jit(_discharge_loop)


@dataclass
class FlowState:
    """Result of a max-flow solve: per-arc flow plus solver internals."""

    flow: np.ndarray          # per forward arc, aligned with net.tail/head
    excess: np.ndarray        # per node; ~0 everywhere except s and t
    height: np.ndarray
    value: float
    eps: float
    pushes: int
    relabels: int
    global_relabels: int
    gap_events: int
    res: np.ndarray           # residual array, 2 entries per arc
    cap_eff: np.ndarray       # capacities used, infinities materialized


@dataclass
class MinCut:
    """s-t cut: source_side[v] is True for nodes residual-reachable from s."""

    source_side: np.ndarray
    capacity: float


def flow_tolerance(cap_eff: np.ndarray) -> float:
    finite = cap_eff[np.isfinite(cap_eff)]
    top = finite.max() if len(finite) else 0.0
    return 1e-10 * (1.0 + top)


def effective_capacities(net: FlowNetwork,
                         source_caps: np.ndarray | None = None,
                         sink_caps: np.ndarray | None = None) -> np.ndarray:
    """Apply per-call capacity overrides and materialize infinities."""
    cap = net.cap.copy()
    if source_caps is not None:
        cap[net.source_arc] = source_caps
    if sink_caps is not None:
        cap[net.sink_arc] = sink_caps
    inf_mask = ~np.isfinite(cap)
    if inf_mask.any():
        sentinel = cap[~inf_mask].sum() + 1.0
        cap[inf_mask] = sentinel
    return cap


def _topo_order(net: FlowNetwork) -> np.ndarray:
    """Topological order of internal nodes (the network is a layered DAG)."""
    n_inner = net.n_vars + net.n_groups
    indeg = np.zeros(n_inner, dtype=np.int64)
    succ: list[list[int]] = [[] for _ in range(n_inner)]
    for u, v in zip(net.tail, net.head):
        if u < n_inner and v < n_inner:
            succ[int(u)].append(int(v))
            indeg[v] += 1
    order = [v for v in range(n_inner) if indeg[v] == 0]
    i = 0
    while i < len(order):
        for w in succ[order[i]]:
            indeg[w] -= 1
            if indeg[w] == 0:
                order.append(w)
        i += 1
    return np.array(order, dtype=np.int64)


def _repair_preflow(net: FlowNetwork, flow: np.ndarray, excess: np.ndarray,
                    eps: float) -> None:
    """Restore nonnegative excess after capacity clamping shrank inflows.

    Walks internal nodes in topological order and reduces outgoing flows
    wherever a node sends more than it receives.
    """
    out_arcs: list[list[int]] = [[] for _ in range(net.n_nodes)]
    for i, u in enumerate(net.tail):
        out_arcs[int(u)].append(i)
    for v in _topo_order(net):
        deficit = -excess[v]
        if deficit <= eps:
            continue
        for i in out_arcs[int(v)]:
            if deficit <= 0:
                break
            cut = min(flow[i], deficit)
            flow[i] -= cut
            excess[v] += cut
            excess[net.head[i]] -= cut
            deficit -= cut


def max_flow(net: FlowNetwork,
             warm: FlowState | np.ndarray | None = None,
             source_caps: np.ndarray | None = None,
             sink_caps: np.ndarray | None = None,
             global_freq: int | None = None) -> FlowState:
    """Compute a maximum s-t flow; optionally warm-start from a prior flow.

    A warm start must respect the (possibly overridden) capacities up to
    eps; flows are then reconciled into a valid preflow, source arcs are
    saturated, and heights are rebuilt from scratch.
    """
    cap_eff = effective_capacities(net, source_caps, sink_caps)
    eps = flow_tolerance(cap_eff)
    n, m = net.n_nodes, net.n_arcs

    if warm is None:
        flow0 = np.zeros(m, dtype=float)
    else:
        flow0 = np.array(warm.flow if isinstance(warm, FlowState) else warm,
                         dtype=float)
        if flow0.shape != (m,):
            raise InvalidWarmStart(f"warm flow has shape {flow0.shape}, want ({m},)")
        if (flow0 < -eps).any() or (flow0 > cap_eff + eps).any():
            raise InvalidWarmStart("warm flow violates arc capacities")
        np.clip(flow0, 0.0, cap_eff, out=flow0)

    # preflow initialization: saturate every source arc
    flow0[net.source_arc] = cap_eff[net.source_arc]

    excess = np.zeros(n, dtype=float)
    np.add.at(excess, net.head, flow0)
    np.add.at(excess, net.tail, -flow0)
    if (excess[: n - 2] < -eps).any():
        _repair_preflow(net, flow0, excess, eps)

    res = np.empty(2 * m, dtype=float)
    res[0::2] = cap_eff - flow0
    res[1::2] = flow0

    adj_start, adj_arc = net.adjacency()
    rhead = net.residual_heads()
    height = np.zeros(n, dtype=np.int64)
    if global_freq is None:
        global_freq = max(n, 16)

    pushes, relabels, n_global, n_gap = _discharge_loop(
        n, net.s, net.t, adj_start, adj_arc, rhead, res, excess, height,
        eps, global_freq)

    flow = res[1::2].copy()
    return FlowState(
        flow=flow,
        excess=excess,
        height=height,
        value=float(excess[net.t]),
        eps=eps,
        pushes=int(pushes),
        relabels=int(relabels),
        global_relabels=int(n_global),
        gap_events=int(n_gap),
        res=res,
        cap_eff=cap_eff,
    )


def min_cut(net: FlowNetwork, state: FlowState) -> MinCut:
    """Canonical minimum s-t cut: source side = residual-reachable from s."""
    res = state.res
    eps = state.eps
    fwd_ok = res[0::2] > eps  # tail -> head traversable
    rev_ok = res[1::2] > eps  # head -> tail traversable

    reachable = np.zeros(net.n_nodes, dtype=bool)
    reachable[net.s] = True
    n_reached = 1
    while True:
        reachable[net.head[fwd_ok & reachable[net.tail]]] = True
        reachable[net.tail[rev_ok & reachable[net.head]]] = True
        total = int(reachable.sum())
        if total == n_reached:
            break
        n_reached = total
    if reachable[net.t]:
        raise NotMaximal("t is residual-reachable from s; flow is not maximum")

    crossing = reachable[net.tail] & ~reachable[net.head]
    capacity = float(state.cap_eff[crossing].sum())
    return MinCut(source_side=reachable, capacity=capacity)
