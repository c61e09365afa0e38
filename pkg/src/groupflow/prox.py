"""Proximal operator of weighted overlapping group-linf penalties.

The prox of lam * Omega at u is computed on the flow network: flip signs to
the nonnegative domain, project onto a capped simplex to get candidate sink
capacities, run a max-flow, and if the sink arcs are not all saturated,
split the network along the min-cut and recurse on both sides.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .graph import (
    FlowNetwork,
    build_canonical,
    connected_components,
    simplify_nested,
    subnetwork,
    variable_inflow_caps,
)
from .groups import GroupStructure, validate
from .maxflow import effective_capacities, max_flow, min_cut

EPS_OPT = 1e-8


def project_l1_box(targets: np.ndarray, radius: float,
                   box: np.ndarray | None = None,
                   rng: np.random.Generator | None = None) -> np.ndarray:
    """Project onto {g : 0 <= g <= box, sum g <= radius} in expected
    linear time by randomized pivoting over shrink-threshold breakpoints.

    Solves argmin 0.5 * ||targets - g||^2 over the constraint set for
    nonnegative targets; the minimizer is clip(targets - tau, 0, box) for
    the smallest tau >= 0 making the sum constraint hold.
    """
    u = np.asarray(targets, dtype=float)
    b = np.full(u.shape, np.inf) if box is None else np.asarray(box, dtype=float)
    base = np.clip(u, 0.0, b)
    if base.sum() <= radius:
        return base
    if radius <= 0.0:
        return np.zeros_like(u)

    act = (u > 0) & (b > 0)
    uu = u[act]
    bb = b[act]
    lo, hi = 0.0, float(uu.max())
    capped = 0.0   # sum of box bounds for coords pinned at their box
    const = 0.0    # sum of u_j for coords linear (u_j - tau) on the bracket
    slope = 0.0
    rng = np.random.default_rng(0) if rng is None else rng

    while uu.size:
        lowbp = uu - bb
        cand_u = uu[(uu > lo) & (uu < hi)]
        cand_l = lowbp[(lowbp > lo) & (lowbp < hi)]
        ncand = cand_u.size + cand_l.size
        if ncand == 0:
            break
        k = int(rng.integers(ncand))
        tau = float(cand_u[k]) if k < cand_u.size else float(cand_l[k - cand_u.size])
        s_val = (capped + const - slope * tau
                 + np.minimum(np.maximum(uu - tau, 0.0), bb).sum())
        if s_val > radius:
            lo = tau
        else:
            hi = tau
        drop = uu <= lo
        pinned = lowbp >= hi
        linear = ~(drop | pinned) & (uu >= hi) & (lowbp <= lo)
        capped += bb[pinned].sum()
        const += uu[linear].sum()
        slope += float(linear.sum())
        keep = ~(drop | pinned | linear)
        uu = uu[keep]
        bb = bb[keep]

    if uu.size:
        # no breakpoints left inside (lo, hi): classify the rest directly
        drop = uu <= lo
        pinned = (uu - bb) >= hi
        linear = ~(drop | pinned)
        capped += bb[pinned].sum()
        const += uu[linear].sum()
        slope += float(linear.sum())

    if slope == 0.0:
        tau = hi
    else:
        tau = (capped + const - radius) / slope
        tau = min(max(tau, lo), hi)
    return np.clip(u - tau, 0.0, b)


@dataclass
class ProxOptions:
    box_projection: bool = True
    simplify: bool = True
    keep_group_flows: bool = False
    parallel_components: bool = False


@dataclass
class ProxResult:
    w: np.ndarray           # primal solution, signs restored
    xi_bar: np.ndarray      # nonnegative aggregate sink flows
    depth: int              # maximum recursion depth over components
    splits: int             # total min-cut splits
    residual: float | None  # optimality residual, when group flows retained
    group_flows: np.ndarray | None  # (n_groups, p), flipped domain
    pushes: int = 0
    relabels: int = 0
    global_relabels: int = 0
    gap_events: int = 0


@dataclass
class _Stats:
    depth: int = 0
    splits: int = 0
    pushes: int = 0
    relabels: int = 0
    global_relabels: int = 0
    gap_events: int = 0

    def absorb(self, state) -> None:
        self.pushes += state.pushes
        self.relabels += state.relabels
        self.global_relabels += state.global_relabels
        self.gap_events += state.gap_events


class ProxWorkspace:
    """Reusable prox solver for a fixed group structure.

    Prebuilds the (optionally simplified) network and its connected
    components; consecutive calls warm-start the max-flows from the
    previous solution's preflow. Not safe for concurrent calls.
    """

    def __init__(self, gs: GroupStructure, options: ProxOptions | None = None):
        validate(gs)
        self.gs = gs
        self.options = options or ProxOptions()
        net = build_canonical(gs, lam=1.0)
        if self.options.simplify and not self.options.keep_group_flows:
            net = simplify_nested(net, gs)
        self.net = net
        self.components = connected_components(net)
        self._last_flow = np.zeros(net.n_arcs)
        self._has_warm = False

    def prox(self, u: np.ndarray, lam: float) -> ProxResult:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.gs.p,):
            raise DimensionMismatch(f"u has shape {u.shape}, want ({self.gs.p},)")
        if lam < 0:
            raise ValueError("lambda must be nonnegative")

        opts = self.options
        if lam == 0.0:
            gf = (np.zeros((self.gs.n_groups, self.gs.p))
                  if opts.keep_group_flows else None)
            return ProxResult(w=u.copy(), xi_bar=np.zeros(self.gs.p),
                              depth=0, splits=0,
                              residual=0.0 if opts.keep_group_flows else None,
                              group_flows=gf)

        a = np.abs(u)
        sign = np.where(u < 0, -1.0, 1.0)
        xi_bar = np.zeros(self.gs.p)
        stats = _Stats()

        def solve_component(comp: FlowNetwork) -> tuple[np.ndarray, _Stats]:
            local = _Stats()
            xi = self._compute_flow(comp, a[comp.var_ids], lam, local,
                                    depth=0, use_warm=self._has_warm,
                                    split_budget=comp.n_nodes)
            return xi, local

        if opts.parallel_components and len(self.components) > 1:
            with ThreadPoolExecutor() as pool:
                results = list(pool.map(solve_component, self.components))
        else:
            results = [solve_component(c) for c in self.components]
        for comp, (xi, local) in zip(self.components, results):
            xi_bar[comp.var_ids] = xi
            stats.depth = max(stats.depth, local.depth)
            stats.splits += local.splits
            stats.pushes += local.pushes
            stats.relabels += local.relabels
            stats.global_relabels += local.global_relabels
            stats.gap_events += local.gap_events

        self._has_warm = True
        w = sign * (a - xi_bar)

        group_flows = None
        residual = None
        if opts.keep_group_flows:
            group_flows = self._extract_group_flows()
            result = ProxResult(w=w, xi_bar=xi_bar, depth=stats.depth,
                                splits=stats.splits, residual=None,
                                group_flows=group_flows,
                                pushes=stats.pushes, relabels=stats.relabels,
                                global_relabels=stats.global_relabels,
                                gap_events=stats.gap_events)
            result.residual = check_optimality(u, self.gs, lam, result)
            return result
        return ProxResult(w=w, xi_bar=xi_bar, depth=stats.depth,
                          splits=stats.splits, residual=residual,
                          group_flows=group_flows,
                          pushes=stats.pushes, relabels=stats.relabels,
                          global_relabels=stats.global_relabels,
                          gap_events=stats.gap_events)

    def _compute_flow(self, net: FlowNetwork, a_local: np.ndarray, lam: float,
                      stats: _Stats, depth: int, use_warm: bool,
                      split_budget: int) -> np.ndarray:
        """Recursive flow computation; returns sink flows for net's vars."""
        stats.depth = max(stats.depth, depth)
        if net.n_groups == 0:
            return np.zeros(net.n_vars)

        radius = lam * net.eta.sum()
        box = (variable_inflow_caps(net, lam)
               if self.options.box_projection else None)
        gamma = project_l1_box(a_local, radius, box)
        src = lam * net.eta

        warm = None
        if use_warm:
            cap_eff = effective_capacities(net, src, gamma)
            warm = np.minimum(self._last_flow[net.root_arc], cap_eff)
        state = max_flow(net, warm=warm, source_caps=src, sink_caps=gamma)
        stats.absorb(state)

        xibar = state.flow[net.sink_arc]
        if np.all(np.abs(xibar - gamma) <= state.eps):
            self._last_flow[net.root_arc] = state.flow
            # gamma is the exact relaxed optimum the flow just attained
            return gamma

        cut = min_cut(net, state)
        side = cut.source_side
        n_inner = net.n_vars + net.n_groups
        vplus = side[: net.n_vars]
        gplus = side[net.n_vars : n_inner]
        n_plus = int(vplus.sum() + gplus.sum())
        if n_plus == 0 or n_plus == n_inner:
            raise AssertionError(
                "min-cut split produced an empty side; tolerance bug")
        stats.splits += 1
        if stats.splits > split_budget:
            raise AssertionError(
                f"recursion exceeded {split_budget} splits; must not happen")

        # arcs crossing the cut between internal nodes carry no flow and
        # disappear from both subproblems
        internal = (net.tail < n_inner) & (net.head < n_inner)
        crossing = internal & (side[net.tail] != side[net.head])
        if np.any(crossing & side[net.tail]):
            raise AssertionError("uncapacitated arc from V+ to V- across the cut")
        assert np.all(state.flow[crossing] <= state.eps * net.n_nodes + state.eps)
        state.flow[crossing] = 0.0
        self._last_flow[net.root_arc] = state.flow

        net_plus = subnetwork(net, vplus, gplus)
        net_minus = subnetwork(net, ~vplus, ~gplus)
        out = np.empty(net.n_vars)
        out[vplus] = self._compute_flow(net_plus, a_local[vplus], lam, stats,
                                        depth + 1, True, split_budget)
        out[~vplus] = self._compute_flow(net_minus, a_local[~vplus], lam, stats,
                                         depth + 1, True, split_budget)
        return out

    def _extract_group_flows(self) -> np.ndarray:
        """Per-group flow vectors from the stored arc flows (canonical net)."""
        net = self.net
        xi = np.zeros((net.n_groups, self.gs.p))
        n_inner = net.n_vars + net.n_groups
        mask = (net.tail >= net.n_vars) & (net.tail < n_inner) & (net.head < net.n_vars)
        rows = net.tail[mask] - net.n_vars
        cols = net.var_ids[net.head[mask]]
        xi[rows, cols] = self._last_flow[mask]
        return xi


def prox(u: np.ndarray, gs: GroupStructure, lam: float,
         options: ProxOptions | None = None) -> ProxResult:
    """One-shot prox of lam * Omega at u (cold start)."""
    return ProxWorkspace(gs, options).prox(u, lam)


def check_optimality(u: np.ndarray, gs: GroupStructure, lam: float,
                     result: ProxResult) -> float:
    """Residual of the exact optimality conditions of the prox dual.

    Requires per-group flows on the result (keep_group_flows). Returns the
    worst violation over: flow nonnegativity and group budget feasibility,
    primal-dual consistency w = u - sum_g xi^g, and for each group either
    w_g = 0 or (flow goes only to max-magnitude coordinates of w_g and the
    group budget is exhausted).
    """
    if result.group_flows is None:
        raise ValueError("check_optimality needs group flows; "
                         "run prox with keep_group_flows=True")
    xi = result.group_flows
    a = np.abs(np.asarray(u, dtype=float))
    sign = np.where(np.asarray(u) < 0, -1.0, 1.0)
    eta = gs.weights()

    res = max(0.0, float(-xi.min(initial=0.0)))
    wbar = a - xi.sum(axis=0)
    res = max(res, float(np.max(np.abs(result.w - sign * wbar), initial=0.0)))

    for k, g in enumerate(gs.groups):
        idx = list(g.members)
        wg = wbar[idx]
        xig = xi[k, idx]
        # structural zero outside the group
        off = np.delete(xi[k], idx)
        if off.size:
            res = max(res, float(np.abs(off).max()))
        l1 = float(xig.sum())
        budget = lam * eta[k]
        res = max(res, max(0.0, l1 - budget))
        winf = float(np.abs(wg).max())
        r_align = abs(float(wg @ xig) - winf * l1)
        r_budget = abs(l1 - budget)
        res = max(res, min(max(r_align, r_budget), winf))
    return res
