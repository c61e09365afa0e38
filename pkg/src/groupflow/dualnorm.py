"""Dual norm of the overlapping group-linf penalty.

The dual norm of kappa is the smallest scale tau such that a flow with
source capacities tau * eta_g saturates sink demands |kappa_j|. Each
descent sets tau to the ratio of remaining demand to remaining weight,
runs a max-flow, and drops the saturated source side of the min-cut.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .graph import FlowNetwork, build_canonical, simplify_nested, subnetwork
from .groups import GroupStructure, validate
from .maxflow import effective_capacities, max_flow, min_cut


@dataclass
class DualNormResult:
    tau: float
    iterations: int  # number of recursive descents


def omega(w: np.ndarray, gs: GroupStructure) -> float:
    """Primal penalty: sum over groups of eta_g * max_{j in g} |w_j|."""
    w = np.asarray(w, dtype=float)
    if w.shape != (gs.p,):
        raise DimensionMismatch(f"w has shape {w.shape}, want ({gs.p},)")
    aw = np.abs(w)
    return float(sum(g.weight * aw[list(g.members)].max() for g in gs.groups))


def dual_norm(kappa: np.ndarray, gs: GroupStructure) -> DualNormResult:
    """Evaluate the dual norm of kappa for a validated group structure.

    Variables outside every group make the dual norm infinite whenever
    their kappa entry is nonzero.
    """
    validate(gs)
    kappa = np.asarray(kappa, dtype=float)
    if kappa.shape != (gs.p,):
        raise DimensionMismatch(f"kappa has shape {kappa.shape}, want ({gs.p},)")
    a = np.abs(kappa)
    if a.sum() == 0.0:
        return DualNormResult(tau=0.0, iterations=0)

    net = simplify_nested(build_canonical(gs, lam=1.0), gs)
    flows = np.zeros(net.n_arcs)
    tau, iters = _descend(net, a[net.var_ids], flows, warm=False,
                          budget=net.n_nodes)
    return DualNormResult(tau=tau, iterations=iters)


def _descend(net: FlowNetwork, demand: np.ndarray, flows: np.ndarray,
             warm: bool, budget: int) -> tuple[float, int]:
    if net.n_groups == 0:
        # no group can feed these variables
        return (np.inf if (demand > 0).any() else 0.0), 1
    if budget <= 0:
        raise AssertionError("dual-norm descent did not shrink the graph")

    tau = float(demand.sum() / net.eta.sum())
    src = tau * net.eta
    warm_flow = None
    if warm:
        cap_eff = effective_capacities(net, src, demand)
        warm_flow = np.minimum(flows[net.root_arc], cap_eff)
    state = max_flow(net, warm=warm_flow, source_caps=src, sink_caps=demand)
    flows[net.root_arc] = state.flow

    sink_flow = state.flow[net.sink_arc]
    if np.all(np.abs(sink_flow - demand) <= state.eps):
        return tau, 1

    cut = min_cut(net, state)
    side = cut.source_side
    n_inner = net.n_vars + net.n_groups
    keep_var = ~side[: net.n_vars]
    keep_group = ~side[net.n_vars : n_inner]
    n_keep = int(keep_var.sum() + keep_group.sum())
    if n_keep == 0 or n_keep == n_inner:
        raise AssertionError("min-cut split produced an empty side")

    sub = subnetwork(net, keep_var, keep_group)
    tau_sub, iters = _descend(sub, demand[keep_var], flows, warm=True,
                              budget=budget - (n_inner - n_keep))
    return tau_sub, iters + 1
