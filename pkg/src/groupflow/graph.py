"""Flow networks for group-sparsity proximal problems.

The canonical network has one node per variable and one per group, a source
arc (s, g) of capacity lam * eta_g for every group, an uncapacitated arc
(g, j) for every membership, and one sink arc (j, t) per variable whose
capacity is set per solve. Nested groups can be rewired through group-group
arcs without changing the optimal sink flows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .groups import GroupStructure

INF_CAP = math.inf


@dataclass
class FlowNetwork:
    """Directed s-t network over variable and group nodes.

    Node numbering: variables are 0..n_vars-1, groups are
    n_vars..n_vars+n_groups-1, then s, then t. Arc capacities may be
    math.inf; solvers replace infinities with a per-call finite sentinel.
    Instances are treated as immutable once built.
    """

    n_vars: int
    n_groups: int
    var_ids: np.ndarray     # original variable index per variable node
    group_ids: np.ndarray   # original group index per group node
    eta: np.ndarray         # weight per group node
    lam: float              # default source capacities are lam * eta
    tail: np.ndarray
    head: np.ndarray
    cap: np.ndarray
    source_arc: np.ndarray  # arc index of (s, g) per group node
    sink_arc: np.ndarray    # arc index of (j, t) per variable node
    root_arc: np.ndarray    # arc index in the root network this was cut from
    _adj: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)

    @property
    def s(self) -> int:
        return self.n_vars + self.n_groups

    @property
    def t(self) -> int:
        return self.n_vars + self.n_groups + 1

    @property
    def n_nodes(self) -> int:
        return self.n_vars + self.n_groups + 2

    @property
    def n_arcs(self) -> int:
        return len(self.tail)

    def adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR adjacency over the doubled (forward + reverse) arc list.

        Residual arc 2*i is arc i forward, 2*i+1 its reverse. Returns
        (adj_start, adj_arc) where adj_arc[adj_start[v]:adj_start[v+1]]
        lists residual arc ids leaving node v.
        """
        if self._adj is None:
            n, m = self.n_nodes, self.n_arcs
            rtail = np.empty(2 * m, dtype=np.int64)
            rtail[0::2] = self.tail
            rtail[1::2] = self.head
            adj_arc = np.argsort(rtail, kind="stable")
            counts = np.bincount(rtail, minlength=n)
            adj_start = np.zeros(n + 1, dtype=np.int64)
            np.cumsum(counts, out=adj_start[1:])
            object.__setattr__(self, "_adj", (adj_start, adj_arc))
        return self._adj

    def residual_heads(self) -> np.ndarray:
        """Head node of every residual arc (length 2 * n_arcs)."""
        rh = np.empty(2 * self.n_arcs, dtype=np.int64)
        rh[0::2] = self.head
        rh[1::2] = self.tail
        return rh


def build_canonical(gs: GroupStructure, lam: float) -> FlowNetwork:
    """Build the canonical network for a validated group structure."""
    p, m = gs.p, gs.n_groups
    memberships = sum(len(g.members) for g in gs.groups)
    n_arcs = m + memberships + p
    tail = np.empty(n_arcs, dtype=np.int64)
    head = np.empty(n_arcs, dtype=np.int64)
    cap = np.empty(n_arcs, dtype=float)
    s, t = p + m, p + m + 1

    a = 0
    source_arc = np.empty(m, dtype=np.int64)
    for k, g in enumerate(gs.groups):
        tail[a], head[a], cap[a] = s, p + k, lam * g.weight
        source_arc[k] = a
        a += 1
    for k, g in enumerate(gs.groups):
        for j in g.members:
            tail[a], head[a], cap[a] = p + k, j, INF_CAP
            a += 1
    sink_arc = np.arange(a, a + p, dtype=np.int64)
    for j in range(p):
        tail[a], head[a], cap[a] = j, t, INF_CAP
        a += 1

    return FlowNetwork(
        n_vars=p,
        n_groups=m,
        var_ids=np.arange(p, dtype=np.int64),
        group_ids=np.arange(m, dtype=np.int64),
        eta=gs.weights(),
        lam=float(lam),
        tail=tail,
        head=head,
        cap=cap,
        source_arc=source_arc,
        sink_arc=sink_arc,
        root_arc=np.arange(n_arcs, dtype=np.int64),
    )


def _hasse_children(gs: GroupStructure) -> list[list[int]]:
    """Transitive reduction of the strict-inclusion order over groups.

    Equal member sets are never related, so duplicate groups stay untouched.
    """
    sets = [frozenset(g.members) for g in gs.groups]
    m = len(sets)
    containing: list[list[int]] = [[] for _ in range(gs.p)]
    for k, s in enumerate(sets):
        for j in s:
            containing[j].append(k)
    below: list[list[int]] = [[] for _ in range(m)]  # strict subsets of k
    for a in range(m):
        # any strict superset of a must contain a's least-covered member
        pivot = min(sets[a], key=lambda j: len(containing[j]))
        for b in containing[pivot]:
            if b != a and len(sets[b]) > len(sets[a]) and sets[a] < sets[b]:
                below[b].append(a)
    children: list[list[int]] = [[] for _ in range(m)]
    for b in range(m):
        subs = below[b]
        for a in subs:
            # a is a child of b unless some other strict subset of b contains a
            if not any(c != a and sets[a] < sets[c] for c in subs):
                children[b].append(a)
    return children


def simplify_nested(net: FlowNetwork, gs: GroupStructure) -> FlowNetwork:
    """Reroute nested groups through group-group arcs.

    For each group, a disjoint set of child groups (from the inclusion Hasse
    diagram) absorbs its direct variable arcs, keeping group-to-variable
    paths unique. Source and sink arcs are unchanged; the optimal sink flows
    are preserved.
    """
    children = _hasse_children(gs)
    if not any(children):
        return net

    p, m = net.n_vars, net.n_groups
    s = net.s
    tail = [int(x) for x in net.tail[: m]]
    head = [int(x) for x in net.head[: m]]
    cap = [float(x) for x in net.cap[: m]]

    for k, g in enumerate(gs.groups):
        covered: set[int] = set()
        routed: list[int] = []
        # larger children first so more membership arcs get absorbed
        for c in sorted(children[k], key=lambda c: -len(gs.groups[c].members)):
            cm = set(gs.groups[c].members)
            if cm & covered:
                continue
            covered |= cm
            routed.append(c)
        for c in routed:
            tail.append(p + k)
            head.append(p + c)
            cap.append(INF_CAP)
        for j in g.members:
            if j not in covered:
                tail.append(p + k)
                head.append(j)
                cap.append(INF_CAP)

    source_arc = np.arange(m, dtype=np.int64)
    sink_start = len(tail)
    for j in range(p):
        tail.append(j)
        head.append(net.t)
        cap.append(INF_CAP)
    sink_arc = np.arange(sink_start, sink_start + p, dtype=np.int64)

    n_arcs = len(tail)
    return FlowNetwork(
        n_vars=p,
        n_groups=m,
        var_ids=net.var_ids.copy(),
        group_ids=net.group_ids.copy(),
        eta=net.eta.copy(),
        lam=net.lam,
        tail=np.array(tail, dtype=np.int64),
        head=np.array(head, dtype=np.int64),
        cap=np.array(cap, dtype=float),
        source_arc=source_arc,
        sink_arc=sink_arc,
        root_arc=np.arange(n_arcs, dtype=np.int64),
    )


def subnetwork(net: FlowNetwork, keep_var: np.ndarray, keep_group: np.ndarray) -> FlowNetwork:
    """Induced subnetwork on a subset of variable and group nodes.

    s and t are always kept. Arcs survive iff both endpoints survive;
    root_arc tracks positions in net's own arc array composed with net's
    root_arc, so flows can be read from / written to the root network.
    """
    keep_var = np.asarray(keep_var, dtype=bool)
    keep_group = np.asarray(keep_group, dtype=bool)
    nv = int(keep_var.sum())
    ng = int(keep_group.sum())

    # old node id -> new node id (-1 dropped)
    node_map = np.full(net.n_nodes, -1, dtype=np.int64)
    node_map[: net.n_vars][keep_var] = np.arange(nv)
    old_groups = net.n_vars + np.nonzero(keep_group)[0]
    node_map[old_groups] = nv + np.arange(ng)
    node_map[net.s] = nv + ng
    node_map[net.t] = nv + ng + 1

    keep_arc = (node_map[net.tail] >= 0) & (node_map[net.head] >= 0)
    arc_idx = np.nonzero(keep_arc)[0]
    tail = node_map[net.tail[arc_idx]]
    head = node_map[net.head[arc_idx]]
    cap = net.cap[arc_idx].copy()

    arc_map = np.full(net.n_arcs, -1, dtype=np.int64)
    arc_map[arc_idx] = np.arange(len(arc_idx))

    return FlowNetwork(
        n_vars=nv,
        n_groups=ng,
        var_ids=net.var_ids[keep_var].copy(),
        group_ids=net.group_ids[keep_group].copy(),
        eta=net.eta[keep_group].copy(),
        lam=net.lam,
        tail=tail,
        head=head,
        cap=cap,
        source_arc=arc_map[net.source_arc[keep_group]],
        sink_arc=arc_map[net.sink_arc[keep_var]],
        root_arc=net.root_arc[arc_idx].copy(),
    )


def connected_components(net: FlowNetwork) -> list[FlowNetwork]:
    """Split into maximal components of the graph minus {s, t}.

    Each component keeps s and t with only its incident arcs. Components
    share no arcs, so they can be solved independently.
    """
    n_inner = net.n_vars + net.n_groups
    parent = np.arange(n_inner, dtype=np.int64)

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in zip(net.tail, net.head):
        if u < n_inner and v < n_inner:
            ru, rv = find(int(u)), find(int(v))
            if ru != rv:
                parent[ru] = rv

    roots = np.array([find(i) for i in range(n_inner)])
    comps = []
    for r in np.unique(roots):
        mask = roots == r
        keep_var = mask[: net.n_vars]
        keep_group = mask[net.n_vars :]
        comps.append(subnetwork(net, keep_var, keep_group))
    return comps


def variable_inflow_caps(net: FlowNetwork, lam: float | None = None) -> np.ndarray:
    """Per-variable upper bound on sink flow: sum of source capacities of
    the group nodes that can reach the variable in this (sub)network."""
    if lam is None:
        lam = net.lam
    n_inner = net.n_vars + net.n_groups
    from_group = (net.tail >= net.n_vars) & (net.tail < n_inner)
    gv = from_group & (net.head < net.n_vars)
    gg = from_group & (net.head >= net.n_vars) & (net.head < n_inner)
    if not gg.any():
        # flat structure: each variable is fed directly by its groups
        bound = np.zeros(net.n_vars, dtype=float)
        np.add.at(bound, net.head[gv], lam * net.eta[net.tail[gv] - net.n_vars])
        return bound
    # forward adjacency over group-internal arcs only
    succ: list[list[int]] = [[] for _ in range(n_inner)]
    for u, v in zip(net.tail[from_group], net.head[from_group]):
        if v < n_inner:
            succ[int(u)].append(int(v))
    bound = np.zeros(net.n_vars, dtype=float)
    for k in range(net.n_groups):
        c = lam * net.eta[k]
        stack = [net.n_vars + k]
        seen = {net.n_vars + k}
        while stack:
            u = stack.pop()
            for v in succ[u]:
                if v in seen:
                    continue
                seen.add(v)
                if v < net.n_vars:
                    bound[v] += c
                else:
                    stack.append(v)
    return bound


def dump_arcs(net: FlowNetwork) -> str:
    """Debug dump: one arc per line 'tail head capacity', symbolic names."""

    def name(v: int) -> str:
        if v == net.s:
            return "s"
        if v == net.t:
            return "t"
        if v < net.n_vars:
            return f"u{net.var_ids[v] + 1}"
        return f"g{net.group_ids[v - net.n_vars] + 1}"

    lines = []
    for u, v, c in zip(net.tail, net.head, net.cap):
        cs = "inf" if math.isinf(c) else f"{c:.12g}"
        lines.append(f"{name(int(u))} {name(int(v))} {cs}")
    return "\n".join(lines) + "\n"
