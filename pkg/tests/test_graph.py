import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from groupflow import build_canonical, connected_components, make_structure, simplify_nested
from groupflow.graph import dump_arcs, subnetwork, variable_inflow_caps
from conftest import random_nested_structure, random_structure


def _arc_set(net):
    def name(v):
        if v == net.s:
            return "s"
        if v == net.t:
            return "t"
        if v < net.n_vars:
            return f"u{net.var_ids[v] + 1}"
        return f"g{net.group_ids[v - net.n_vars] + 1}"

    return {(name(int(u)), name(int(v))) for u, v in zip(net.tail, net.head)}


def test_single_group_graph_sizes():
    gs = make_structure(3, [(1.0, [0, 1, 2])])
    net = build_canonical(gs, 0.5)
    assert net.n_nodes == gs.n_groups + gs.p + 2
    assert net.n_arcs == 7


def test_two_overlapping_groups_graph_sizes():
    gs = make_structure(3, [(1.0, [0, 1]), (1.0, [1, 2])])
    net = build_canonical(gs, 0.5)
    assert net.n_nodes == gs.n_groups + gs.p + 2
    assert net.n_arcs == 9


def test_nested_groups_graph_sizes():
    gs = make_structure(3, [(1.0, [0, 1, 2]), (1.0, [1, 2])])
    net = build_canonical(gs, 0.5)
    assert net.n_nodes == gs.n_groups + gs.p + 2
    assert net.n_arcs == 10


def test_simplified_nested_arcs():
    # g = {1,2,3} contains h = {2,3}: g's arcs to 2,3 collapse into (g,h)
    gs = make_structure(3, [(1.0, [0, 1, 2]), (1.0, [1, 2])])
    net = simplify_nested(build_canonical(gs, 0.5), gs)
    assert net.n_arcs == 9
    assert _arc_set(net) == {
        ("s", "g1"), ("s", "g2"), ("g1", "u1"), ("g1", "g2"),
        ("g2", "u2"), ("g2", "u3"), ("u1", "t"), ("u2", "t"), ("u3", "t"),
    }


def test_simplify_noop_without_nesting():
    gs = make_structure(3, [(1.0, [0, 1]), (1.0, [1, 2])])
    net = build_canonical(gs, 0.5)
    assert simplify_nested(net, gs) is net


def test_simplify_leaves_equal_groups_alone():
    gs = make_structure(2, [(1.0, [0, 1]), (2.0, [0, 1])])
    net = build_canonical(gs, 0.5)
    assert simplify_nested(net, gs) is net


def test_capacities_scale_with_lambda_and_weight():
    gs = make_structure(2, [(1.5, [0]), (0.5, [0, 1])])
    net = build_canonical(gs, 2.0)
    assert net.cap[net.source_arc].tolist() == [3.0, 1.0]
    assert all(math.isinf(c) for c in np.delete(net.cap, net.source_arc))


def test_connected_components_split():
    gs = make_structure(5, [(1.0, [0, 1]), (1.0, [2, 3]), (1.0, [3, 4])])
    comps = connected_components(build_canonical(gs, 1.0))
    sizes = sorted(c.n_vars for c in comps)
    assert sizes == [2, 3]
    by_size = sorted(comps, key=lambda c: c.n_vars)
    assert by_size[0].var_ids.tolist() == [0, 1]
    assert by_size[1].var_ids.tolist() == [2, 3, 4]


def test_subnetwork_root_arc_composition():
    gs = make_structure(4, [(1.0, [0, 1]), (1.0, [2, 3])])
    net = build_canonical(gs, 1.0)
    sub = subnetwork(net, np.array([True, True, False, False]),
                     np.array([True, False]))
    # every kept arc must point back at an identical arc of the root network
    for i in range(sub.n_arcs):
        r = sub.root_arc[i]
        assert net.cap[r] == sub.cap[i]
    sub2 = subnetwork(sub, np.array([True, False]), np.array([True]))
    assert set(sub2.root_arc) <= set(sub.root_arc)


def test_variable_inflow_caps_flat_structure():
    gs = make_structure(3, [(1.0, [0, 1]), (2.0, [1, 2])])
    net = build_canonical(gs, 0.5)
    assert variable_inflow_caps(net, 0.5).tolist() == [0.5, 1.5, 1.0]


def test_variable_inflow_caps_through_nesting():
    gs = make_structure(3, [(1.0, [0, 1, 2]), (1.0, [1, 2])])
    net = simplify_nested(build_canonical(gs, 1.0), gs)
    # u2, u3 receive from both groups via the (g1, g2) arc
    assert variable_inflow_caps(net, 1.0).tolist() == [1.0, 2.0, 2.0]


def test_dump_arcs_format():
    gs = make_structure(2, [(1.0, [0, 1])])
    text = dump_arcs(build_canonical(gs, 0.25))
    lines = text.strip().splitlines()
    assert lines[0] == "s g1 0.25"
    assert "g1 u1 inf" in lines
    assert lines[-1] == "u2 t inf"


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_components_partition_variables(seed):
    gs = random_structure(np.random.default_rng(seed))
    net = build_canonical(gs, 1.0)
    comps = connected_components(net)
    ids = np.concatenate([c.var_ids for c in comps])
    assert sorted(ids.tolist()) == list(range(gs.p))
    assert sum(c.n_groups for c in comps) == gs.n_groups


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_simplified_keeps_source_and_sink_arcs(seed):
    gs = random_nested_structure(np.random.default_rng(seed))
    net = build_canonical(gs, 0.7)
    simp = simplify_nested(net, gs)
    assert simp.n_arcs <= net.n_arcs
    np.testing.assert_array_equal(simp.cap[simp.source_arc],
                                  net.cap[net.source_arc])
    assert simp.n_nodes == net.n_nodes
