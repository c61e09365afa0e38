import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from groupflow import (
    DuplicateIndex,
    EmptyGroup,
    Group,
    GroupStructure,
    IndexOutOfRange,
    InvalidLength,
    NonpositiveWeight,
    grid_squares,
    make_structure,
    read_groups,
    singletons,
    sliding_windows,
    validate,
    write_groups,
)
from conftest import random_structure


def test_sliding_windows_p5_len3():
    gs = sliding_windows(5, 3)
    assert [g.members for g in gs.groups] == [(0, 1, 2), (1, 2, 3), (2, 3, 4)]
    assert all(g.weight == 1.0 for g in gs.groups)


def test_sliding_windows_bad_length():
    with pytest.raises(InvalidLength):
        sliding_windows(5, 6)
    with pytest.raises(InvalidLength):
        sliding_windows(5, 0)


def test_grid_squares_counts():
    gs = grid_squares(3, 3, 2)
    assert gs.p == 9
    assert gs.n_groups == 4
    assert gs.groups[0].members == (0, 1, 3, 4)


def test_grid_squares_k_too_large():
    with pytest.raises(InvalidLength):
        grid_squares(2, 5, 3)


def test_singletons_is_l1():
    gs = singletons(4)
    assert [g.members for g in gs.groups] == [(0,), (1,), (2,), (3,)]


def test_validate_rejects_empty_group():
    with pytest.raises(EmptyGroup):
        validate(GroupStructure(p=3, groups=(Group(1.0, ()),)))
    with pytest.raises(EmptyGroup):
        validate(GroupStructure(p=3, groups=()))


def test_validate_rejects_bad_weight():
    with pytest.raises(NonpositiveWeight):
        make_structure(3, [(0.0, [0])])
    with pytest.raises(NonpositiveWeight):
        make_structure(3, [(-1.0, [0])])


def test_validate_rejects_duplicates_and_range():
    with pytest.raises(DuplicateIndex):
        validate(GroupStructure(p=3, groups=(Group(1.0, (0, 0)),)))
    with pytest.raises(IndexOutOfRange):
        make_structure(3, [(1.0, [3])])
    with pytest.raises(IndexOutOfRange):
        make_structure(3, [(1.0, [-1])])


def test_membership_counts_and_weight_sums():
    gs = make_structure(4, [(1.0, [0, 1]), (2.0, [1, 2])])
    assert gs.membership_counts().tolist() == [1, 2, 1, 0]
    assert gs.weight_sums().tolist() == [1.0, 3.0, 2.0, 0.0]


def test_groups_file_comments_and_blanks():
    text = "# a comment\np 4\n\n1.5 1 2\n# another\n2 3 4\n"
    gs = read_groups(io.StringIO(text))
    assert gs.p == 4
    assert gs.groups[0] == Group(1.5, (0, 1))
    assert gs.groups[1] == Group(2.0, (2, 3))


def test_groups_file_missing_header():
    with pytest.raises(InvalidLength):
        read_groups(io.StringIO("1.0 1 2\n"))


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_groups_roundtrip(seed):
    gs = random_structure(np.random.default_rng(seed))
    buf = io.StringIO()
    write_groups(gs, buf)
    buf.seek(0)
    back = read_groups(buf)
    assert back == gs
