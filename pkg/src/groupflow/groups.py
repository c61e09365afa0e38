"""Group structures for overlapping group-sparsity penalties.

A group structure is a collection of weighted index groups over p variables.
Indices are 0-based everywhere in code; the text file format and all CLI
output use 1-based indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import (
    DuplicateIndex,
    EmptyGroup,
    IndexOutOfRange,
    InvalidLength,
    NonpositiveWeight,
)


@dataclass(frozen=True)
class Group:
    weight: float
    members: tuple[int, ...]  # sorted, 0-based


@dataclass(frozen=True)
class GroupStructure:
    """Weighted groups of variable indices; immutable after construction."""

    p: int
    groups: tuple[Group, ...]

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    def weights(self) -> np.ndarray:
        return np.array([g.weight for g in self.groups], dtype=float)

    def membership_counts(self) -> np.ndarray:
        """Number of groups containing each variable."""
        counts = np.zeros(self.p, dtype=int)
        for g in self.groups:
            counts[list(g.members)] += 1
        return counts

    def weight_sums(self) -> np.ndarray:
        """Per-variable sum of weights over containing groups."""
        sums = np.zeros(self.p, dtype=float)
        for g in self.groups:
            sums[list(g.members)] += g.weight
        return sums


def make_structure(p: int, groups: Iterable[tuple[float, Iterable[int]]]) -> GroupStructure:
    """Build a GroupStructure from (weight, member-indices) pairs (0-based)."""
    gs = GroupStructure(
        p=int(p),
        groups=tuple(Group(float(w), tuple(sorted(m))) for w, m in groups),
    )
    validate(gs)
    return gs


def validate(gs: GroupStructure) -> None:
    """Check all structural invariants, raising a ValidationError subclass."""
    if gs.p < 1:
        raise IndexOutOfRange(f"p must be >= 1, got {gs.p}")
    if not gs.groups:
        raise EmptyGroup("group list is empty")
    for k, g in enumerate(gs.groups):
        if len(g.members) == 0:
            raise EmptyGroup(f"group {k} is empty")
        if not g.weight > 0.0:
            raise NonpositiveWeight(f"group {k} has weight {g.weight}")
        if len(set(g.members)) != len(g.members):
            raise DuplicateIndex(f"group {k} has repeated indices")
        lo, hi = min(g.members), max(g.members)
        if lo < 0 or hi >= gs.p:
            raise IndexOutOfRange(f"group {k} has index outside [0, {gs.p - 1}]")


def sliding_windows(p: int, length: int) -> GroupStructure:
    """All contiguous windows of the given length, unit weights."""
    if not 1 <= length <= p:
        raise InvalidLength(f"need 1 <= length <= p, got length={length}, p={p}")
    groups = [Group(1.0, tuple(range(i, i + length))) for i in range(p - length + 1)]
    return GroupStructure(p=p, groups=tuple(groups))


def grid_squares(h: int, w: int, k: int) -> GroupStructure:
    """All k x k squares of an h x w grid, row-major indexing, unit weights."""
    if not 1 <= k <= min(h, w):
        raise InvalidLength(f"need 1 <= k <= min(h, w), got k={k}, h={h}, w={w}")
    groups = []
    for r in range(h - k + 1):
        for c in range(w - k + 1):
            members = tuple(
                (r + dr) * w + (c + dc) for dr in range(k) for dc in range(k)
            )
            groups.append(Group(1.0, tuple(sorted(members))))
    return GroupStructure(p=h * w, groups=tuple(groups))


def singletons(p: int) -> GroupStructure:
    """One group per variable; the penalty reduces to the l1-norm."""
    if p < 1:
        raise IndexOutOfRange(f"p must be >= 1, got {p}")
    return GroupStructure(p=p, groups=tuple(Group(1.0, (j,)) for j in range(p)))


def write_groups(gs: GroupStructure, fh: TextIO) -> None:
    """Write the line-oriented groups format (1-based indices)."""
    fh.write(f"p {gs.p}\n")
    for g in gs.groups:
        idx = " ".join(str(j + 1) for j in g.members)
        fh.write(f"{g.weight:.17g} {idx}\n")


def read_groups(fh: TextIO) -> GroupStructure:
    """Parse the groups file format; '#' starts a comment line."""
    p = None
    groups: list[tuple[float, Sequence[int]]] = []
    for lineno, raw in enumerate(fh, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if p is None:
            if tokens[0] != "p" or len(tokens) != 2:
                raise InvalidLength(f"line {lineno}: expected 'p <int>' header")
            p = int(tokens[1])
            continue
        weight = float(tokens[0])
        members = [int(t) - 1 for t in tokens[1:]]
        groups.append((weight, members))
    if p is None:
        raise InvalidLength("missing 'p <int>' header line")
    return make_structure(p, groups)
