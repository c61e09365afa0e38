import numpy as np

from groupflow import GroupStructure, make_structure


def random_structure(rng: np.random.Generator, p_max: int = 25,
                     m_max: int = 8) -> GroupStructure:
    """Random overlapping group structure with positive random weights."""
    p = int(rng.integers(2, p_max + 1))
    m = int(rng.integers(1, m_max + 1))
    groups = []
    for _ in range(m):
        size = int(rng.integers(1, p + 1))
        members = rng.choice(p, size=size, replace=False)
        weight = float(rng.uniform(0.2, 2.0))
        groups.append((weight, [int(j) for j in members]))
    return make_structure(p, groups)


def random_nested_structure(rng: np.random.Generator, p_max: int = 15,
                            m_max: int = 8) -> GroupStructure:
    """Structure guaranteed to contain strict inclusions between groups."""
    p = int(rng.integers(3, p_max + 1))
    groups = []
    size = int(rng.integers(2, p + 1))
    base = [int(j) for j in rng.choice(p, size=size, replace=False)]
    groups.append((float(rng.uniform(0.2, 2.0)), base))
    m = int(rng.integers(2, m_max + 1))
    while len(groups) < m:
        _, parent = groups[int(rng.integers(len(groups)))]
        if len(parent) > 1:
            sub_size = int(rng.integers(1, len(parent)))
            sub = [int(j) for j in rng.choice(parent, size=sub_size, replace=False)]
        else:
            sub = [int(j) for j in rng.choice(p, size=int(rng.integers(1, p + 1)),
                                              replace=False)]
        groups.append((float(rng.uniform(0.2, 2.0)), sub))
    return make_structure(p, groups)
