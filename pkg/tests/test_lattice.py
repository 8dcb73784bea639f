from collections import deque

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from amoebot_energy.lattice import (
    AxialCoord,
    direction_to,
    is_connected,
    lattice_distance,
    line,
    neighbor,
    neighbors,
    opposite,
    random_blob,
    spiral,
)
from amoebot_energy.lattice import _has_hole

coords = st.tuples(st.integers(-10, 10), st.integers(-10, 10))


def test_direction_zero_offset():
    assert neighbor((0, 0), 0) == (1, 0)


def test_opposite_round_trip_example():
    assert neighbor(neighbor((2, -1), 4), 1) == (2, -1)


def test_six_distinct_neighbors():
    assert len(set(neighbors((5, 5)))) == 6


def test_distance_examples():
    assert lattice_distance((0, 0), (0, 0)) == 0
    assert lattice_distance((0, 0), (1, 0)) == 1
    assert lattice_distance((0, 0), (3, -2)) == 3


def test_connectivity_examples():
    assert is_connected([])
    assert is_connected([(0, 0), (1, 0), (2, 0)])
    assert not is_connected([(0, 0), (2, 0)])


@given(coords, st.integers(0, 5))
def test_opposite_is_inverse(c, d):
    assert neighbor(neighbor(c, d), opposite(d)) == AxialCoord(*c)
    assert direction_to(c, neighbor(c, d)) == d


def _bfs_distance(a, b, radius=25):
    seen = {a}
    queue = deque([(a, 0)])
    while queue:
        c, dist = queue.popleft()
        if c == b:
            return dist
        for u in neighbors(c):
            if u not in seen and max(abs(u[0]), abs(u[1])) <= radius:
                seen.add(u)
                queue.append((u, dist + 1))
    raise AssertionError("unreachable")


@settings(max_examples=60, deadline=None)
@given(coords, coords)
def test_distance_matches_bfs(a, b):
    assert lattice_distance(a, b) == _bfs_distance(AxialCoord(*a), AxialCoord(*b))


def _union_find_connected(nodes):
    nodes = list(set(nodes))
    parent = {c: c for c in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in nodes:
        for u in neighbors(c):
            if u in parent:
                parent[find(c)] = find(u)
    return len({find(c) for c in nodes}) <= 1


@settings(max_examples=100, deadline=None)
@given(st.sets(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), max_size=50))
def test_connectivity_matches_union_find(nodes):
    assert is_connected(nodes) == _union_find_connected(nodes)


def test_spiral_rings():
    assert spiral((0, 0), 7)[0] == (0, 0)
    assert set(spiral((0, 0), 7)) == {(0, 0), *neighbors((0, 0))}
    s = spiral((0, 0), 91)
    assert len(set(s)) == 91 and max(lattice_distance((0, 0), c) for c in s) == 5
    assert is_connected(spiral((0, 0), 50))


def test_line_follows_direction():
    assert line((0, 0), 3, 0) == [(0, 0), (1, 0), (2, 0)]


def test_random_blob_is_connected_and_hole_free():
    rng = np.random.Generator(np.random.Philox(4))
    for n in (1, 5, 30, 80):
        blob = random_blob((0, 0), n, rng)
        assert blob[0] == (0, 0) and len(set(blob)) == n
        assert is_connected(blob) and not _has_hole(set(blob))


def test_hole_detection():
    ring = set(neighbors((0, 0)))
    assert _has_hole(ring)
    assert not _has_hole(ring | {AxialCoord(0, 0)})
