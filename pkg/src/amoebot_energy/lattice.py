"""Triangular-lattice geometry in axial coordinates.

Direction labels run counter-clockwise starting from east::

    2   1
  3   *   0
    4   5

``neighbor(c, d)`` and ``neighbor(c, (d + 1) % 6)`` are always adjacent to
each other, which the movement and boundary-walking code relies on.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, NamedTuple


class AxialCoord(NamedTuple):
    q: int
    r: int

    def __str__(self) -> str:
        return f"{self.q},{self.r}"


Direction = int

DIRECTIONS: tuple[tuple[int, int], ...] = (
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, 0),
    (-1, 1),
    (0, 1),
)

_OFFSET_TO_DIR = {off: d for d, off in enumerate(DIRECTIONS)}


def opposite(d: Direction) -> Direction:
    return (d + 3) % 6


# neighbor tuples are memoized: the engine asks for them constantly
_NBR_CACHE: dict[tuple[int, int], tuple[AxialCoord, ...]] = {}


def _ring(c: tuple[int, int]) -> tuple[AxialCoord, ...]:
    ring = _NBR_CACHE.get(c)
    if ring is None:
        q, r = c
        ring = tuple(AxialCoord(q + dq, r + dr) for dq, dr in DIRECTIONS)
        _NBR_CACHE[c] = ring
    return ring


def neighbor(c: tuple[int, int], d: Direction) -> AxialCoord:
    ring = _NBR_CACHE.get(c)
    if ring is None:
        ring = _ring(c)
    return ring[d]


def neighbors(c: tuple[int, int]) -> list[AxialCoord]:
    return list(_ring(c))


def direction_to(a: tuple[int, int], b: tuple[int, int]) -> Direction | None:
    """Label of the edge from ``a`` to ``b``, or None if they are not adjacent."""
    return _OFFSET_TO_DIR.get((b[0] - a[0], b[1] - a[1]))


def lattice_distance(a: tuple[int, int], b: tuple[int, int]) -> int:
    dq = a[0] - b[0]
    dr = a[1] - b[1]
    return (abs(dq) + abs(dr) + abs(dq + dr)) // 2


def is_connected(nodes: Iterable[tuple[int, int]]) -> bool:
    """True iff the subgraph of the lattice induced by ``nodes`` is connected."""
    node_set = set(nodes)
    if len(node_set) <= 1:
        return True
    start = next(iter(node_set))
    seen = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for d in range(6):
            nb = neighbor(cur, d)
            if nb in node_set and nb not in seen:
                seen.add(nb)
                queue.append(nb)
    return len(seen) == len(node_set)


def spiral(center: tuple[int, int], count: int) -> list[AxialCoord]:
    """First ``count`` nodes of a ring-by-ring spiral around ``center``.

    Every prefix of the spiral is connected and each node after the first is
    adjacent to an earlier one.
    """
    out = [AxialCoord(*center)]
    radius = 1
    while len(out) < count:
        cur = AxialCoord(center[0] + DIRECTIONS[4][0] * radius, center[1] + DIRECTIONS[4][1] * radius)
        for side in range(6):
            for _ in range(radius):
                out.append(cur)
                cur = neighbor(cur, side)
        radius += 1
    return out[:count]


def hexagon(center: tuple[int, int], radius: int) -> list[AxialCoord]:
    """All nodes within lattice distance ``radius`` of ``center``, in spiral order."""
    return spiral(center, 3 * radius * (radius + 1) + 1)


def line(start: tuple[int, int], length: int, d: Direction = 0) -> list[AxialCoord]:
    out = [AxialCoord(*start)]
    while len(out) < length:
        out.append(neighbor(out[-1], d))
    return out


def to_cartesian(c: tuple[int, int], scale: float = 1.0) -> tuple[float, float]:
    """Planar embedding with +y pointing down (SVG convention)."""
    x = (c[0] + c[1] / 2.0) * scale
    y = (c[1] * 0.8660254037844386) * scale
    return x, y


def parse_coord(text: str) -> AxialCoord:
    q, r = text.strip().split(",")
    return AxialCoord(int(q), int(r))


def _has_hole(nodes: set[AxialCoord]) -> bool:
    """True if some empty node is enclosed by ``nodes`` (not reachable from outside)."""
    qs = [c[0] for c in nodes]
    rs = [c[1] for c in nodes]
    qlo, qhi, rlo, rhi = min(qs) - 1, max(qs) + 1, min(rs) - 1, max(rs) + 1
    start = AxialCoord(qlo, rlo)
    seen = {start}
    queue = deque([start])
    while queue:
        c = queue.popleft()
        for d in range(6):
            u = neighbor(c, d)
            if u in seen or u in nodes or not (qlo <= u[0] <= qhi and rlo <= u[1] <= rhi):
                continue
            seen.add(u)
            queue.append(u)
    box = (qhi - qlo + 1) * (rhi - rlo + 1)
    return len(seen) + len(nodes) < box


def random_blob(center: tuple[int, int], count: int, rng) -> list[AxialCoord]:
    """A hole-free connected set of ``count`` nodes grown by random accretion around ``center``.

    ``rng`` is a numpy Generator. Frontier nodes are sampled with weight equal
    to their number of occupied neighbours, which keeps the blob compact.
    """
    out = [AxialCoord(*center)]
    nodes = set(out)
    while len(out) < count:
        frontier: dict[AxialCoord, int] = {}
        for c in out:
            for u in neighbors(c):
                if u not in nodes:
                    frontier[u] = frontier.get(u, 0) + 1
        cands = sorted(frontier)
        weights = [frontier[u] for u in cands]
        total = float(sum(weights))
        order = rng.choice(len(cands), size=len(cands), replace=False, p=[w / total for w in weights])
        for i in order:
            u = cands[int(i)]
            nodes.add(u)
            if not _has_hole(nodes):
                out.append(u)
                break
            nodes.discard(u)
        else:
            raise RuntimeError("no hole-free extension found")
    return out
