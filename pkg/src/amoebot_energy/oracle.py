"""Analysis oracles: greedy parallel schedule, dominance, exact recharge and brute force.

These operate on abstract path/tree configurations and share no code with
the simulation engine, so they can serve as independent references for it.
"""

from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass
from typing import Sequence

from .system import EPS, ParameterError


@dataclass(frozen=True)
class EnergyConfigSnapshot:
    """Battery levels along a root-anchored path ``P_1 .. P_k`` (root first)."""

    batteries: tuple[float, ...]
    kappa_prime: float

    @classmethod
    def zeros(cls, k: int, kappa: float, alpha: float) -> "EnergyConfigSnapshot":
        return cls((0.0,) * k, kappa - alpha)

    def __len__(self) -> int:
        return len(self.batteries)


def suffix_sums(batteries: Sequence[float]) -> list[float]:
    """``out[i] = sum(batteries[i:])``."""
    out = [0.0] * len(batteries)
    acc = 0.0
    for i in range(len(batteries) - 1, -1, -1):
        acc += batteries[i]
        out[i] = acc
    return out


def parallel_step(c: EnergyConfigSnapshot, alpha: float) -> EnergyConfigSnapshot:
    """One synchronous step of the greedy parallel schedule with capacity ``kappa'``.

    Every particle with at least ``alpha`` passes to its successor as much as
    fits, where the successor's room counts what it passes on in the same
    step; the root then harvests into whatever room it has left. Outflows are
    resolved from the tail of the path towards the root.
    """
    b = c.batteries
    kp = c.kappa_prime
    k = len(b)
    out = [0.0] * k
    for j in range(k - 2, -1, -1):
        room = kp - b[j + 1] + out[j + 1]
        if b[j] - alpha > -EPS and room > EPS:
            out[j] = min(alpha, room)
    harvest = max(0.0, min(alpha, kp - b[0] + out[0])) if k else 0.0
    new = []
    for j in range(k):
        inflow = harvest if j == 0 else out[j - 1]
        new.append(b[j] + inflow - out[j])
    return EnergyConfigSnapshot(tuple(new), kp)


def _check_ratio(kappa: float, alpha: float) -> int:
    if not (kappa > 0 and alpha > 0):
        raise ParameterError("kappa and alpha must be positive")
    ratio = kappa / alpha
    units = round(ratio)
    if abs(ratio - units) > 1e-9 or units < 1:
        raise ParameterError(f"kappa/alpha must be a positive integer, got {ratio}")
    return units


def parallel_recharge_rounds(k: int, kappa: float, alpha: float) -> int:
    """Steps of the parallel schedule from all-zero until every battery holds ``kappa - alpha``."""
    _check_ratio(kappa, alpha)
    if k < 1:
        raise ParameterError("path length must be positive")
    c = EnergyConfigSnapshot.zeros(k, kappa, alpha)
    kp = c.kappa_prime
    steps = 0
    limit = 10 * (round(kappa / alpha) + 1) * k + 10
    while any(kp - x > EPS for x in c.batteries):
        c = parallel_step(c, alpha)
        steps += 1
        if steps > limit:
            raise RuntimeError("parallel schedule failed to converge")
    return steps


def parallel_trajectory(k: int, kappa: float, alpha: float, steps: int) -> list[EnergyConfigSnapshot]:
    c = EnergyConfigSnapshot.zeros(k, kappa, alpha)
    out = [c]
    for _ in range(steps):
        c = parallel_step(c, alpha)
        out.append(c)
    return out


def dominates(a: EnergyConfigSnapshot | Sequence[float], b: EnergyConfigSnapshot | Sequence[float]) -> bool:
    """True iff every suffix sum of ``a`` is at least the matching suffix sum of ``b``."""
    ab = a.batteries if isinstance(a, EnergyConfigSnapshot) else tuple(a)
    bb = b.batteries if isinstance(b, EnergyConfigSnapshot) else tuple(b)
    if len(ab) != len(bb):
        raise ParameterError(f"path lengths differ: {len(ab)} vs {len(bb)}")
    return all(x - y > -EPS for x, y in zip(suffix_sums(ab), suffix_sums(bb)))


# ---------------------------------------------------------------- rooted trees

def _canon(children: dict[int, list[int]], v: int) -> str:
    return "(" + "".join(sorted(_canon(children, c) for c in children.get(v, []))) + ")"


def canonical_form(parents: Sequence[int | None]) -> str:
    """AHU encoding of a rooted tree given as a parent list (root has None)."""
    children: dict[int, list[int]] = {}
    root = None
    for v, p in enumerate(parents):
        if p is None:
            root = v
        else:
            children.setdefault(p, []).append(v)
    return _canon(children, root)


def rooted_trees(n: int) -> list[tuple[int | None, ...]]:
    """One parent list per isomorphism class of rooted trees on ``n`` nodes.

    Node 0 is the root and every parent index is smaller than its child.
    """
    if n < 1:
        return []
    seen: dict[str, tuple[int | None, ...]] = {}
    for tail in itertools.product(*[range(v) for v in range(1, n)]):
        parents = (None,) + tuple(tail)
        key = canonical_form(parents)
        if key not in seen:
            seen[key] = parents
    return [seen[k] for k in sorted(seen)]


def path_tree(n: int) -> tuple[int | None, ...]:
    return (None,) + tuple(range(n - 1))


def brute_force_worst_recharge(
    tree: Sequence[int | None], kappa: float, alpha: float, horizon: int | None = None
) -> int:
    """Worst-case rounds to recharge every battery from empty, over all schedules.

    Models the inhibited recharge dynamics in integer units of ``alpha``: on
    activation a root harvests one unit (up to capacity), then any particle
    holding a unit passes one to some child below capacity. Each round
    activates every particle exactly once; the adversary picks the order and,
    when several children qualify, which one receives. The count includes
    the round in which the last unit lands.
    """
    units = _check_ratio(kappa, alpha)
    n = len(tree)
    if not 1 <= n <= 6:
        raise ParameterError("brute force supports 1..6 particles")
    if horizon is None:
        horizon = 10 * units * n
    children = [[v for v in range(n) if tree[v] == u] for u in range(n)]
    full = (units,) * n
    everyone = (1 << n) - 1

    def activate(b: tuple[int, ...], v: int) -> list[tuple[int, ...]]:
        e = list(b)
        if tree[v] is None and e[v] < units:
            e[v] += 1
        if e[v] < 1:
            return [tuple(e)]
        needy = [c for c in children[v] if e[c] < units]
        if not needy:
            return [tuple(e)]
        out = []
        for c in needy:
            f = e[:]
            f[v] -= 1
            f[c] += 1
            out.append(tuple(f))
        return out

    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
    result = _worst(n, full, everyone, activate)
    if result > horizon:
        raise RuntimeError(f"brute force exceeded horizon of {horizon} rounds")
    return result


def _worst(n, full, everyone, activate) -> int:
    """Longest path in the round-transition graph (acyclic: each round adds energy or moves it down)."""
    round_cache: dict[tuple[int, ...], int] = {}

    def ends_of_round(b: tuple[int, ...]) -> set[tuple[int, ...]]:
        frontier = {(b, 0)}
        for _ in range(n):
            nxt = set()
            for state, done in frontier:
                for v in range(n):
                    if done & (1 << v):
                        continue
                    for nb in activate(state, v):
                        nxt.add((nb, done | (1 << v)))
            frontier = nxt
        return {state for state, done in frontier if done == everyone}

    on_stack: set[tuple[int, ...]] = set()

    def rounds_from(b: tuple[int, ...]) -> int:
        if b == full:
            return 0
        cached = round_cache.get(b)
        if cached is not None:
            return cached
        if b in on_stack:
            raise RuntimeError("recharge dynamics can cycle without finishing")
        on_stack.add(b)
        best = 0
        for nb in ends_of_round(b):
            val = 1 + rounds_from(nb)
            if val > best:
                best = val
        on_stack.discard(b)
        round_cache[b] = best
        return best

    return rounds_from((0,) * n)
