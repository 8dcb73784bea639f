"""Experiment plans behind the verification suite and the acceptance checks.

Each function builds its own systems from a seed, runs them, and returns
plain data (dicts / lists) so callers can assert on it or tabulate it.
"""

from __future__ import annotations

import hashlib
import math
import struct
from typing import Iterable

import numpy as np

from .behaviors import BehaviorHook, DemandOnly, HexagonFormation, Reproduction
from .lattice import AxialCoord, is_connected, line, neighbor, neighbors, random_blob, spiral
from .metrics import ForestPartition, classify_forest, moving_average, rounds_csv, zero_positive_alternations
from .oracle import (
    EnergyConfigSnapshot,
    brute_force_worst_recharge,
    dominates,
    parallel_recharge_rounds,
    parallel_trajectory,
    path_tree,
    rooted_trees,
)
from .repair import inject_crash
from .scheduler import Schedule, StopCondition, run
from .system import EPS, Role, SystemState, build_system, less, set_parents


def derive_seed(*parts: object) -> int:
    """Stable 63-bit seed from arbitrary printable parts."""
    digest = hashlib.blake2b(repr(parts).encode(), digest_size=8).digest()
    return struct.unpack("<Q", digest)[0] >> 1


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


# ------------------------------------------------------------ exact recharge

def recharge_grid(ks: Iterable[int] = range(1, 21), ratios: Iterable[int] = range(1, 11),
                  alphas: Iterable[float] = (1.0,)) -> list[dict]:
    out = []
    for alpha in alphas:
        for ratio in ratios:
            for k in ks:
                got = parallel_recharge_rounds(k, ratio * alpha, alpha)
                out.append({"k": k, "ratio": ratio, "alpha": alpha, "rounds": got, "expected": (ratio - 1) * k})
    return out


# ------------------------------------------------------------ dominance

def prebuilt_path(k: int, kappa: float, alpha: float, demand: float, seed: int) -> tuple[SystemState, list[AxialCoord]]:
    """A line of ``k`` particles rooted at one end, every non-root already Active."""
    nodes = line((0, 0), k, 0)
    s = build_system(nodes, [nodes[0]], kappa, alpha, demand, seed=seed, random_orientation=True)
    set_parents(s, {nodes[i]: nodes[i - 1] for i in range(1, k)})
    return s, nodes


def dominance_run(k: int, seed: int, schedule: str = "permutation", kappa: float = 10.0, alpha: float = 1.0) -> dict:
    """Compare the asynchronous recharge of a path with the greedy parallel schedule round by round."""
    s, nodes = prebuilt_path(k, kappa, alpha, kappa, seed)
    horizon = round((kappa - alpha) / alpha) * k
    par = parallel_trajectory(k, kappa, alpha, horizon)
    violations: list[int] = []

    def observe(s: SystemState, row) -> bool:
        i = s.round_counter
        if i <= horizon:
            asyn = EnergyConfigSnapshot(tuple(s.occupancy[c].e_bat for c in nodes), kappa)
            if not dominates(asyn, par[i]):
                violations.append(i)
        return i >= horizon

    sch = Schedule(schedule, seed)
    run(s, sch, BehaviorHook(), StopCondition("max_rounds", horizon), on_round=observe)
    return {"k": k, "seed": seed, "schedule": schedule, "rounds": horizon, "violations": violations}


def dominance_suite(runs: int = 200, base_seed: int = 0) -> list[dict]:
    out = []
    for i in range(runs):
        k = 2 + i % 7
        kind = "permutation" if i % 2 == 0 else "weighted"
        out.append(dominance_run(k, derive_seed(base_seed, "dominance", i), kind))
    return out


# ------------------------------------------------------------ path is worst

def path_worst_table(max_n: int = 5, kappa: float = 3.0, alpha: float = 1.0) -> list[dict]:
    out = []
    for n in range(1, max_n + 1):
        path_val = brute_force_worst_recharge(path_tree(n), kappa, alpha)
        for tree in rooted_trees(n):
            out.append({"n": n, "tree": tree, "worst": brute_force_worst_recharge(tree, kappa, alpha),
                        "path": path_val})
    return out


# ------------------------------------------------------------ random lattice trees

def random_lattice_tree(rng: np.random.Generator, size: int, max_depth: int) -> tuple[list[AxialCoord], dict]:
    """Grow a tree on the lattice from (0,0): each new node hangs off a random node of depth < max_depth."""
    root = AxialCoord(0, 0)
    nodes = [root]
    depth = {root: 0}
    parents: dict[AxialCoord, AxialCoord] = {}
    attempts = 0
    while len(nodes) < size and attempts < 50 * size:
        attempts += 1
        host = nodes[int(rng.integers(len(nodes)))]
        if depth[host] >= max_depth:
            continue
        free = [u for u in neighbors(host) if u not in depth]
        if not free:
            continue
        u = free[int(rng.integers(len(free)))]
        nodes.append(u)
        depth[u] = depth[host] + 1
        parents[u] = host
    return nodes, parents


def propagation_run(seed: int, max_depth: int = 8, kappa: float = 10.0, alpha: float = 0.5,
                    delta: float = 10.0, max_rounds: int = 20000) -> dict:
    """Inhibit spread after forcing one particle empty, then release after the last recharge.

    Returns the tree depth, the first boundary at which every particle was
    inhibited, the first boundary with no stressed particle, and the first
    boundary after that at which some particle had acted.
    """
    rng = _rng(seed)
    size = int(rng.integers(5, 41))
    # depth counts nodes on the root path, so the root alone has depth 1
    nodes, parents = random_lattice_tree(rng, size, int(rng.integers(1, max_depth)))
    s = build_system(nodes, [nodes[0]], kappa, alpha, delta, seed=seed, random_orientation=True)
    set_parents(s, parents)
    for p in s.occupancy.values():
        p.e_bat = kappa
        p.rr_cursor = int(rng.integers(6))
        p.share_cursor = int(rng.integers(6))
    victim = nodes[int(rng.integers(len(nodes)))]
    s.occupancy[victim].e_bat = 0.0
    s.harvested_total = kappa * (len(nodes) - 1)  # ledger accounts for the preset charge
    d = max(_depths(parents, nodes[0]).values()) + 1
    info = {"seed": seed, "size": len(nodes), "depth": d, "all_inhibited": None, "recharged": None,
            "acted_after": None}
    acted_at_recharge = [0]

    def observe(s: SystemState, row) -> bool:
        r = s.round_counter
        live = list(s.occupancy.values())
        if info["all_inhibited"] is None and all(p.inhibit for p in live):
            info["all_inhibited"] = r
        if info["recharged"] is None:
            if info["all_inhibited"] is not None and not any(less(p.e_bat, delta) for p in live):
                info["recharged"] = r
                acted_at_recharge[0] = s.actions_total
        elif s.actions_total > acted_at_recharge[0]:
            info["acted_after"] = r
            return True
        return False

    run(s, Schedule.permutation(seed), DemandOnly(), StopCondition("max_rounds", max_rounds), on_round=observe)
    info["inhibit_ok"] = info["all_inhibited"] is not None and info["all_inhibited"] <= 2 * d
    info["release_ok"] = (info["recharged"] is not None and info["acted_after"] is not None
                          and info["acted_after"] - info["recharged"] <= 2 * d)
    return info


def _depths(parents: dict, root: AxialCoord) -> dict[AxialCoord, int]:
    out = {root: 0}

    def depth(c):
        if c not in out:
            out[c] = depth(parents[c]) + 1
        return out[c]

    for c in parents:
        depth(c)
    return out


# ------------------------------------------------------------ pruning

class PruneObserver:
    """Hook recording first prune round per particle and prunes made beside the non-faulty forest."""

    def __init__(self):
        self.first_prune: dict[int, int] = {}
        self.adjacent_prunes: dict[int, int] = {}
        self.max_prune_count = 0

    def __call__(self, event: str, s: SystemState, c: AxialCoord) -> None:
        if event != "prune":
            return
        p = s.occupancy[c]
        self.first_prune.setdefault(p.uid, s.round_counter + 1)
        self.max_prune_count = max(self.max_prune_count, p.prunes)
        part = classify_forest(s)
        if any(u in part.f_star for u in neighbors(c)):
            self.adjacent_prunes[p.uid] = self.adjacent_prunes.get(p.uid, 0) + 1


def chase_cycle_system(seed: int) -> tuple[SystemState, AxialCoord, dict[AxialCoord, int]]:
    """Six particles ringed around an empty node hanging off a particle that will crash.

    The ring P1..P6 is a chain P1 <- P2 <- ... <- P6 with P1 attached to the
    doomed P0. P1 and P2 also touch Q, which hangs directly off the root, so
    a pruned ring particle may rejoin either Q or its own dissolving chain.
    """
    rng = _rng(seed)
    ring = [AxialCoord(1, 0), AxialCoord(1, -1), AxialCoord(0, -1), AxialCoord(-1, 0), AxialCoord(-1, 1),
            AxialCoord(0, 1)]
    p0, root, q = AxialCoord(2, 0), AxialCoord(3, -1), AxialCoord(2, -1)
    nodes = ring + [p0, root, q]
    s = build_system(nodes, [root], 10.0, 1.0, 5.0, seed=seed, random_orientation=True)
    parents = {p0: root, q: root, ring[0]: p0}
    for a, b in zip(ring[1:], ring[:-1]):
        parents[a] = b
    set_parents(s, parents)
    for p in s.occupancy.values():
        p.rr_cursor = int(rng.integers(6))
        p.share_cursor = int(rng.integers(6))
    depth = {c: i + 1 for i, c in enumerate(ring)}
    return s, p0, depth


def random_crash_system(seed: int) -> tuple[SystemState, AxialCoord, dict[AxialCoord, int]]:
    """A random blob with a BFS spanning tree and a random crashable victim that has descendants."""
    rng = _rng(seed)
    n = int(rng.integers(10, 41))
    blob = random_blob((0, 0), n, rng)
    root = blob[0]
    parents = _bfs_parents(blob, root, rng)
    s = build_system(blob, [root], 10.0, 1.0, 5.0, seed=seed, random_orientation=True)
    set_parents(s, parents)
    for p in s.occupancy.values():
        p.rr_cursor = int(rng.integers(6))
        p.share_cursor = int(rng.integers(6))
    kids: dict[AxialCoord, list[AxialCoord]] = {}
    for c, par in parents.items():
        kids.setdefault(par, []).append(c)
    candidates = [c for c in blob[1:] if c in kids and is_connected([x for x in blob if x != c])]
    if not candidates:
        return s, None, {}
    victim = candidates[int(rng.integers(len(candidates)))]
    depth: dict[AxialCoord, int] = {}
    frontier = [(victim, 0)]
    while frontier:
        c, d = frontier.pop()
        for ch in kids.get(c, []):
            depth[ch] = d + 1
            frontier.append((ch, d + 1))
    return s, victim, depth


def _bfs_parents(nodes: list[AxialCoord], root: AxialCoord, rng) -> dict[AxialCoord, AxialCoord]:
    node_set = set(nodes)
    parents: dict[AxialCoord, AxialCoord] = {}
    seen = {root}
    frontier = [root]
    while frontier:
        nxt = []
        for c in frontier:
            order = list(range(6))
            rng.shuffle(order)
            for d in order:
                u = neighbor(c, d)
                if u in node_set and u not in seen:
                    seen.add(u)
                    parents[u] = c
                    nxt.append(u)
        frontier = nxt
    return parents


def prune_scenario(seed: int, kind: str, max_rounds: int = 5000) -> dict:
    if kind == "chase":
        s, victim, depth = chase_cycle_system(seed)
    else:
        s, victim, depth = random_crash_system(seed)
    obs = PruneObserver()
    s.hooks.append(obs)
    uid_depth = {s.occupancy[c].uid: d for c, d in depth.items()}

    def stable(s: SystemState, row) -> bool:
        part = classify_forest(s)
        return not part.f_prime and not part.idle

    crashes = [(0, victim)] if victim is not None else []
    report = run(s, Schedule.permutation(seed), DemandOnly(), StopCondition("max_rounds", max_rounds),
                 crashes=crashes, on_round=stable)
    late = {u: (obs.first_prune.get(u), d) for u, d in uid_depth.items()
            if obs.first_prune.get(u) is None or obs.first_prune[u] > d}
    return {
        "seed": seed,
        "kind": kind,
        "severed": len(depth),
        "late_prunes": late,
        "max_adjacent_prunes": max(obs.adjacent_prunes.values(), default=0),
        "max_prune_count": obs.max_prune_count,
        "stabilized": report.summary["stop_reason"] == "observer",
        "rounds": report.summary["rounds"],
    }


# ------------------------------------------------------------ stabilization

STABILIZATION_C = 12


def double_row_system(m: int, seed: int) -> tuple[SystemState, AxialCoord, list[AxialCoord]]:
    """Two parallel rows hanging off one root; crashing the head of the lower row severs its ``m`` followers.

    The upper row (r = -1) stays attached, so every severed particle keeps a
    neighbour that is still root-connected and connectivity survives the crash.
    """
    rng = _rng(seed)
    root = AxialCoord(0, 0)
    lower = [AxialCoord(q, 0) for q in range(1, m + 2)]
    upper = [AxialCoord(q, -1) for q in range(1, m + 2)]
    nodes = [root] + lower + upper
    s = build_system(nodes, [root], 10.0, 1.0, 5.0, seed=seed, random_orientation=True)
    parents = {lower[0]: root, upper[0]: root}
    for i in range(1, m + 1):
        parents[lower[i]] = lower[i - 1]
        parents[upper[i]] = upper[i - 1]
    set_parents(s, parents)
    for p in s.occupancy.values():
        p.rr_cursor = int(rng.integers(6))
        p.share_cursor = int(rng.integers(6))
    return s, lower[0], lower[1:]


def far_end_system(m: int, seed: int) -> tuple[SystemState, AxialCoord, list[AxialCoord]]:
    """A row of ``m`` particles that, once its head crashes, touches the root's tree only at its far end.

    The surviving tree loops from the root up two rows and back down next to
    the tail, so rejoining has to work its way back along the whole row.
    """
    rng = _rng(seed)
    root = AxialCoord(0, 0)
    row = [AxialCoord(q, 0) for q in range(1, m + 2)]
    arc = [AxialCoord(0, 1), AxialCoord(0, 2)] + [AxialCoord(q, 2) for q in range(1, m + 2)] + [AxialCoord(m + 1, 1)]
    nodes = [root] + row + arc
    s = build_system(nodes, [root], 10.0, 1.0, 5.0, seed=seed, random_orientation=True)
    parents = {row[0]: root, arc[0]: root}
    for i in range(1, len(row)):
        parents[row[i]] = row[i - 1]
    for i in range(1, len(arc)):
        parents[arc[i]] = arc[i - 1]
    set_parents(s, parents)
    for p in s.occupancy.values():
        p.rr_cursor = int(rng.integers(6))
        p.share_cursor = int(rng.integers(6))
    return s, row[0], row[1:]


STABILIZATION_BUILDERS = {"double_row": double_row_system, "far_end": far_end_system}


def stabilization_run(m: int, seed: int, construction: str = "far_end") -> dict:
    """Rounds from the crash until every severed particle is back in a root-reachable tree."""
    s, victim, severed = STABILIZATION_BUILDERS[construction](m, seed)
    uids = [s.occupancy[c].uid for c in severed]
    rejoined = [None]

    def observe(s: SystemState, row) -> bool:
        part = classify_forest(s)
        if all(s.positions[u] in part.f_star for u in uids):
            rejoined[0] = s.round_counter
            return True
        return False

    limit = 4 * STABILIZATION_C * m * m + 100
    r = run(s, Schedule.permutation(seed), DemandOnly(), StopCondition("max_rounds", limit),
            crashes=[(0, victim)], on_round=observe)
    return {"m": m, "seed": seed, "construction": construction, "rounds": rejoined[0],
            "bound": STABILIZATION_C * m * m, "max_ledger_error": r.summary["max_ledger_error"]}


# ------------------------------------------------------------ scaling and ablation

def demand_system(n: int, seed: int, communication: bool = True) -> SystemState:
    return build_system(spiral((0, 0), n), [(0, 0)], 10.0, 1.0, 5.0, seed=seed, communication=communication)


def first_all_met(n: int, seed: int, max_rounds: int = 200000) -> dict:
    s = demand_system(n, seed)
    r = run(s, Schedule.permutation(seed), DemandOnly(), StopCondition("all_met_once", max_rounds))
    return {"n": n, "seed": seed, "rounds": r.first_all_met_round, "max_starvation": r.max_starvation,
            "max_ledger_error": r.summary["max_ledger_error"]}


def all_acted_once(n: int, seed: int, max_rounds: int = 200000) -> int | None:
    """Rounds until every particle has actually spent energy at least once (reported, not asserted)."""
    s = demand_system(n, seed)
    done = [None]

    def observe(s, row):
        if all(p.actions > 0 for p in s.occupancy.values()):
            done[0] = s.round_counter
            return True
        return False

    run(s, Schedule.permutation(seed), DemandOnly(), StopCondition("max_rounds", max_rounds), on_round=observe)
    return done[0]


def scaling_fit(means: dict[int, float]) -> dict:
    """Least-squares quadratic fit; the superlinear ratio is the quadratic term's share at the largest n."""
    ns = np.array(sorted(means), dtype=float)
    ys = np.array([means[int(n)] for n in ns])
    c2, c1, c0 = np.polyfit(ns, ys, 2)
    n_max = ns[-1]
    fit_max = c2 * n_max**2 + c1 * n_max + c0
    lin = np.polyfit(ns, ys, 1)
    return {"quadratic": (float(c2), float(c1), float(c0)), "linear": tuple(float(x) for x in lin),
            "superlinear_ratio": float(abs(c2) * n_max**2 / fit_max) if fit_max > 0 else math.inf}


def ablation_run(seed: int, communication: bool, rounds: int = 1000) -> dict:
    s = demand_system(91, seed, communication)
    r = run(s, Schedule.permutation(seed), DemandOnly(), StopCondition("max_rounds", rounds))
    acted = sum(1 for p in s.occupancy.values() if p.actions > 0) / len(s.occupancy)
    return {"seed": seed, "communication": communication, "met_fraction": r.summary["met_fraction"],
            "acted_fraction": acted, "csv": rounds_csv(r.rounds), "max_ledger_error": r.summary["max_ledger_error"]}


# ------------------------------------------------------------ composition

class AuditedHexagon(HexagonFormation):
    """Hexagon formation that records the guard state of every particle that moves."""

    def __init__(self, seed_coord, move_cost):
        super().__init__(AxialCoord(*seed_coord), move_cost)
        self.bad_actions = 0

    def perform(self, s, c, desc):
        p = s.occupancy[c]
        # the debit has already happened, so add the cost back for the guard check
        if p.inhibit or less(p.e_bat + self.move_cost, self.move_cost):
            self.bad_actions += 1
        super().perform(s, c, desc)


def composition_run(n: int, seed: int, roots: int = 1, max_rounds: int = 100000) -> dict:
    rng = _rng(seed)
    blob = random_blob((0, 0), n, rng)
    extra = [blob[int(i)] for i in rng.choice(np.arange(1, n), roots - 1, replace=False)] if roots > 1 else []
    s = build_system(blob, [blob[0]] + extra, 10.0, 1.0, 5.0, seed=seed)
    beh = AuditedHexagon((0, 0), 5.0)
    disconnected = [0]
    last_action = [0, 0]
    max_gap = [0]

    def observe(s, row) -> bool:
        if not is_connected(s.live_coords()):
            disconnected[0] += 1
        if row.actions_performed:
            max_gap[0] = max(max_gap[0], s.round_counter - last_action[0])
            last_action[0] = s.round_counter
        return False

    r = run(s, Schedule.permutation(seed), beh, StopCondition("shape_complete", max_rounds), on_round=observe)
    return {
        "n": n,
        "seed": seed,
        "roots": roots,
        "rounds": r.summary["rounds"],
        "complete": r.summary["stop_reason"] == "shape_complete",
        "exact": set(s.occupancy) == set(spiral((0, 0), n)),
        "disconnected_rounds": disconnected[0],
        "bad_actions": beh.bad_actions,
        "moves": beh.moves,
        "max_action_gap": max_gap[0],
        "max_ledger_error": r.summary["max_ledger_error"],
    }


# ------------------------------------------------------------ growth

def growth_run(seed: int, rounds: int = 1025, schedule: str = "random", repro_cost: float = 5.0,
               max_size: int = 100000) -> dict:
    s = build_system([(0, 0)], [(0, 0)], 10.0, 1.0, repro_cost, seed=seed)
    r = run(s, Schedule(schedule, seed), Reproduction(repro_cost, max_size), StopCondition("max_rounds", rounds))
    per_round = [row.reproductions for row in r.rounds[1:]]
    avg = moving_average(per_round[:1000], 10)
    cycles_ok = True
    part: ForestPartition = classify_forest(s)
    if part.f_prime or part.idle:
        cycles_ok = False
    return {
        "seed": seed,
        "schedule": schedule,
        "population": r.summary["population"],
        "alternations": zero_positive_alternations(avg),
        "forest_ok": cycles_ok,
        "max_ledger_error": r.summary["max_ledger_error"],
        "csv": rounds_csv(r.rounds),
    }


__all__ = [name for name in dir() if not name.startswith("_") and name not in ("annotations",)]
