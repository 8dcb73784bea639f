"""Array-backed run driver that hands whole rounds to the round kernel.

Only used for runs the kernel can reproduce exactly: demand-only behavior
with a uniform demand, round-robin child selection, a permutation schedule
and no crashes, traces or hooks. Per-round statistics and audits are
computed from the arrays and match the object engine bit for bit.
"""

from __future__ import annotations

import math

import numpy as np

from .kernel import get_backend
from .lattice import neighbor
from .metrics import RoundStats, round_stats
from .system import EPS, EngineFault, Role

_ROLE_CODE = {Role.IDLE: 0, Role.ACTIVE: 1, Role.ROOT: 2}
_CODE_ROLE = {v: k for k, v in _ROLE_CODE.items()}


class ArrayState:
    """Flat copy of a SystemState's particles, indexed by position in ``uids``."""

    def __init__(self, s):
        self.uids = s.live_uids()
        self.index = {u: i for i, u in enumerate(self.uids)}
        n = len(self.uids)
        parts = [s.particle_by_uid(u) for u in self.uids]
        coords = [s.positions[u] for u in self.uids]
        at = {c: i for i, c in enumerate(coords)}
        self.coords = coords
        self.nbr = np.full((n, 6), -1, dtype=np.int64)
        for i, c in enumerate(coords):
            for d in range(6):
                self.nbr[i, d] = at.get(neighbor(c, d), -1)
        self.e_bat = np.array([p.e_bat for p in parts], dtype=np.float64)
        self.role = np.array([_ROLE_CODE[p.role] for p in parts], dtype=np.int8)
        self.parent = np.array([-1 if p.parent is None else p.parent for p in parts], dtype=np.int8)
        self.stress = np.array([p.stress for p in parts], dtype=np.uint8)
        self.inhibit = np.array([p.inhibit for p in parts], dtype=np.uint8)
        self.prune = np.array([p.prune for p in parts], dtype=np.uint8)
        self.rr_cursor = np.array([p.rr_cursor for p in parts], dtype=np.int8)
        self.share_cursor = np.array([p.share_cursor for p in parts], dtype=np.int8)
        self.orient = np.array([p.orientation for p in parts], dtype=np.int8)
        self.demand_index = np.array([p.demand_index for p in parts], dtype=np.int64)
        self.actions = np.array([p.actions for p in parts], dtype=np.int64)
        self.prunes = np.array([p.prunes for p in parts], dtype=np.int64)
        self.crashed = np.array([p.crashed for p in parts], dtype=np.uint8)
        self.totals = np.array([s.harvested_total, s.spent_total, s.transferred_total], dtype=np.float64)
        self.counts = np.array([s.transfers_total, s.actions_total], dtype=np.int64)

    FIELDS = ("nbr", "e_bat", "role", "parent", "stress", "inhibit", "prune", "rr_cursor", "share_cursor",
              "orient", "demand_index", "actions", "prunes", "crashed", "totals", "counts")

    def as_lists(self) -> dict:
        return {f: getattr(self, f).tolist() for f in self.FIELDS}

    def load_lists(self, lists: dict) -> None:
        for f in self.FIELDS:
            arr = getattr(self, f)
            arr[...] = np.asarray(lists[f], dtype=arr.dtype)

    def write_back(self, s) -> None:
        for i, u in enumerate(self.uids):
            p = s.particle_by_uid(u)
            p.e_bat = float(self.e_bat[i])
            p.role = _CODE_ROLE[int(self.role[i])]
            p.parent = None if self.parent[i] < 0 else int(self.parent[i])
            p.stress = bool(self.stress[i])
            p.inhibit = bool(self.inhibit[i])
            p.prune = bool(self.prune[i])
            p.rr_cursor = int(self.rr_cursor[i])
            p.share_cursor = int(self.share_cursor[i])
            p.demand_index = int(self.demand_index[i])
            p.actions = int(self.actions[i])
            p.prunes = int(self.prunes[i])
        s.harvested_total = float(self.totals[0])
        s.spent_total = float(self.totals[1])
        s.transferred_total = float(self.totals[2])
        s.transfers_total = int(self.counts[0])
        s.actions_total = int(self.counts[1])

    def faulty_population(self) -> int:
        """Non-idle particles whose pointer chain misses a live, unflagged Root (pointer doubling)."""
        n = len(self.uids)
        idx = np.arange(n)
        ok = (self.crashed == 0) & (self.role != 0) & (self.prune == 0)
        par = np.where(self.parent >= 0, self.nbr[idx, np.maximum(self.parent, 0)], -1)
        nxt = np.where(self.role == 2, idx, np.where(par >= 0, par, n))
        nxt = np.where(ok, nxt, n)
        nxt = np.append(nxt, n)
        for _ in range(max(1, int(n).bit_length() + 1)):
            nxt = nxt[nxt]
        end = nxt[:n]
        reached = (end < n) & (self.role[np.minimum(end, n - 1)] == 2)
        stuck = (end < n) & ~reached
        if stuck.any():
            raise EngineFault("parent-pointer cycle among unflagged particles")
        non_idle = (self.crashed == 0) & (self.role != 0)
        return int(np.count_nonzero(non_idle & ~reached))


def run_kernel(s, sch, behavior, stop, backend: str | None = None):
    from .scheduler import RunReport, _summary, audit

    name, mod = get_backend(backend)
    delta = behavior.delta if behavior.delta is not None else s.demand.value
    kappa, alpha = s.kappa, s.alpha
    comm, rep = bool(s.communication), bool(s.repair)

    max_err = audit(s)
    rows: list[RoundStats] = [round_stats(s, None)]
    a = ArrayState(s)
    n = len(a.uids)
    lists = a.as_lists() if name == "python" else None

    stressed = (delta - a.e_bat) >= EPS
    current = stressed.astype(np.int64)
    worst = current.copy()
    met = np.array([u in s.met_uids for u in a.uids], dtype=bool) | (a.actions > 0) | ~stressed
    first_met = s.round_counter if bool(met.all()) else None
    stop_reason = "max_rounds"
    while True:
        if stop.kind == "all_met_once" and bool(met.all()):
            stop_reason = stop.kind
            break
        if stop.kind == "all_recharged" and not bool(((delta - a.e_bat) >= EPS).any()):
            stop_reason = stop.kind
            break
        if stop.kind == "target_size" and n >= stop.target:
            stop_reason = stop.kind
            break
        if s.round_counter >= stop.max_rounds:
            break
        sch.start_round(s)
        order = np.array([a.index[u] for u in sch.round_plan()], dtype=np.int64)
        if lists is not None:
            fault = mod.run_round(order.tolist(), lists["nbr"], lists["e_bat"], lists["role"], lists["parent"],
                                  lists["stress"], lists["inhibit"], lists["prune"], lists["rr_cursor"],
                                  lists["share_cursor"], lists["orient"], lists["demand_index"], lists["actions"],
                                  lists["prunes"], lists["crashed"], lists["totals"], lists["counts"],
                                  kappa, alpha, delta, comm, rep)
            a.load_lists(lists)
        else:
            fault = mod.run_round(order, a.nbr, a.e_bat, a.role, a.parent, a.stress, a.inhibit, a.prune,
                                  a.rr_cursor, a.share_cursor, a.orient, a.demand_index, a.actions, a.prunes,
                                  a.crashed, a.totals, a.counts, kappa, alpha, delta, comm, rep)
        if fault >= 0:
            a.write_back(s)
            raise EngineFault(f"particle at {a.coords[fault]} read inhibit of a missing or crashed parent",
                              s.snapshot())
        s.round_counter += 1
        row, err = _stats(s, a, rows[-1], delta)
        rows.append(row)
        max_err = max(max_err, err)
        stressed = (delta - a.e_bat) >= EPS
        current = np.where(stressed, current + 1, 0)
        worst = np.maximum(worst, current)
        met |= (a.actions > 0) | ~stressed
        if first_met is None and bool(met.all()):
            first_met = s.round_counter
    a.write_back(s)
    s.met_uids.update(u for u, m in zip(a.uids, met.tolist()) if m)
    starv = int(worst.max()) if n else 0
    summary = _summary(s, rows, first_met, starv, stop_reason, [], max_err)
    return RunReport(rows, summary, [], None, None, first_met, starv, name, {})


def _stats(s, a: ArrayState, prev: RoundStats, delta: float) -> tuple[RoundStats, float]:
    e = a.e_bat
    total = math.fsum(e.tolist())
    harvested, spent = float(a.totals[0]), float(a.totals[1])
    if e.min() < -EPS or e.max() > s.kappa + EPS:
        raise EngineFault("battery out of bounds")
    err = abs(total - (harvested - spent - s.crashed_energy))
    if err > 1e-6:
        raise EngineFault(f"energy ledger off by {err}")
    idle = a.role == 0
    if ((a.parent >= 0) & idle).any():
        raise EngineFault("idle particle has a parent")
    active = a.role == 1
    if (active & (a.parent < 0)).any():
        raise EngineFault("active particle has no parent")
    transfers, actions = int(a.counts[0]), int(a.counts[1])
    return RoundStats(
        round=s.round_counter,
        total_energy=total,
        harvested_cum=harvested,
        spent_cum=spent,
        num_stressed=int(np.count_nonzero((delta - e) >= EPS)),
        num_inhibited=int(np.count_nonzero(a.inhibit)),
        num_idle=int(np.count_nonzero(idle)),
        num_crashed=0,
        actions_performed=actions - prev.actions_cum,
        reproductions=0,
        faulty_tree_population=a.faulty_population(),
        transfers=transfers - prev.transfers_cum,
        harvested=harvested - prev.harvested_cum,
        actions_cum=actions,
        transfers_cum=transfers,
        reproductions_cum=s.reproductions_total,
        population=len(a.uids),
    ), err
