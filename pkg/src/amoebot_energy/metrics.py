"""Read-only observers: forest classification, per-round statistics and export."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field

from .lattice import AxialCoord, neighbor
from .system import EngineFault, Role, SystemState, less, total_energy

CSV_COLUMNS = (
    "round",
    "total_energy",
    "num_stressed",
    "num_inhibited",
    "num_idle",
    "actions_performed",
    "transfers",
    "harvested",
    "reproductions",
)


@dataclass(frozen=True)
class RoundStats:
    round: int
    total_energy: float
    harvested_cum: float
    spent_cum: float
    num_stressed: int
    num_inhibited: int
    num_idle: int
    num_crashed: int
    actions_performed: int
    reproductions: int
    faulty_tree_population: int
    transfers: int
    harvested: float
    actions_cum: int = 0
    transfers_cum: int = 0
    reproductions_cum: int = 0
    population: int = 0

    def csv_row(self) -> list[str]:
        return [repr(v) if isinstance(v, float) else str(v) for v in (getattr(self, k) for k in CSV_COLUMNS)]


@dataclass
class ForestPartition:
    f_star: set[AxialCoord] = field(default_factory=set)
    f_prime: set[AxialCoord] = field(default_factory=set)
    idle: set[AxialCoord] = field(default_factory=set)


def classify_forest(s: SystemState) -> ForestPartition:
    """Split live particles into root-reachable trees, faulty trees and idle ones.

    A particle belongs to F* when its parent chain reaches a live Root through
    live, non-idle particles none of which carries a prune flag. Pointer
    cycles are tolerated only while some member is prune-flagged (a chase
    cycle being dissolved); an unflagged cycle is an invariant violation.
    """
    occ = s.occupancy
    out = ForestPartition()
    status: dict[AxialCoord, bool] = {}
    for start, p0 in occ.items():
        if p0.crashed:
            continue
        if p0.role is Role.IDLE:
            out.idle.add(start)
            continue
        chain: list[AxialCoord] = []
        on_chain: set[AxialCoord] = set()
        c = start
        while True:
            if c in status:
                verdict = status[c]
                break
            p = occ.get(c)
            if p is None or p.crashed or p.role is Role.IDLE or p.prune:
                verdict = False
                break
            if c in on_chain:
                cyc = chain[chain.index(c):]
                raise EngineFault(f"parent-pointer cycle through {sorted(cyc)}", s.snapshot())
            chain.append(c)
            on_chain.add(c)
            if p.role is Role.ROOT:
                verdict = True
                break
            c = neighbor(c, p.parent)
        for x in chain:
            status[x] = verdict
        if start not in status:
            status[start] = False
    for c, ok in status.items():
        (out.f_star if ok else out.f_prime).add(c)
    return out


def count_stressed(s: SystemState) -> int:
    return sum(1 for c, p in s.occupancy.items() if not p.crashed and less(p.e_bat, s.delta(c)))


def round_stats(s: SystemState, prev: RoundStats | None, partition: ForestPartition | None = None) -> RoundStats:
    """Statistics at the current round boundary; per-round fields are deltas against ``prev``."""
    live = [p for p in s.occupancy.values() if not p.crashed]
    part = partition if partition is not None else classify_forest(s)
    if prev is None:
        prev_actions = prev_transfers = prev_repro = 0
        prev_harvest = 0.0
    else:
        prev_actions, prev_transfers, prev_repro = prev.actions_cum, prev.transfers_cum, prev.reproductions_cum
        prev_harvest = prev.harvested_cum
    return RoundStats(
        round=s.round_counter,
        total_energy=total_energy(s),
        harvested_cum=s.harvested_total,
        spent_cum=s.spent_total,
        num_stressed=count_stressed(s),
        num_inhibited=sum(1 for p in live if p.inhibit),
        num_idle=sum(1 for p in live if p.role is Role.IDLE),
        num_crashed=len(s.occupancy) - len(live),
        actions_performed=s.actions_total - prev_actions,
        reproductions=s.reproductions_total - prev_repro,
        faulty_tree_population=len(part.f_prime),
        transfers=s.transfers_total - prev_transfers,
        harvested=s.harvested_total - prev_harvest,
        actions_cum=s.actions_total,
        transfers_cum=s.transfers_total,
        reproductions_cum=s.reproductions_total,
        population=len(live),
    )


class StarvationTracker:
    """Consecutive rounds each particle has been stressed, sampled at round boundaries."""

    def __init__(self):
        self.current: dict[int, int] = {}
        self.worst: dict[int, int] = {}

    def update(self, s: SystemState) -> None:
        for c, p in s.occupancy.items():
            if p.crashed:
                self.current.pop(p.uid, None)
                continue
            if less(p.e_bat, s.delta(c)):
                n = self.current.get(p.uid, 0) + 1
                self.current[p.uid] = n
                if n > self.worst.get(p.uid, 0):
                    self.worst[p.uid] = n
            else:
                self.current[p.uid] = 0

    def max(self) -> int:
        return max(self.worst.values(), default=0)


@dataclass(frozen=True)
class StarvationRecord:
    coord: AxialCoord
    rounds_continuously_stressed: int


def max_starvation(s: SystemState, report) -> int:
    """Longest stretch, in rounds, any particle stayed stressed during ``report``'s run."""
    return report.max_starvation


def moving_average(values: list[float], window: int) -> list[float]:
    out = []
    acc = 0.0
    for i, v in enumerate(values):
        acc += v
        if i >= window:
            acc -= values[i - window]
        out.append(acc / min(i + 1, window))
    return out


def zero_positive_alternations(values: list[float], tol: float = 1e-12) -> int:
    """Number of switches between zero-valued and positive-valued entries."""
    signs = [v > tol for v in values]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def rounds_csv(rows: list[RoundStats]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow(row.csv_row())
    return buf.getvalue()


def summary_json(summary: dict) -> str:
    return json.dumps(summary, indent=2, sort_keys=True) + "\n"


def stats_dict(row: RoundStats) -> dict:
    return asdict(row)
