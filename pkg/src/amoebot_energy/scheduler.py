"""Fair asynchronous schedules, the integrated activation step and the run driver."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .behaviors import BehaviorHook, DemandOnly
from .energy import NOT_PERFORMED, ActionOutcome, activate_energy, run_phases
from .lattice import AxialCoord, is_connected
from .metrics import RoundStats, StarvationTracker, classify_forest, round_stats
from .repair import activate_repair, inject_crash
from .system import EPS, EngineFault, ParameterError, Role, SystemState

SCHEDULE_KINDS = ("permutation", "weighted", "random", "explicit")


def schedule_rng(seed: int) -> np.random.Generator:
    # a stream distinct from the system's own generator for the same seed
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, 1])))


class Schedule:
    """A fair activation sequence split into asynchronous rounds.

    ``permutation`` activates every particle live at the start of a round
    exactly once, in a fresh seeded random order. ``weighted`` draws
    activations with fixed per-particle weights until every such particle has
    been activated at least once; ``random`` is the same with equal weights
    (uniform sequential activation, so a round usually activates a particle
    several times). ``explicit`` replays a list of coordinates;
    a round closes as soon as every live participant has been activated, and
    the run ends when the list is exhausted. Crashed particles are skipped;
    particles created mid-round take part from the next round on.
    """

    def __init__(self, kind: str = "permutation", seed: int = 0, sequence: Sequence[tuple[int, int]] | None = None):
        if kind not in SCHEDULE_KINDS:
            raise ParameterError(f"unknown schedule kind {kind!r}")
        if kind == "explicit" and sequence is None:
            raise ParameterError("explicit schedule needs a sequence")
        self.kind = kind
        self.seed = seed
        self.rng = schedule_rng(seed)
        self.sequence = [AxialCoord(*c) for c in sequence] if sequence is not None else []
        self._pos = 0
        self._plan: list[int] = []
        self._idx = 0
        self._remaining: set[int] = set()
        self._participants: list[int] = []
        self._weights: dict[int, float] = {}
        self._epoch = 0

    @classmethod
    def permutation(cls, seed: int = 0) -> "Schedule":
        return cls("permutation", seed)

    @classmethod
    def weighted(cls, seed: int = 0) -> "Schedule":
        return cls("weighted", seed)

    @classmethod
    def random(cls, seed: int = 0) -> "Schedule":
        return cls("random", seed)

    @classmethod
    def explicit(cls, sequence: Sequence[tuple[int, int]]) -> "Schedule":
        return cls("explicit", 0, sequence)

    def start_round(self, s: SystemState) -> None:
        uids = s.live_uids()
        self._participants = uids
        self._remaining = set(uids)
        self._epoch = s.crash_epoch
        if self.kind == "permutation":
            self._plan = [int(u) for u in self.rng.permutation(np.array(uids, dtype=np.int64))]
            self._idx = 0
        elif self.kind == "weighted":
            for u in uids:
                if u not in self._weights:
                    self._weights[u] = float(self.rng.uniform(0.1, 1.0))
        elif self.kind == "random":
            for u in uids:
                self._weights.setdefault(u, 1.0)

    def round_plan(self) -> list[int]:
        """Uids in activation order for the current permutation round."""
        return list(self._plan)

    def _weighted_pick(self, s: SystemState) -> int:
        while True:
            live = self._participants
            if self.kind == "random":
                uid = live[int(self.rng.integers(len(live)))]
            else:
                w = np.array([self._weights[u] for u in live])
                uid = live[int(self.rng.choice(len(live), p=w / w.sum()))]
            if s.is_live(s.positions[uid]):
                return uid
            # a particle crashed mid-round: drop it and draw again
            self._participants = [u for u in live if s.is_live(s.positions[u])]

    def next_activation(self, s: SystemState) -> AxialCoord | None:
        """The next coordinate to activate, or None once an explicit list runs out."""
        if self.kind == "permutation":
            while self._idx < len(self._plan):
                uid = self._plan[self._idx]
                self._idx += 1
                c = s.positions[uid]
                if s.is_live(c):
                    self._remaining.discard(uid)
                    return c
            return None
        if self.kind in ("weighted", "random"):
            if self.round_closed(s):
                return None
            uid = self._weighted_pick(s)
            self._remaining.discard(uid)
            return s.positions[uid]
        while self._pos < len(self.sequence):
            c = self.sequence[self._pos]
            self._pos += 1
            p = s.occupancy.get(c)
            if p is None or p.crashed:
                raise EngineFault(f"explicit schedule activates empty or crashed node {c}")
            self._remaining.discard(p.uid)
            return c
        return None

    def round_closed(self, s: SystemState) -> bool:
        if self._remaining and self._epoch != s.crash_epoch:
            self._epoch = s.crash_epoch
            self._remaining = {u for u in self._remaining if s.is_live(s.positions[u])}
        return not self._remaining


STOP_KINDS = ("max_rounds", "all_met_once", "all_recharged", "shape_complete", "target_size")


@dataclass(frozen=True)
class StopCondition:
    """Evaluated at round boundaries; ``max_rounds`` always caps the run."""

    kind: str = "max_rounds"
    max_rounds: int = 1000
    target: int = 0

    def __post_init__(self):
        if self.kind not in STOP_KINDS:
            raise ParameterError(f"unknown stop condition {self.kind!r}")
        if self.max_rounds < 0:
            raise ParameterError("max_rounds must be non-negative")

    def met(self, s: SystemState, behavior: BehaviorHook | None) -> bool:
        if self.kind == "all_met_once":
            return all_met_once(s)
        if self.kind == "all_recharged":
            return all_recharged(s)
        if self.kind == "shape_complete":
            return behavior is not None and behavior.complete(s)
        if self.kind == "target_size":
            return len(s.live_coords()) >= self.target
        return False


def note_met(s: SystemState) -> None:
    """Record particles that have acted or currently hold at least their demand."""
    for c, p in s.occupancy.items():
        if not p.crashed and p.uid not in s.met_uids and (p.actions > 0 or s.delta(c) - p.e_bat < EPS):
            s.met_uids.add(p.uid)


def all_met_once(s: SystemState) -> bool:
    """Every live particle has met its demand (held enough energy for it) at least once."""
    return all(p.uid in s.met_uids for p in s.occupancy.values() if not p.crashed)


def all_recharged(s: SystemState) -> bool:
    return all(s.delta(c) - p.e_bat < EPS for c, p in s.occupancy.items() if not p.crashed)


def step(s: SystemState, c: AxialCoord, behavior: BehaviorHook | None) -> ActionOutcome:
    """One activation: repair first (when enabled), then the energy phases.

    With repair on, a particle that is still idle after the repair step (or
    has just pruned itself) does nothing more; one that has just rejoined
    runs the energy phases in the same activation. With repair off the
    plain energy handler runs, where the idle join uses up the activation.
    """
    p = s.occupancy[c]
    if p.crashed:
        raise EngineFault(f"activated crashed particle at {c}")
    if behavior is not None:
        behavior.pre_activation(s, c)
    if s.repair:
        outcome = activate_repair(s, c)
        if outcome.kind == "pruned" or p.role is Role.IDLE:
            return NOT_PERFORMED
        return run_phases(s, c, behavior)
    return activate_energy(s, c, behavior)


@dataclass
class RunReport:
    rounds: list[RoundStats]
    summary: dict
    crash_log: list[dict] = field(default_factory=list)
    trace: list[list] | None = None
    activations: list[AxialCoord] | None = None
    first_all_met_round: int | None = None
    max_starvation: int = 0
    backend: str = "object"
    frames: dict[int, dict] = field(default_factory=dict)


TRACE_COLUMNS = ("round", "coord", "role_before", "role_after", "e_bat_before", "e_bat_after",
                 "stress", "inhibit", "transferred", "performed")


def audit(s: SystemState, check_connectivity: bool = True) -> float:
    """Raise EngineFault if a boundary invariant is broken; returns the ledger error."""
    kappa = s.kappa
    occ = s.occupancy
    for c, p in occ.items():
        if p.crashed:
            continue
        if p.e_bat < -EPS or p.e_bat > kappa + EPS:
            raise EngineFault(f"battery out of bounds at {c}: {p.e_bat}", s.snapshot())
        if p.role is Role.IDLE and p.parent is not None:
            raise EngineFault(f"idle particle at {c} has a parent", s.snapshot())
        if p.role is Role.ACTIVE:
            # a child whose parent moved away keeps a stale pointer until it prunes
            if p.parent is None or (s.parent_coord(c) not in occ and not p.prune):
                raise EngineFault(f"active particle at {c} has a dangling parent pointer", s.snapshot())
    err = s.ledger_error()
    if err > 1e-6:
        raise EngineFault(f"energy ledger off by {err}", s.snapshot())
    if check_connectivity and not is_connected(s.live_coords()):
        raise EngineFault("live particles are disconnected", s.snapshot())
    return err


def _kernel_eligible(s: SystemState, behavior, crashes, trace, record_activations, frames_every) -> bool:
    return (
        type(behavior) is DemandOnly
        and s.demand.kind == "uniform"
        and s.child_selection == "round-robin"
        and not crashes
        and not trace
        and not record_activations
        and not frames_every
        and not s.hooks
        and not any(p.crashed for p in s.occupancy.values())
    )


def run(
    s: SystemState,
    sch: Schedule,
    behavior: BehaviorHook | None,
    stop: StopCondition,
    *,
    crashes: Iterable[tuple[int, tuple[int, int]]] = (),
    trace: bool = False,
    record_activations: bool = False,
    frames_every: int = 0,
    use_kernel: bool | None = None,
    on_round: Callable[[SystemState, RoundStats], bool | None] | None = None,
) -> RunReport:
    """Drive ``s`` round by round until ``stop`` holds or ``stop.max_rounds`` is reached.

    Crash events ``(round, coord)`` fire at the boundary where
    ``round_counter == round``, before the next round starts. ``use_kernel``
    None picks the array kernel whenever the run qualifies. ``on_round`` is
    called at every boundary after the statistics are taken; returning True
    ends the run.
    """
    s.behavior = behavior
    if behavior is not None:
        behavior.bind(s)
    crash_list = sorted((int(r), AxialCoord(*c)) for r, c in crashes)
    eligible = sch.kind == "permutation" and on_round is None and _kernel_eligible(
        s, behavior, crash_list, trace, record_activations, frames_every)
    if use_kernel is None:
        use_kernel = eligible
    elif use_kernel and not eligible:
        raise ParameterError("this run cannot use the array kernel")
    if use_kernel:
        from .fastpath import run_kernel

        return run_kernel(s, sch, behavior, stop)
    return _run_objects(s, sch, behavior, stop, crash_list, trace, record_activations, frames_every, on_round)


def _summary(s: SystemState, rounds: list[RoundStats], first_met: int | None, starv: int, stop_reason: str,
             crash_log: list[dict], max_ledger_error: float) -> dict:
    live = [p for p in s.occupancy.values() if not p.crashed]
    met = sum(1 for p in live if p.uid in s.met_uids)
    part = classify_forest(s)
    return {
        "rounds": s.round_counter,
        "stop_reason": stop_reason,
        "first_all_met_round": first_met,
        "met_fraction": met / len(live) if live else 0.0,
        "max_starvation": starv,
        "population": len(live),
        "crashed": len(s.occupancy) - len(live),
        "crashes_accepted": sum(1 for e in crash_log if e["accepted"]),
        "crashes_rejected": sum(1 for e in crash_log if not e["accepted"]),
        "total_energy": rounds[-1].total_energy,
        "harvested": s.harvested_total,
        "spent": s.spent_total,
        "crashed_energy": s.crashed_energy,
        "transferred": s.transferred_total,
        "transfers": s.transfers_total,
        "actions": s.actions_total,
        "reproductions": s.reproductions_total,
        "ledger_error": s.ledger_error(),
        "max_ledger_error": max_ledger_error,
        "faulty_tree_population": len(part.f_prime),
        "idle": len(part.idle),
    }


def _run_objects(s, sch, behavior, stop, crash_list, trace, record_activations, frames_every, on_round) -> RunReport:
    starvation = StarvationTracker()
    first_met = None
    crash_log: list[dict] = []
    trace_rows: list[list] | None = [] if trace else None
    acts: list[AxialCoord] | None = [] if record_activations else None
    frames: dict[int, dict] = {}

    max_err = audit(s)
    rows = [round_stats(s, None)]
    starvation.update(s)
    note_met(s)
    if all_met_once(s):
        first_met = s.round_counter
    if frames_every:
        frames[s.round_counter] = s.snapshot()
    ci = 0
    stop_reason = "max_rounds"
    while True:
        if stop.met(s, behavior):
            stop_reason = stop.kind
            break
        if s.round_counter >= stop.max_rounds:
            break
        while ci < len(crash_list) and crash_list[ci][0] <= s.round_counter:
            r, c = crash_list[ci]
            ci += 1
            decision = inject_crash(s, c)
            crash_log.append({"round": s.round_counter, "coord": str(c), "accepted": decision.accepted,
                              "reason": decision.reason})
        sch.start_round(s)
        ended = False
        while True:
            c = sch.next_activation(s)
            if c is None:
                ended = not sch.round_closed(s)
                break
            if trace_rows is not None:
                p = s.occupancy[c]
                role_before, e_before = p.role.value, p.e_bat
                moved_before, acted_before = s.transferred_total, s.actions_total
            step(s, c, behavior)
            if acts is not None:
                acts.append(c)
            if trace_rows is not None:
                trace_rows.append([s.round_counter + 1, str(c), role_before, p.role.value, repr(e_before),
                                   repr(p.e_bat), int(p.stress), int(p.inhibit),
                                   repr(s.transferred_total - moved_before), s.actions_total - acted_before])
            if sch.round_closed(s):
                break
        if ended:
            stop_reason = "schedule_exhausted"
            break
        s.round_counter += 1
        max_err = max(max_err, audit(s))
        part = classify_forest(s)
        row = round_stats(s, rows[-1], part)
        rows.append(row)
        starvation.update(s)
        note_met(s)
        if first_met is None and all_met_once(s):
            first_met = s.round_counter
        if frames_every and s.round_counter % frames_every == 0:
            frames[s.round_counter] = s.snapshot()
        if on_round is not None and on_round(s, row):
            stop_reason = "observer"
            break
    summary = _summary(s, rows, first_met, starvation.max(), stop_reason, crash_log, max_err)
    return RunReport(rows, summary, crash_log, trace_rows, acts, first_met, starvation.max(), "object", frames)
