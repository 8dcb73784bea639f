"""Forest-Prune-Repair and the crash-fault injector."""

from __future__ import annotations

from dataclasses import dataclass

from .energy import join_forest
from .lattice import AxialCoord, Direction, is_connected, neighbor, opposite
from .system import EngineFault, Role, SystemState


@dataclass(frozen=True)
class RepairOutcome:
    kind: str  # "pruned" | "rejoined" | "nochange"
    direction: Direction | None = None


PRUNED = RepairOutcome("pruned")
NO_CHANGE = RepairOutcome("nochange")


def rejoined(d: Direction) -> RepairOutcome:
    return RepairOutcome("rejoined", d)


def _flag_children(s: SystemState, c: AxialCoord) -> None:
    occ = s.occupancy
    for d in range(6):
        q = occ.get(neighbor(c, d))
        if q is not None and not q.crashed and q.parent == opposite(d):
            q.prune = True


def parent_crashed(s: SystemState, c: AxialCoord) -> bool:
    p = s.occupancy[c]
    if p.parent is None:
        return False
    q = s.occupancy.get(neighbor(c, p.parent))
    return q is not None and q.crashed


def activate_repair(s: SystemState, c: AxialCoord) -> RepairOutcome:
    p = s.occupancy[c]
    if p.crashed:
        raise EngineFault(f"activated crashed particle at {c}")
    if p.prune or parent_crashed(s, c):
        _flag_children(s, c)
        p.parent = None
        p.prune = False
        p.stress = False
        p.inhibit = False
        if p.role is not Role.ROOT:
            p.role = Role.IDLE
        p.prunes += 1
        s.emit("prune", c)
        return PRUNED
    if p.role is Role.IDLE:
        d = join_forest(s, c, respect_prune=True)
        if d is not None:
            s.emit("rejoin", c)
            return rejoined(d)
    return NO_CHANGE


@dataclass(frozen=True)
class CrashDecision:
    accepted: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.accepted


def inject_crash(s: SystemState, c: tuple[int, int]) -> CrashDecision:
    """Crash the particle at ``c`` unless that would break connectivity or root reliability."""
    c = AxialCoord(*c)
    p = s.occupancy.get(c)
    if p is None:
        return CrashDecision(False, "unoccupied")
    if p.crashed:
        return CrashDecision(False, "already crashed")
    remaining = [x for x, q in s.occupancy.items() if not q.crashed and x != c]
    if not is_connected(remaining):
        return CrashDecision(False, "connectivity")
    if not any(s.occupancy[x].role is Role.ROOT for x in remaining):
        return CrashDecision(False, "root-reliability")
    p.crashed = True
    s.crash_epoch += 1
    s.crashed_energy += p.e_bat
    for q in s.occupancy.values():
        q.prunes = 0
    s.emit("crash", c)
    return CrashDecision(True)


def prune_on_move(s: SystemState, c: AxialCoord) -> None:
    """A particle about to move flags its children; a non-root mover also goes idle."""
    _flag_children(s, c)
    p = s.occupancy[c]
    if p.role is not Role.ROOT:
        p.role = Role.IDLE
        p.parent = None
        p.prune = False
        p.stress = False
        p.inhibit = False
    s.emit("move_prune", c)


def prune_count(s: SystemState, c: tuple[int, int]) -> int:
    return s.occupancy[AxialCoord(*c)].prunes
