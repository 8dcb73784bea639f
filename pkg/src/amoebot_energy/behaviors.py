"""Action suppliers for the usage phase.

A behavior tells the engine which action (if any) a particle has enabled,
what it costs, and how to carry it out once the energy has been debited.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .energy import ActionAborted
from .lattice import AxialCoord, Direction, direction_to, is_connected, neighbor, opposite, spiral
from .repair import prune_on_move
from .system import ParameterError, Role, SystemState


class ActionKind(enum.Enum):
    NOOP_SPEND = "noop"
    MOVE = "move"
    REPRODUCE = "reproduce"


@dataclass(frozen=True)
class ActionDescriptor:
    kind: ActionKind
    direction: Direction | None = None


NOOP = ActionDescriptor(ActionKind.NOOP_SPEND)


class BehaviorHook:
    """Base hook: no particle ever has an enabled action."""

    name = "none"

    def bind(self, s: SystemState) -> None:
        pass

    def pre_activation(self, s: SystemState, c: AxialCoord) -> None:
        pass

    def enabled_action(self, s: SystemState, c: AxialCoord) -> ActionDescriptor | None:
        return None

    def perform(self, s: SystemState, c: AxialCoord, desc: ActionDescriptor) -> None:
        pass

    def demand_override(self, s: SystemState, c: AxialCoord) -> float | None:
        return None

    def complete(self, s: SystemState) -> bool:
        return False

    def max_cost(self) -> float:
        return 0.0


class DemandOnly(BehaviorHook):
    """Every particle always wants to spend; nothing else happens."""

    name = "demand_only"

    def __init__(self, delta: float | None = None):
        if delta is not None and not delta > 0:
            raise ParameterError(f"demand must be positive, got {delta}")
        self.delta = delta

    def enabled_action(self, s, c):
        return NOOP

    def demand_override(self, s, c):
        return self.delta

    def max_cost(self):
        return self.delta or 0.0


def demand_only_behavior(delta: float | None = None) -> DemandOnly:
    return DemandOnly(delta)


class Reproduction(BehaviorHook):
    """Split into an empty neighbouring node; the newborn joins the reproducer's tree."""

    name = "growth"

    def __init__(self, repro_cost: float, max_size: int, random_orientation: bool = False):
        if not repro_cost > 0:
            raise ParameterError("reproduction cost must be positive")
        if max_size < 1:
            raise ParameterError("max_size must be positive")
        self.repro_cost = repro_cost
        self.max_size = max_size
        self.random_orientation = random_orientation

    def _population(self, s: SystemState) -> int:
        return len(s.occupancy)

    def _empty_dirs(self, s: SystemState, c: AxialCoord) -> list[Direction]:
        occ = s.occupancy
        return [d for d in range(6) if neighbor(c, d) not in occ]

    def demand_override(self, s, c):
        if self._population(s) >= self.max_size or not self._empty_dirs(s, c):
            return 0.0
        return self.repro_cost

    def enabled_action(self, s, c):
        if self._population(s) >= self.max_size:
            return None
        empty = self._empty_dirs(s, c)
        if not empty:
            return None
        return ActionDescriptor(ActionKind.REPRODUCE, empty[int(s.rng.integers(len(empty)))])

    def perform(self, s, c, desc):
        u = neighbor(c, desc.direction)
        if u in s.occupancy:
            raise ActionAborted(f"reproduction target {u} occupied")
        orient = int(s.rng.integers(6)) if self.random_orientation else 0
        s.new_particle(u, role=Role.ACTIVE, parent=opposite(desc.direction), orientation=orient)
        s.reproductions_total += 1

    def complete(self, s):
        return self._population(s) >= self.max_size

    def max_cost(self):
        return self.repro_cost


def reproduction_behavior(repro_cost: float, max_size: int, random_orientation: bool = False) -> Reproduction:
    return Reproduction(repro_cost, max_size, random_orientation)


@dataclass
class HexagonFormation(BehaviorHook):
    """Simplified hexagon formation around a fixed seed node.

    Target slots are the first ``n`` nodes of a spiral around ``seed``. The
    lowest unfilled slot is the only one that can be filled. An unsettled
    particle that is not a cut vertex either steps into that slot (when
    adjacent and empty) or walks one node along the system boundary,
    rotating counter-clockwise around an occupied neighbour. A particle
    settles for good when it stands on the lowest unfilled slot.
    """

    seed_coord: AxialCoord
    move_cost: float
    name: str = "hexagon"
    slots: list[AxialCoord] = field(default_factory=list)
    settled: set[int] = field(default_factory=set)
    next_slot: int = 0
    moves: int = 0

    def __post_init__(self):
        self.seed_coord = AxialCoord(*self.seed_coord)
        if not self.move_cost > 0:
            raise ParameterError("move cost must be positive")

    def bind(self, s: SystemState) -> None:
        if self.seed_coord not in s.occupancy:
            raise ParameterError(f"hexagon seed {self.seed_coord} is not occupied")
        self.slots = spiral(self.seed_coord, len(s.occupancy))
        self.settled = set()
        self.next_slot = 0
        self.moves = 0
        self._try_settle(s, self.seed_coord)

    def target_nodes(self) -> set[AxialCoord]:
        return set(self.slots)

    def _try_settle(self, s: SystemState, c: AxialCoord) -> None:
        p = s.occupancy[c]
        if p.uid in self.settled or self.next_slot >= len(self.slots):
            return
        if c == self.slots[self.next_slot]:
            self.settled.add(p.uid)
            self.next_slot += 1

    def pre_activation(self, s, c):
        self._try_settle(s, c)

    def is_settled(self, s: SystemState, c: AxialCoord) -> bool:
        return s.occupancy[c].uid in self.settled

    def demand_override(self, s, c):
        if self.complete(s) or s.occupancy[c].uid in self.settled:
            return 0.0
        return self.move_cost

    def _is_cut_vertex(self, s: SystemState, c: AxialCoord) -> bool:
        occ = s.occupancy
        ring = [neighbor(c, d) in occ for d in range(6)]
        arcs = sum(1 for d in range(6) if ring[d] and not ring[d - 1])
        if arcs <= 1:
            # one contiguous arc of neighbours stays connected without c
            return False
        return not is_connected([x for x in occ if x != c])

    def enabled_action(self, s, c):
        if self.complete(s) or s.occupancy[c].uid in self.settled:
            return None
        occ = s.occupancy
        target = self.slots[self.next_slot]
        d = direction_to(c, target)
        if d is not None and target not in occ:
            return None if self._is_cut_vertex(s, c) else ActionDescriptor(ActionKind.MOVE, d)
        # boundary walk: rotate around the last occupied neighbour of an arc
        for d in range(6):
            nxt = (d + 1) % 6
            if neighbor(c, d) in occ and neighbor(c, nxt) not in occ:
                if self._is_cut_vertex(s, c):
                    return None
                return ActionDescriptor(ActionKind.MOVE, nxt)
        return None

    def perform(self, s, c, desc):
        u = neighbor(c, desc.direction)
        if u in s.occupancy:
            raise ActionAborted(f"move target {u} occupied")
        prune_on_move(s, c)
        s.move_particle(c, u)
        self.moves += 1
        self._try_settle(s, u)

    def complete(self, s):
        return bool(self.slots) and self.next_slot >= len(self.slots)

    def max_cost(self):
        return self.move_cost


def hexagon_formation_behavior(seed_coord: tuple[int, int], move_cost: float) -> HexagonFormation:
    return HexagonFormation(AxialCoord(*seed_coord), move_cost)
