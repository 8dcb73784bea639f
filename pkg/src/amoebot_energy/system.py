"""Particle records, occupancy and the global parameters of one particle system."""

from __future__ import annotations

import enum
import hashlib
import math
import struct
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from .lattice import AxialCoord, Direction, is_connected, neighbor, opposite

# Energy comparisons: ``b - a < EPS`` counts as ``a >= b``.
EPS = 1e-9


def at_least(a: float, b: float) -> bool:
    return b - a < EPS


def less(a: float, b: float) -> bool:
    return b - a >= EPS


class ValidationError(ValueError):
    """An invalid problem instance or configuration."""


class DisconnectedShapeError(ValidationError):
    pass


class EmptyRootsError(ValidationError):
    pass


class RootsOutsideShapeError(ValidationError):
    pass


class DemandExceedsCapacityError(ValidationError):
    pass


class ParameterError(ValidationError):
    pass


class EngineFault(RuntimeError):
    """An invariant was violated while the engine was running."""

    def __init__(self, message: str, snapshot: dict | None = None):
        super().__init__(message)
        self.snapshot = snapshot


class Role(enum.Enum):
    IDLE = "idle"
    ACTIVE = "active"
    ROOT = "root"


@dataclass(eq=False, slots=True)
class Particle:
    """Local memory of one particle plus harness bookkeeping.

    ``parent`` is a global direction label. ``rr_cursor`` and
    ``share_cursor`` are *local* labels; ``orientation`` maps a local label
    ``l`` to the global label ``(l + orientation) % 6``.
    """

    uid: int
    role: Role = Role.IDLE
    e_bat: float = 0.0
    parent: Direction | None = None
    stress: bool = False
    inhibit: bool = False
    prune: bool = False
    rr_cursor: int = 0
    share_cursor: int = 0
    demand_index: int = 0
    crashed: bool = False
    orientation: int = 0
    # harness-only counters, never read by the algorithms
    actions: int = 0
    prunes: int = 0

    def copy(self) -> "Particle":
        return Particle(
            self.uid, self.role, self.e_bat, self.parent, self.stress, self.inhibit,
            self.prune, self.rr_cursor, self.share_cursor, self.demand_index,
            self.crashed, self.orientation, self.actions, self.prunes,
        )

    def restore(self, other: "Particle") -> None:
        for name in Particle.__slots__:
            setattr(self, name, getattr(other, name))

    def global_dir(self, local: int) -> Direction:
        return (local + self.orientation) % 6

    def local_dir(self, global_d: Direction) -> int:
        return (global_d - self.orientation) % 6


def _unit_hash(seed: int, uid: int, index: int) -> float:
    digest = hashlib.blake2b(struct.pack("<qqq", seed, uid, index), digest_size=8).digest()
    return int.from_bytes(digest, "little") / 2.0**64


@dataclass
class DemandSpec:
    """Energy demand ``delta(P, i)`` of a particle's ``i``-th action.

    ``kind`` is ``"uniform"`` (constant ``value``), ``"sequence"``
    (per-particle cyclic ``sequences`` keyed by initial coordinate, falling
    back to ``value``) or ``"random"`` (``lo + (hi - lo) * u`` with ``u`` a
    hash of ``(seed, uid, i)``).
    """

    kind: str = "uniform"
    value: float = 5.0
    sequences: Mapping[AxialCoord, Sequence[float]] | None = None
    lo: float = 0.0
    hi: float = 0.0
    seed: int = 0
    _by_uid: dict[int, tuple[float, ...]] = field(default_factory=dict, repr=False)

    @classmethod
    def uniform(cls, value: float) -> "DemandSpec":
        return cls("uniform", value=value)

    @classmethod
    def per_particle(cls, sequences: Mapping[tuple[int, int], Sequence[float]], default: float) -> "DemandSpec":
        seqs = {AxialCoord(*c): tuple(v) for c, v in sequences.items()}
        return cls("sequence", value=default, sequences=seqs)

    @classmethod
    def seeded_range(cls, lo: float, hi: float, seed: int = 0) -> "DemandSpec":
        return cls("random", lo=lo, hi=hi, seed=seed)

    def bind(self, coord_to_uid: Mapping[AxialCoord, int]) -> None:
        if self.kind == "sequence" and self.sequences:
            self._by_uid = {coord_to_uid[c]: tuple(v) for c, v in self.sequences.items() if c in coord_to_uid}

    def evaluate(self, uid: int, index: int) -> float:
        if self.kind == "uniform":
            return self.value
        if self.kind == "sequence":
            seq = self._by_uid.get(uid)
            if not seq:
                return self.value
            return seq[index % len(seq)]
        if self.kind == "random":
            return self.lo + (self.hi - self.lo) * _unit_hash(self.seed, uid, index)
        raise ParameterError(f"unknown demand kind {self.kind!r}")

    def bounds(self) -> tuple[float, float]:
        if self.kind == "uniform":
            return self.value, self.value
        if self.kind == "sequence":
            vals = [self.value] + [v for seq in (self.sequences or {}).values() for v in seq]
            return min(vals), max(vals)
        return self.lo, self.hi

    def to_dict(self) -> dict:
        if self.kind == "uniform":
            return {"kind": "uniform", "value": self.value}
        if self.kind == "sequence":
            return {
                "kind": "sequence",
                "default": self.value,
                "sequences": {str(c): list(v) for c, v in sorted((self.sequences or {}).items())},
            }
        return {"kind": "random", "lo": self.lo, "hi": self.hi, "seed": self.seed}


Hook = Callable[[str, "SystemState", AxialCoord], None]


@dataclass
class SystemState:
    occupancy: dict[AxialCoord, Particle]
    kappa: float
    alpha: float
    demand: DemandSpec
    round_counter: int = 0
    communication: bool = True
    repair: bool = True
    child_selection: str = "round-robin"
    positions: dict[int, AxialCoord] = field(default_factory=dict)
    harvested_total: float = 0.0
    spent_total: float = 0.0
    transferred_total: float = 0.0
    crashed_energy: float = 0.0
    transfers_total: int = 0
    actions_total: int = 0
    reproductions_total: int = 0
    behavior: Any = None
    hooks: list[Hook] = field(default_factory=list)
    rng: np.random.Generator = field(default_factory=lambda: np.random.Generator(np.random.Philox(0)))
    next_uid: int = 0
    # uids that have held enough energy for their next action at some round boundary
    met_uids: set[int] = field(default_factory=set)
    crash_epoch: int = 0
    _delta_cache: dict[tuple[int, int], float] = field(default_factory=dict, repr=False)

    def __getitem__(self, c: tuple[int, int]) -> Particle:
        return self.occupancy[c]

    def __contains__(self, c: object) -> bool:
        return c in self.occupancy

    def __len__(self) -> int:
        return len(self.occupancy)

    def live_coords(self) -> list[AxialCoord]:
        return [c for c, p in self.occupancy.items() if not p.crashed]

    def live_uids(self) -> list[int]:
        return sorted(p.uid for p in self.occupancy.values() if not p.crashed)

    def particle_by_uid(self, uid: int) -> Particle:
        return self.occupancy[self.positions[uid]]

    def is_live(self, c: tuple[int, int]) -> bool:
        p = self.occupancy.get(c)
        return p is not None and not p.crashed

    def emit(self, event: str, c: AxialCoord) -> None:
        for hook in self.hooks:
            hook(event, self, c)

    def add_particle(self, c: AxialCoord, particle: Particle) -> None:
        if c in self.occupancy:
            raise EngineFault(f"node {c} already occupied")
        self.occupancy[c] = particle
        self.positions[particle.uid] = c

    def new_particle(self, c: AxialCoord, **fields: Any) -> Particle:
        uid = self.next_uid
        self.next_uid += 1
        p = Particle(uid, **fields)
        self.add_particle(c, p)
        return p

    def move_particle(self, src: AxialCoord, dst: AxialCoord) -> None:
        if dst in self.occupancy:
            raise EngineFault(f"move target {dst} occupied")
        p = self.occupancy.pop(src)
        self.occupancy[dst] = p
        self.positions[p.uid] = dst

    def delta(self, c: tuple[int, int]) -> float:
        """Cost of the next action of the particle at ``c``."""
        p = self.occupancy[c]
        if self.behavior is not None:
            override = self.behavior.demand_override(self, c)
            if override is not None:
                return override
        key = (p.uid, p.demand_index)
        val = self._delta_cache.get(key)
        if val is None:
            val = self.demand.evaluate(p.uid, p.demand_index)
            self._delta_cache[key] = val
        return val

    def parent_coord(self, c: tuple[int, int]) -> AxialCoord | None:
        p = self.occupancy[c]
        if p.parent is None:
            return None
        return neighbor(c, p.parent)

    def ledger_error(self) -> float:
        """|total_energy - (harvested - spent - lost to crashes)|."""
        return abs(total_energy(self) - (self.harvested_total - self.spent_total - self.crashed_energy))

    def snapshot(self) -> dict:
        particles = {}
        for c in sorted(self.occupancy):
            p = self.occupancy[c]
            particles[str(c)] = {
                "uid": p.uid,
                "role": p.role.value,
                "e_bat": p.e_bat,
                "parent": p.parent,
                "stress": p.stress,
                "inhibit": p.inhibit,
                "prune": p.prune,
                "rr_cursor": p.rr_cursor,
                "share_cursor": p.share_cursor,
                "orientation": p.orientation,
                "demand_index": p.demand_index,
                "crashed": p.crashed,
                "actions": p.actions,
                "prunes": p.prunes,
            }
        return {
            "parameters": {
                "kappa": self.kappa,
                "alpha": self.alpha,
                "demand": self.demand.to_dict(),
                "communication": self.communication,
                "repair": self.repair,
                "child_selection": self.child_selection,
            },
            "round": self.round_counter,
            "ledger": {
                "harvested": self.harvested_total,
                "spent": self.spent_total,
                "crashed_energy": self.crashed_energy,
                "transferred": self.transferred_total,
                "transfers": self.transfers_total,
                "actions": self.actions_total,
                "reproductions": self.reproductions_total,
            },
            "particles": particles,
        }


def build_system(
    shape: Iterable[tuple[int, int]],
    roots: Iterable[tuple[int, int]],
    kappa: float,
    alpha: float,
    demand: DemandSpec | float,
    *,
    communication: bool = True,
    repair: bool = True,
    child_selection: str = "round-robin",
    seed: int = 0,
    random_orientation: bool = False,
) -> SystemState:
    """Validate a problem instance and initialise every particle to its defaults."""
    nodes = [AxialCoord(*c) for c in shape]
    node_set = set(nodes)
    root_set = {AxialCoord(*c) for c in roots}
    if not (kappa > 0):
        raise ParameterError(f"kappa must be positive, got {kappa}")
    if not (alpha > 0):
        raise ParameterError(f"alpha must be positive, got {alpha}")
    if not node_set:
        raise DisconnectedShapeError("shape is empty")
    if not is_connected(node_set):
        raise DisconnectedShapeError("shape is not connected")
    if not root_set:
        raise EmptyRootsError("at least one root is required")
    if not root_set <= node_set:
        raise RootsOutsideShapeError(f"roots outside shape: {sorted(root_set - node_set)}")
    if not isinstance(demand, DemandSpec):
        demand = DemandSpec.uniform(float(demand))
    lo, hi = demand.bounds()
    if hi > kappa:
        raise DemandExceedsCapacityError(f"demand {hi} exceeds capacity {kappa}")
    if lo <= 0:
        raise ParameterError(f"demand values must be positive, got {lo}")
    if child_selection not in ("round-robin", "lowest-battery-first", "seeded-random"):
        raise ParameterError(f"unknown child selection {child_selection!r}")

    rng = np.random.Generator(np.random.Philox(seed))
    s = SystemState({}, float(kappa), float(alpha), demand, communication=communication,
                    repair=repair, child_selection=child_selection, rng=rng)
    seen: set[AxialCoord] = set()
    for c in sorted(node_set):
        if c in seen:
            continue
        seen.add(c)
        orient = int(rng.integers(6)) if random_orientation else 0
        s.new_particle(c, role=Role.ROOT if c in root_set else Role.IDLE, orientation=orient)
    demand.bind({c: p.uid for c, p in s.occupancy.items()})
    return s


def set_parents(s: SystemState, parents: Mapping[tuple[int, int], tuple[int, int]]) -> None:
    """Install a forest directly: each key becomes Active with the given parent.

    Used by experiments that start from an already-built spanning forest.
    """
    from .lattice import direction_to

    for child, par in parents.items():
        child = AxialCoord(*child)
        d = direction_to(child, par)
        if d is None:
            raise ParameterError(f"{child} and {par} are not adjacent")
        p = s.occupancy[child]
        if p.role is Role.ROOT:
            raise ParameterError(f"root {child} cannot have a parent")
        p.role = Role.ACTIVE
        p.parent = d


def children_of(s: SystemState, c: tuple[int, int]) -> list[Direction]:
    """Directions of live neighbours whose parent pointer points back at ``c``."""
    out = []
    occ = s.occupancy
    for d in range(6):
        q = occ.get(neighbor(c, d))
        if q is not None and not q.crashed and q.parent == opposite(d):
            out.append(d)
    return out


def is_stressed(s: SystemState, c: tuple[int, int]) -> bool:
    return less(s.occupancy[c].e_bat, s.delta(c))


def total_energy(s: SystemState) -> float:
    return math.fsum(p.e_bat for p in s.occupancy.values() if not p.crashed)
