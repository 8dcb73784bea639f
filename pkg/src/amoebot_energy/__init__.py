"""Energy distribution in amoebot particle systems: simulator and verification harness."""

from .behaviors import (
    ActionDescriptor,
    ActionKind,
    BehaviorHook,
    DemandOnly,
    HexagonFormation,
    Reproduction,
    demand_only_behavior,
    hexagon_formation_behavior,
    reproduction_behavior,
)
from .energy import activate_energy, communicate, share_energy, use_energy
from .lattice import AxialCoord, hexagon, is_connected, lattice_distance, neighbor, opposite, spiral
from .metrics import RoundStats, classify_forest, max_starvation
from .repair import activate_repair, inject_crash, prune_count, prune_on_move
from .scheduler import RunReport, Schedule, StopCondition, run, step
from .system import (
    DemandSpec,
    EngineFault,
    Particle,
    Role,
    SystemState,
    ValidationError,
    build_system,
    children_of,
    is_stressed,
    total_energy,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
