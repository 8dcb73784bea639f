"""Energy-Sharing: setup join plus the Communicate / ShareEnergy / UseEnergy phases."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from .lattice import AxialCoord, Direction, neighbor
from .system import EngineFault, Role, SystemState, at_least, children_of, less

if TYPE_CHECKING:
    from .behaviors import BehaviorHook


class ActionAborted(Exception):
    """Raised by a behavior's ``perform`` when its action conflicts with the current state."""


@dataclass(frozen=True)
class ActionOutcome:
    performed: bool
    energy_spent: float = 0.0
    action_tag: str | None = None


NOT_PERFORMED = ActionOutcome(False)
ABORTED = ActionOutcome(False, 0.0, "aborted")


def join_forest(s: SystemState, c: AxialCoord, *, respect_prune: bool) -> Direction | None:
    """Adopt the first Root/Active neighbour on the round-robin walk as parent.

    The walk starts at ``rr_cursor`` (a local label); afterwards the cursor
    points just past the chosen label.
    """
    p = s.occupancy[c]
    occ = s.occupancy
    for step in range(6):
        local = (p.rr_cursor + step) % 6
        d = (local + p.orientation) % 6
        q = occ.get(neighbor(c, d))
        if q is None or q.crashed or q.role is Role.IDLE:
            continue
        if respect_prune and q.prune:
            continue
        p.parent = d
        p.role = Role.ACTIVE
        p.rr_cursor = (local + 1) % 6
        return d
    return None


def _has_stressed_child(s: SystemState, c: AxialCoord) -> bool:
    occ = s.occupancy
    return any(occ[neighbor(c, d)].stress for d in children_of(s, c))


def communicate(s: SystemState, c: AxialCoord) -> None:
    if not s.communication:
        return
    p = s.occupancy[c]
    if p.role is Role.ACTIVE:
        p.stress = less(p.e_bat, s.delta(c)) or _has_stressed_child(s, c)
        par = s.occupancy.get(neighbor(c, p.parent))
        if par is None or par.crashed:
            raise EngineFault(f"particle at {c} read inhibit of a missing or crashed parent")
        p.inhibit = par.inhibit
    elif p.role is Role.ROOT:
        p.inhibit = less(p.e_bat, s.delta(c)) or _has_stressed_child(s, c)
    else:
        raise EngineFault(f"communicate called on idle particle at {c}")


def _choose_child(s: SystemState, c: AxialCoord, needy: list[Direction]) -> Direction:
    p = s.occupancy[c]
    if s.child_selection == "round-robin":
        for step in range(6):
            local = (p.share_cursor + step) % 6
            d = (local + p.orientation) % 6
            if d in needy:
                p.share_cursor = (local + 1) % 6
                return d
    if s.child_selection == "lowest-battery-first":
        return min(needy, key=lambda d: (s.occupancy[neighbor(c, d)].e_bat, p.local_dir(d)))
    if s.child_selection == "seeded-random":
        return needy[int(s.rng.integers(len(needy)))]
    raise EngineFault(f"no child chosen at {c}")


def share_energy(s: SystemState, c: AxialCoord) -> float:
    """Harvest (roots only), then pass up to ``alpha`` to one child below capacity.

    Returns the amount transferred to the child.
    """
    return _share(s, c)[0]


def _share(s: SystemState, c: AxialCoord) -> tuple[float, AxialCoord | None, float]:
    p = s.occupancy[c]
    kappa, alpha = s.kappa, s.alpha
    if p.role is Role.ROOT:
        new = min(p.e_bat + alpha, kappa)
        s.harvested_total += new - p.e_bat
        p.e_bat = new
    if not at_least(p.e_bat, alpha):
        return 0.0, None, 0.0
    occ = s.occupancy
    needy = [d for d in children_of(s, c) if less(occ[neighbor(c, d)].e_bat, kappa)]
    if not needy:
        return 0.0, None, 0.0
    qc = neighbor(c, _choose_child(s, c, needy))
    q = occ[qc]
    q_before = q.e_bat
    amount = min(alpha, kappa - q.e_bat)
    p.e_bat = max(0.0, p.e_bat - amount)
    q.e_bat = min(q.e_bat + alpha, kappa)
    s.transferred_total += amount
    s.transfers_total += 1
    return amount, qc, q_before


def use_energy(s: SystemState, c: AxialCoord, behavior: "BehaviorHook | None") -> ActionOutcome:
    """Spend ``delta(P)`` on the behavior's enabled action unless inhibited or short."""
    if behavior is None:
        return NOT_PERFORMED
    p = s.occupancy[c]
    cost = s.delta(c)
    if p.inhibit or less(p.e_bat, cost):
        return NOT_PERFORMED
    desc = behavior.enabled_action(s, c)
    if desc is None:
        return NOT_PERFORMED
    before = p.e_bat
    p.e_bat = max(0.0, before - cost)
    p.demand_index += 1
    try:
        behavior.perform(s, c, desc)
    except ActionAborted:
        p.e_bat = before
        p.demand_index -= 1
        return ABORTED
    s.spent_total += before - p.e_bat
    p.actions += 1
    s.actions_total += 1
    return ActionOutcome(True, cost, desc.kind.value)


def run_phases(s: SystemState, c: AxialCoord, behavior: "BehaviorHook | None") -> ActionOutcome:
    """Communicate, share and use in order; an aborted action undoes all three."""
    p = s.occupancy[c]
    saved = p.copy()
    ledger = (s.harvested_total, s.transferred_total, s.transfers_total)
    communicate(s, c)
    _, qc, child_before = _share(s, c)
    outcome = use_energy(s, c, behavior)
    if outcome is ABORTED:
        p.restore(saved)
        if qc is not None:
            s.occupancy[qc].e_bat = child_before
        s.harvested_total, s.transferred_total, s.transfers_total = ledger
    return outcome


def activate_energy(
    s: SystemState, c: AxialCoord, behavior: "BehaviorHook | None" = None, *, respect_prune: bool = False
) -> ActionOutcome:
    """One activation of plain Energy-Sharing (no repair integration)."""
    p = s.occupancy[c]
    if p.crashed:
        raise EngineFault(f"activated crashed particle at {c}")
    if p.role is Role.IDLE:
        join_forest(s, c, respect_prune=respect_prune)
        return NOT_PERFORMED
    return run_phases(s, c, behavior)
