import pytest

from amoebot_energy.behaviors import DemandOnly, HexagonFormation, Reproduction
from amoebot_energy.energy import activate_energy
from amoebot_energy.lattice import is_connected, neighbors, spiral
from amoebot_energy.metrics import classify_forest
from amoebot_energy.scheduler import Schedule, StopCondition, run
from amoebot_energy.system import ParameterError, Role, build_system, set_parents


def active_pair(delta):
    s = build_system([(0, 0), (1, 0)], [(0, 0)], 10, 1, delta)
    set_parents(s, {(1, 0): (0, 0)})
    s.behavior = DemandOnly()
    return s


def test_demand_only_spends_delta_per_activation():
    s = active_pair(5)
    p = s.occupancy[(1, 0)]
    p.e_bat = 10.0
    activate_energy(s, (1, 0), s.behavior)
    assert p.e_bat == 5.0 and p.actions == 1
    activate_energy(s, (1, 0), s.behavior)
    assert p.e_bat == 0.0 and p.actions == 2


def test_inhibited_never_acts():
    s = active_pair(5)
    s.occupancy[(0, 0)].inhibit = True
    p = s.occupancy[(1, 0)]
    p.e_bat = 10.0
    for _ in range(3):
        activate_energy(s, (1, 0), s.behavior)
    assert p.actions == 0


def test_full_demand_needs_full_battery():
    s = active_pair(10)
    p = s.occupancy[(1, 0)]
    p.e_bat = 9.5
    activate_energy(s, (1, 0), s.behavior)
    assert p.actions == 0
    p.e_bat = 10.0
    activate_energy(s, (1, 0), s.behavior)
    assert p.actions == 1


def test_hexagon_of_seven_forms_and_stays_connected():
    shape = [(0, 0), (1, 0), (2, 0), (3, 0), (4, 0), (5, 0), (6, 0)]
    s = build_system(shape, [(0, 0)], 10, 1, 5, seed=1)
    beh = HexagonFormation((0, 0), 5.0)

    def connected(s, row):
        assert is_connected(s.live_coords())

    r = run(s, Schedule.permutation(1), beh, StopCondition("shape_complete", 5000), on_round=connected)
    assert r.summary["stop_reason"] == "shape_complete"
    assert set(s.occupancy) == {(0, 0), *neighbors((0, 0))}
    assert all(beh.enabled_action(s, c) is None for c in s.occupancy)


def test_settled_particle_has_no_action():
    s = build_system([(0, 0), (1, 0)], [(0, 0)], 10, 1, 5)
    beh = HexagonFormation((0, 0), 5.0)
    beh.bind(s)
    assert beh.is_settled(s, (0, 0)) and beh.enabled_action(s, (0, 0)) is None


def test_hexagon_rejects_bad_parameters():
    with pytest.raises(ParameterError):
        HexagonFormation((0, 0), 0.0)
    s = build_system([(0, 0)], [(0, 0)], 10, 1, 5)
    with pytest.raises(ParameterError):
        HexagonFormation((3, 3), 1.0).bind(s)


def test_interior_particle_cannot_reproduce():
    s = build_system(spiral((0, 0), 7), [(0, 0)], 10, 1, 5)
    beh = Reproduction(5.0, 100)
    assert beh.enabled_action(s, (0, 0)) is None
    assert beh.demand_override(s, (0, 0)) == 0.0
    assert beh.enabled_action(s, (1, 0)) is not None


def test_newborn_is_empty_child_of_reproducer():
    s = build_system([(0, 0)], [(0, 0)], 10, 1, 5)
    beh = Reproduction(5.0, 100)
    s.behavior = beh
    s.occupancy[(0, 0)].e_bat = 5.0
    activate_energy(s, (0, 0), beh)
    (c, p), = [(c, p) for c, p in s.occupancy.items() if c != (0, 0)]
    assert p.e_bat == 0.0 and p.role is Role.ACTIVE
    from amoebot_energy.lattice import neighbor

    assert neighbor(c, p.parent) == (0, 0)
    assert s.reproductions_total == 1


def test_growth_keeps_a_forest():
    s = build_system([(0, 0)], [(0, 0)], 10, 1, 5, seed=3)

    def check(s, row):
        part = classify_forest(s)  # raises on a pointer cycle
        assert not part.f_prime and not part.idle

    r = run(s, Schedule.permutation(3), Reproduction(5.0, 1000), StopCondition("max_rounds", 200), on_round=check)
    assert r.summary["population"] > 1
    assert r.summary["reproductions"] == r.summary["population"] - 1


def test_growth_respects_max_size():
    s = build_system([(0, 0)], [(0, 0)], 10, 1, 5, seed=3)
    r = run(s, Schedule.permutation(3), Reproduction(5.0, 6), StopCondition("max_rounds", 400))
    assert r.summary["population"] == 6
