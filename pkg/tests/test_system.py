import math

import pytest

from amoebot_energy.lattice import spiral
from amoebot_energy.system import (
    DemandExceedsCapacityError,
    DemandSpec,
    DisconnectedShapeError,
    EmptyRootsError,
    ParameterError,
    Role,
    RootsOutsideShapeError,
    build_system,
    children_of,
    is_stressed,
    set_parents,
    total_energy,
)
from amoebot_energy.energy import share_energy


def test_demand_instance_builds():
    s = build_system(spiral((0, 0), 91), [(0, 0)], 10, 1, 5)
    assert len(s.occupancy) == 91
    assert s.occupancy[(0, 0)].role is Role.ROOT
    assert sum(p.role is Role.IDLE for p in s.occupancy.values()) == 90
    assert all(p.e_bat == 0.0 and not (p.stress or p.inhibit or p.prune) for p in s.occupancy.values())


@pytest.mark.parametrize(
    "shape,roots,kappa,alpha,delta,err",
    [
        ([(0, 0), (2, 0)], [(0, 0)], 10, 1, 5, DisconnectedShapeError),
        ([(0, 0), (1, 0)], [(0, 0)], 10, 1, 11, DemandExceedsCapacityError),
        ([(0, 0), (1, 0)], [], 10, 1, 5, EmptyRootsError),
        ([(0, 0), (1, 0)], [(5, 5)], 10, 1, 5, RootsOutsideShapeError),
        ([(0, 0)], [(0, 0)], 0, 1, 5, ParameterError),
        ([(0, 0)], [(0, 0)], 10, -1, 5, ParameterError),
        ([(0, 0)], [(0, 0)], 10, 1, 0, ParameterError),
    ],
)
def test_validation_errors(shape, roots, kappa, alpha, delta, err):
    with pytest.raises(err):
        build_system(shape, roots, kappa, alpha, delta)


def test_children_of():
    s = build_system([(0, 0), (1, 0), (2, 0)], [(0, 0)], 10, 1, 5)
    set_parents(s, {(1, 0): (0, 0), (2, 0): (1, 0)})
    assert children_of(s, (2, 0)) == []
    assert children_of(s, (1, 0)) == [0]
    star = build_system([(0, 0), (1, 0), (0, 1), (-1, 0)], [(0, 0)], 10, 1, 5)
    set_parents(star, {(1, 0): (0, 0), (0, 1): (0, 0), (-1, 0): (0, 0)})
    assert sorted(children_of(star, (0, 0))) == [0, 3, 5]


@pytest.mark.parametrize("e,delta,expected", [(3, 5, True), (5, 5, False), (0, 10, True)])
def test_is_stressed(e, delta, expected):
    s = build_system([(0, 0)], [(0, 0)], 10, 1, delta)
    s.occupancy[(0, 0)].e_bat = e
    assert is_stressed(s, (0, 0)) is expected


def test_total_energy_examples():
    s = build_system([(0, 0), (1, 0)], [(0, 0)], 10, 1, 5)
    assert total_energy(s) == 0
    set_parents(s, {(1, 0): (0, 0)})
    share_energy(s, (0, 0))  # harvest 1 then pass it on
    assert total_energy(s) == 1
    s.occupancy[(0, 0)].e_bat = 3.0
    s.harvested_total = 4.0
    before = total_energy(s)
    s.occupancy[(0, 0)].role = Role.ACTIVE  # transfer only, no harvest
    share_energy(s, (0, 0))
    assert math.isclose(total_energy(s), before)


def test_demand_spec_kinds():
    d = DemandSpec.per_particle({(1, 0): [2.0, 3.0]}, 5.0)
    s = build_system([(0, 0), (1, 0)], [(0, 0)], 10, 1, d)
    p = s.occupancy[(1, 0)]
    assert s.delta((1, 0)) == 2.0
    p.demand_index = 1
    assert s.delta((1, 0)) == 3.0
    assert s.delta((0, 0)) == 5.0
    r = DemandSpec.seeded_range(1.0, 4.0, seed=7)
    assert r.evaluate(3, 2) == r.evaluate(3, 2)
    assert 1.0 <= r.evaluate(3, 2) <= 4.0


def test_snapshot_is_plain_data():
    import json

    s = build_system(spiral((0, 0), 7), [(0, 0)], 10, 1, 5, seed=2, random_orientation=True)
    snap = s.snapshot()
    assert len(snap["particles"]) == 7
    json.dumps(snap)
