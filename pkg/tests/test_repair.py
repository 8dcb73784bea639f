from amoebot_energy.lattice import neighbor
from amoebot_energy.repair import activate_repair, inject_crash, prune_count, prune_on_move
from amoebot_energy.system import Role, build_system, set_parents


def test_crashed_parent_prunes_and_flags_children():
    nodes = [(0, 0), (1, 0), (2, 0), (2, -1), (3, -1)]
    s = build_system(nodes, [(0, 0)], 10, 1, 5)
    set_parents(s, {(1, 0): (0, 0), (2, 0): (1, 0), (2, -1): (2, 0), (3, -1): (2, 0)})
    s.occupancy[(1, 0)].crashed = True
    p = s.occupancy[(2, 0)]
    p.stress = p.inhibit = True
    out = activate_repair(s, (2, 0))
    assert out.kind == "pruned"
    assert p.role is Role.IDLE and p.parent is None and not (p.stress or p.inhibit or p.prune)
    assert s.occupancy[(2, -1)].prune and s.occupancy[(3, -1)].prune
    assert prune_count(s, (2, 0)) == 1


def test_idle_ignores_pruning_neighbors():
    s = build_system([(0, 0), (1, 0), (2, 0)], [(0, 0)], 10, 1, 5)
    set_parents(s, {(1, 0): (0, 0)})
    s.occupancy[(1, 0)].prune = True
    assert activate_repair(s, (2, 0)).kind == "nochange"
    assert s.occupancy[(2, 0)].role is Role.IDLE


def test_rejoin_cursor_walk():
    # eligible neighbours of (0,0) at directions 1 and 4
    c = (0, 0)
    nodes = [c, neighbor(c, 1), neighbor(c, 4)]
    s = build_system(nodes, [neighbor(c, 1), neighbor(c, 4)], 10, 1, 5)
    p = s.occupancy[c]
    p.rr_cursor = 2
    out = activate_repair(s, c)
    assert out.kind == "rejoined" and out.direction == 4
    assert p.rr_cursor == 5


def test_crash_decisions():
    s = build_system([(0, 0), (1, 0), (2, 0)], [(0, 0)], 10, 1, 5)
    assert not inject_crash(s, (1, 0))
    assert inject_crash(s, (1, 0)).reason == "connectivity"
    assert inject_crash(s, (0, 0)).reason == "root-reliability"
    assert inject_crash(s, (2, 0))
    t = build_system([(0, 0), (1, 0)], [(0, 0)], 10, 1, 5)
    assert inject_crash(t, (0, 0)).reason == "root-reliability"


def test_crash_records_stored_energy():
    s = build_system([(0, 0), (1, 0)], [(0, 0)], 10, 1, 5)
    s.occupancy[(1, 0)].e_bat = 3.0
    s.harvested_total = 3.0
    assert inject_crash(s, (1, 0))
    assert s.crashed_energy == 3.0


def test_prune_on_move():
    s = build_system([(0, 0), (1, 0), (2, 0)], [(0, 0)], 10, 1, 5)
    set_parents(s, {(1, 0): (0, 0), (2, 0): (1, 0)})
    prune_on_move(s, (1, 0))
    assert s.occupancy[(2, 0)].prune and s.occupancy[(1, 0)].role is Role.IDLE

    r = build_system([(0, 0), (1, 0), (-1, 0)], [(0, 0)], 10, 1, 5)
    set_parents(r, {(1, 0): (0, 0), (-1, 0): (0, 0)})
    prune_on_move(r, (0, 0))
    assert r.occupancy[(1, 0)].prune and r.occupancy[(-1, 0)].prune
    assert r.occupancy[(0, 0)].role is Role.ROOT

    t = build_system([(0, 0), (1, 0), (2, 0)], [(0, 0)], 10, 1, 5)
    set_parents(t, {(1, 0): (0, 0), (2, 0): (1, 0)})
    prune_on_move(t, (2, 0))
    assert t.occupancy[(2, 0)].role is Role.IDLE
    assert not any(p.prune for p in t.occupancy.values())


def test_fresh_prune_count_is_zero():
    s = build_system([(0, 0), (1, 0)], [(0, 0)], 10, 1, 5)
    assert prune_count(s, (1, 0)) == 0
