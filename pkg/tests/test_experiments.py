"""Reduced-size versions of the experiment plans; the full ones live in test_acceptance.py."""

from amoebot_energy import experiments as ex
from amoebot_energy.verify import SUITES, SuiteResult


def test_derive_seed_is_stable_and_spread():
    assert ex.derive_seed(1, "a", 2) == ex.derive_seed(1, "a", 2)
    assert len({ex.derive_seed(0, v, r) for v in range(10) for r in range(10)}) == 100


def test_dominance_small():
    for i in range(10):
        r = ex.dominance_run(2 + i % 7, i, "weighted" if i % 2 else "permutation")
        assert r["violations"] == []


def test_async_path_suffix_sums_reach_parallel_target():
    seed = 3
    s, nodes = ex.prebuilt_path(5, 10.0, 1.0, 10.0, seed)
    from amoebot_energy.behaviors import BehaviorHook
    from amoebot_energy.scheduler import Schedule, StopCondition, run

    r = run(s, Schedule.permutation(seed), BehaviorHook(), StopCondition("max_rounds", 45))
    from amoebot_energy.oracle import suffix_sums

    sums = suffix_sums([s.occupancy[c].e_bat for c in nodes])
    assert all(x >= 9.0 * (5 - i) - 1e-9 for i, x in enumerate(sums))
    assert r.summary["max_ledger_error"] == 0.0


def test_lattice_tree_depth_limit():
    import numpy as np

    rng = np.random.Generator(np.random.Philox(1))
    nodes, parents = ex.random_lattice_tree(rng, 30, 3)
    depth = ex._depths(parents, nodes[0])
    assert max(depth.values()) <= 3 and len(nodes) == len(set(nodes))


def test_propagation_small():
    for i in range(8):
        r = ex.propagation_run(ex.derive_seed(9, i))
        assert r["inhibit_ok"] and r["release_ok"], r


def test_chase_cycle_construction():
    s, victim, depth = ex.chase_cycle_system(0)
    assert victim == (2, 0) and len(depth) == 6
    from amoebot_energy.metrics import classify_forest

    assert classify_forest(s).f_star == set(s.occupancy)
    r = ex.prune_scenario(0, "chase")
    assert r["severed"] == 6 and not r["late_prunes"] and r["stabilized"]


def test_prune_random_small():
    for i in range(6):
        r = ex.prune_scenario(ex.derive_seed(4, i), "random")
        assert not r["late_prunes"] and r["max_adjacent_prunes"] <= 6 and r["stabilized"]


def test_stabilization_constructions():
    for name in ex.STABILIZATION_BUILDERS:
        r = ex.stabilization_run(4, 1, name)
        assert r["rounds"] is not None and r["rounds"] <= r["bound"]


def test_scaling_fit_recovers_linear_data():
    fit = ex.scaling_fit({n: 10 * n - 5 for n in (7, 19, 37, 61)})
    assert fit["superlinear_ratio"] < 1e-6
    quad = ex.scaling_fit({n: n * n for n in (7, 19, 37, 61)})
    assert quad["superlinear_ratio"] > 0.9


def test_first_all_met_small():
    r = ex.first_all_met(7, 0)
    assert r["rounds"] == 65  # 10n - 5 with kappa=10, alpha=1, delta=5


def test_ablation_small():
    on = ex.ablation_run(0, True, rounds=1000)
    off = ex.ablation_run(0, False, rounds=1000)
    assert on["met_fraction"] == 1.0 and off["met_fraction"] < 0.5


def test_composition_small():
    r = ex.composition_run(7, 1)
    assert r["complete"] and r["exact"] and r["bad_actions"] == 0 and r["disconnected_rounds"] == 0


def test_growth_short():
    r = ex.growth_run(0, rounds=200, schedule="permutation")
    assert r["population"] > 10 and r["forest_ok"] and r["max_ledger_error"] <= 1e-6


def test_verify_suite_registry():
    assert set(SUITES) == {"exact-recharge", "dominance", "path-worst", "inhibit-spread", "release",
                           "prune-depth", "chase-cycles", "conservation"}
    assert SuiteResult("x", False, 3, "seed=1").line().startswith("FAIL")
