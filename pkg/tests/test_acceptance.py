"""Acceptance criteria, one test each.

Every test records a one-line verdict in ``RESULTS``; ``conftest.py`` prints
them at the end of the session (also ``python tests/test_acceptance.py``).
Numbers frozen here were produced by the oracles in ``amoebot_energy.oracle``
and by the experiment plans in ``amoebot_energy.experiments``.
"""

from __future__ import annotations

import statistics
import time

import pytest

from amoebot_energy import experiments as ex

RESULTS: dict[int, str] = {}
LEDGER_ERRORS: list[float] = []

pytestmark = pytest.mark.slow


def record(num: int, title: str, ok: bool, detail: str) -> None:
    RESULTS[num] = f"[{'PASS' if ok else 'FAIL'}] {num:>2}. {title}: {detail}"


def note_ledger(rows) -> None:
    LEDGER_ERRORS.extend(r["max_ledger_error"] for r in rows if "max_ledger_error" in r)


def test_01_exact_recharge():
    t0 = time.perf_counter()
    rows = ex.recharge_grid(range(1, 21), range(1, 11))
    bad = [r for r in rows if r["rounds"] != r["expected"]]
    dt = time.perf_counter() - t0
    ok = not bad and dt < 1.0
    record(1, "parallel recharge time equals (kappa'/alpha) k", ok, f"{len(rows)} cells, {len(bad)} mismatches, {dt:.2f} s")
    assert ok, bad[:3]


def test_02_dominance():
    t0 = time.perf_counter()
    res = ex.dominance_suite(200, base_seed=0)
    bad = [r for r in res if r["violations"]]
    dt = time.perf_counter() - t0
    ok = not bad and dt < 30.0
    boundaries = sum(r["rounds"] + 1 for r in res)
    record(2, "async path dominates greedy parallel schedule", ok,
           f"200 runs, {boundaries} boundaries, {len(bad)} violating runs, {dt:.1f} s")
    assert ok, bad[:1]


def test_03_path_is_worst():
    rows = ex.path_worst_table(5, 3.0, 1.0)
    bad = [r for r in rows if r["worst"] > r["path"]]
    paths = {r["n"]: r["path"] for r in rows}
    # frozen from the brute-force oracle: 3 units per particle, one per round
    assert paths == {1: 3, 2: 6, 3: 9, 4: 12, 5: 15}
    ok = not bad and len(rows) == 1 + 1 + 2 + 4 + 9
    record(3, "every rooted tree (n<=5) recharges no slower than the path", ok,
           f"{len(rows)} trees, path worst {paths}, {len(bad)} exceed")
    assert ok


def test_04_inhibit_and_release():
    res = [ex.propagation_run(ex.derive_seed(0, "propagation", i)) for i in range(100)]
    late_inhibit = [r for r in res if not r["inhibit_ok"]]
    late_release = [r for r in res if not r["release_ok"]]
    worst_i = max(r["all_inhibited"] / r["depth"] for r in res)
    worst_r = max((r["acted_after"] - r["recharged"]) / r["depth"] for r in res)
    ok = not late_inhibit and not late_release and max(r["depth"] for r in res) <= 8
    record(4, "inhibit spread and release within 2d rounds", ok,
           f"100 trees, depths {min(r['depth'] for r in res)}-{max(r['depth'] for r in res)}, "
           f"worst spread {worst_i:.2f}d, worst release {worst_r:.2f}d, "
           f"{len(late_inhibit) + len(late_release)} violations")
    assert ok, (late_inhibit + late_release)[:1]


def test_05_prune_bounds():
    res = [ex.prune_scenario(ex.derive_seed(0, "prune", i), "chase" if i % 2 == 0 else "random")
           for i in range(100)]
    late = [r for r in res if r["late_prunes"]]
    many = [r for r in res if r["max_adjacent_prunes"] > 6]
    unstable = [r for r in res if not r["stabilized"]]
    ok = not late and not many and not unstable
    record(5, "pruning within depth rounds, at most 6 prunes next to F*", ok,
           f"100 scenarios (50 chase-cycle), {len(late)} late, max prunes {max(r['max_adjacent_prunes'] for r in res)}, "
           f"{len(unstable)} unstabilized")
    assert ok


def test_06_linear_scaling():
    sizes = (7, 19, 37, 61, 91, 169)
    means = {}
    for n in sizes:
        rows = [ex.first_all_met(n, ex.derive_seed(0, "scaling", n, j)) for j in range(20)]
        note_ledger(rows)
        assert all(r["rounds"] is not None for r in rows)
        means[n] = statistics.fmean(r["rounds"] for r in rows)
    fit = ex.scaling_fit(means)
    ratio = means[169] / means[91]
    limit = 1.3 * 169 / 91
    ok = fit["superlinear_ratio"] < 0.15 and ratio <= limit
    slope, icept = fit["linear"]
    record(6, "first all-met round grows linearly in n", ok,
           f"means {dict((n, round(m, 1)) for n, m in means.items())}, linear fit {slope:.2f}n{icept:+.1f}, "
           f"quadratic share {fit['superlinear_ratio']:.4f}, r(169)/r(91)={ratio:.3f} <= {limit:.3f}")
    assert ok


def test_07_ablation():
    on, off = [], []
    for j in range(20):
        seed = ex.derive_seed(0, "ablation", j)
        on.append(ex.ablation_run(seed, True))
        off.append(ex.ablation_run(seed, False))
    note_ledger(on + off)
    ok = all(r["met_fraction"] == 1.0 for r in on) and all(r["met_fraction"] < 0.5 for r in off)
    record(7, "communication is what gets demands met", ok,
           f"with {min(r['met_fraction'] for r in on):.2f}-{max(r['met_fraction'] for r in on):.2f}, "
           f"without {min(r['met_fraction'] for r in off):.2f}-{max(r['met_fraction'] for r in off):.2f}")
    assert ok


def test_08_stabilization():
    rows = []
    for name in ex.STABILIZATION_BUILDERS:
        for m in (2, 4, 8, 16, 32):
            rows.extend(ex.stabilization_run(m, ex.derive_seed(0, "stabilization", name, m, j), name)
                        for j in range(20))
    note_ledger(rows)
    missing = [r for r in rows if r["rounds"] is None]
    fitted = max(r["rounds"] / r["m"] ** 2 for r in rows if r["rounds"] is not None)
    worst = {m: max(r["rounds"] for r in rows if r["m"] == m and r["rounds"] is not None) for m in (2, 4, 8, 16, 32)}
    ok = not missing and fitted <= ex.STABILIZATION_C
    record(8, "severed particles rejoin within c m^2 rounds", ok,
           f"{len(rows)} runs, worst rounds by m {worst}, fitted c={fitted:.3f} (harness c={ex.STABILIZATION_C})")
    assert ok


def test_09_composition():
    runs = [ex.composition_run(n, ex.derive_seed(0, "composition", j)) for n in (7, 19, 37) for j in range(3)]
    trend = {}
    for roots in (1, 2, 4, 8):
        rows = [ex.composition_run(37, ex.derive_seed(0, "composition", j), roots) for j in range(10)]
        runs.extend(rows)
        trend[roots] = statistics.fmean(r["rounds"] for r in rows)
    note_ledger(runs)
    safe = all(r["complete"] and r["exact"] and r["bad_actions"] == 0 and r["disconnected_rounds"] == 0
               for r in runs)
    means = [trend[k] for k in (1, 2, 4, 8)]
    monotone = all(b <= a for a, b in zip(means, means[1:]))
    gap = max(r["max_action_gap"] / r["n"] for r in runs)
    ok = safe and monotone
    record(9, "hexagon formation with energy is safe, extra roots help", ok,
           f"{len(runs)} runs exact/connected/guarded={safe}, mean rounds by roots "
           f"{dict((k, round(v)) for k, v in trend.items())}, longest idle gap {gap:.1f}n rounds")
    assert ok


def test_10_growth_oscillation():
    main = ex.growth_run(0, rounds=1025, schedule="random")
    info = ex.growth_run(0, rounds=1025, schedule="permutation")
    note_ledger([main, info])
    ok = main["alternations"] >= 3 and main["population"] >= 100 and main["forest_ok"]
    record(10, "growth proceeds in bursts", ok,
           f"random sequential schedule: {main['alternations']} zero/positive switches, population "
           f"{main['population']} at round 1025; info, round-permutation schedule: {info['alternations']} switches, "
           f"population {info['population']}")
    assert ok


def test_11_conservation_and_determinism(tmp_path):
    from amoebot_energy.cli import main
    from pathlib import Path

    cfg = Path(__file__).resolve().parents[1] / "configs"
    same = True
    for name, extra in (("demand_only.ini", []), ("crash.ini", []), ("growth.ini", ["--max-rounds", "300"]),
                        ("hexagon.ini", [])):
        outs = []
        for tag in ("a", "b"):
            out = tmp_path / f"{name}-{tag}"
            assert main(["run", "--config", str(cfg / name), "--seed", "11", "--out", str(out)] + extra) == 0
            outs.append(((out / "rounds.csv").read_bytes(), (out / "summary.json").read_bytes()))
            import json

            LEDGER_ERRORS.append(json.loads(outs[-1][1])["max_ledger_error"])
        same = same and outs[0] == outs[1]
    a = ex.ablation_run(5, True)["csv"]
    b = ex.ablation_run(5, True)["csv"]
    same = same and a == b
    worst = max(LEDGER_ERRORS)
    ok = same and worst <= 1e-6
    record(11, "energy ledger balances and runs are reproducible", ok,
           f"{len(LEDGER_ERRORS)} runs, worst ledger error {worst:.3g}, byte-identical repeats={same}")
    assert ok


if __name__ == "__main__":
    import sys
    import tempfile
    import pathlib

    for name, fn in sorted((k, v) for k, v in globals().items() if k.startswith("test_")):
        try:
            if "tmp_path" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
                fn(pathlib.Path(tempfile.mkdtemp()))
            else:
                fn()
        except AssertionError:
            pass
    for k in sorted(RESULTS):
        print(RESULTS[k])
    sys.exit(0 if all(v.startswith("[PASS]") for v in RESULTS.values()) else 1)
