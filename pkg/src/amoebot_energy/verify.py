"""Property suites behind ``amoebot-energy verify``.

Every suite returns a :class:`SuiteResult`; a failing suite carries the
first counterexample (seed plus configuration) in ``detail``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import experiments as ex
from .behaviors import DemandOnly, HexagonFormation, Reproduction
from .lattice import random_blob
from .scheduler import Schedule, StopCondition, run
from .system import build_system

LEDGER_TOL = 1e-6


@dataclass
class SuiteResult:
    name: str
    passed: bool
    checked: int
    detail: str = ""
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        tail = f"  {self.detail}" if self.detail else ""
        return f"{status}  {self.name:<16} {self.checked:>5} checks{tail}"


def exact_recharge() -> SuiteResult:
    rows = ex.recharge_grid(alphas=(1.0, 0.5, 2.0))
    bad = [r for r in rows if r["rounds"] != r["expected"]]
    return SuiteResult("exact-recharge", not bad, len(rows), str(bad[0]) if bad else "")


def dominance(runs: int = 200, base_seed: int = 0) -> SuiteResult:
    res = ex.dominance_suite(runs, base_seed)
    bad = [r for r in res if r["violations"]]
    detail = ""
    if bad:
        b = bad[0]
        detail = f"seed={b['seed']} k={b['k']} schedule={b['schedule']} first violation at round {b['violations'][0]}"
    return SuiteResult("dominance", not bad, len(res), detail)


def path_worst(max_n: int = 5) -> SuiteResult:
    rows = ex.path_worst_table(max_n)
    bad = [r for r in rows if r["worst"] > r["path"]]
    return SuiteResult("path-worst", not bad, len(rows), str(bad[0]) if bad else "",
                       {"table": [(r["n"], r["worst"], r["path"]) for r in rows]})


def _propagation(runs: int, base_seed: int, key: str, name: str) -> SuiteResult:
    bad = None
    for i in range(runs):
        r = ex.propagation_run(ex.derive_seed(base_seed, "propagation", i))
        if not r[key]:
            bad = r
            break
    detail = "" if bad is None else str(bad)
    return SuiteResult(name, bad is None, runs if bad is None else i + 1, detail)


def inhibit_spread(runs: int = 100, base_seed: int = 0) -> SuiteResult:
    return _propagation(runs, base_seed, "inhibit_ok", "inhibit-spread")


def release(runs: int = 100, base_seed: int = 0) -> SuiteResult:
    return _propagation(runs, base_seed, "release_ok", "release")


def _prunes(runs: int, base_seed: int) -> list[dict]:
    return [ex.prune_scenario(ex.derive_seed(base_seed, "prune", i), "chase" if i % 2 == 0 else "random")
            for i in range(runs)]


def prune_depth(runs: int = 100, base_seed: int = 0) -> SuiteResult:
    res = _prunes(runs, base_seed)
    bad = [r for r in res if r["late_prunes"]]
    return SuiteResult("prune-depth", not bad, len(res), str(bad[0]) if bad else "")


def chase_cycles(runs: int = 100, base_seed: int = 0) -> SuiteResult:
    res = _prunes(runs, base_seed)
    bad = [r for r in res if r["max_adjacent_prunes"] > 6 or not r["stabilized"]]
    worst = max(r["max_adjacent_prunes"] for r in res)
    return SuiteResult("chase-cycles", not bad, len(res), str(bad[0]) if bad else f"max prunes {worst}")


def conservation(runs: int = 24, base_seed: int = 0) -> SuiteResult:
    """Ledger balance on mixed runs: every behavior, every schedule kind, with and without crashes."""
    worst = 0.0
    for i in range(runs):
        seed = ex.derive_seed(base_seed, "conservation", i)
        rng = np.random.Generator(np.random.Philox(seed))
        kind = ("permutation", "weighted", "random")[i % 3]
        behavior_kind = i % 4
        n = int(rng.integers(5, 30))
        if behavior_kind == 3:
            s = build_system([(0, 0)], [(0, 0)], 10.0, 1.0, 5.0, seed=seed)
            beh = Reproduction(5.0, 60)
            crashes = []
        else:
            nodes = random_blob((0, 0), n, rng)
            roots = [nodes[0]] + ([nodes[-1]] if i % 2 else [])
            s = build_system(nodes, roots, 10.0, float(rng.choice([0.5, 1.0, 2.0])), 4.0, seed=seed,
                             random_orientation=True)
            beh = HexagonFormation((0, 0), 4.0) if behavior_kind == 2 else DemandOnly()
            crashes = [(int(rng.integers(1, 50)), nodes[int(rng.integers(1, n))])] if behavior_kind != 2 else []
        r = run(s, Schedule(kind, seed), beh, StopCondition("max_rounds", 300), crashes=crashes)
        err = r.summary["max_ledger_error"]
        worst = max(worst, err)
        if err > LEDGER_TOL:
            return SuiteResult("conservation", False, i + 1, f"seed={seed} schedule={kind} ledger error {err}")
    return SuiteResult("conservation", True, runs, f"max error {worst:.3g}")


SUITES = {
    "exact-recharge": exact_recharge,
    "dominance": dominance,
    "path-worst": path_worst,
    "inhibit-spread": inhibit_spread,
    "release": release,
    "prune-depth": prune_depth,
    "chase-cycles": chase_cycles,
    "conservation": conservation,
}


def run_suites(scope: str = "all") -> list[SuiteResult]:
    if scope == "all":
        return [fn() for fn in SUITES.values()]
    if scope not in SUITES:
        raise KeyError(scope)
    return [SUITES[scope]()]
