"""Run configuration: an INI file with [system], [behavior], [schedule], [faults] and [output] sections.

Example::

    [system]
    shape = hexagon:91
    roots = center
    kappa = 10
    alpha = 1
    demand = 5

    [behavior]
    kind = demand_only

    [schedule]
    kind = permutation
    stop = all_met_once
    max_rounds = 5000

Shapes are ``hexagon:N`` (spiral of N nodes), ``line:N``, ``blob:N`` (seeded
random hole-free shape) or an explicit ``q,r; q,r; ...`` list. Roots are
``center`` (the first shape node), ``count:K`` (K seeded random nodes,
always including the first) or an explicit coordinate list. Crashes are
``round@q,r`` entries separated by ``;``.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .behaviors import BehaviorHook, DemandOnly, HexagonFormation, Reproduction
from .lattice import AxialCoord, line, parse_coord, random_blob, spiral
from .scheduler import STOP_KINDS, Schedule, StopCondition
from .system import DemandSpec, SystemState, ValidationError, build_system

SECTIONS = ("system", "behavior", "schedule", "faults", "output")

KNOWN_KEYS = {
    "system": {"shape", "roots", "kappa", "alpha", "demand", "demand_kind", "demand_lo", "demand_hi",
               "communication", "communication_disabled", "repair", "child_selection", "random_orientation"},
    "behavior": {"kind", "move_cost", "repro_cost", "max_size", "seed_coord"},
    "schedule": {"kind", "stop", "max_rounds", "target", "sequence"},
    "faults": {"crashes"},
    "output": {"frames_every", "trace"},
}


class ConfigError(ValidationError):
    """Config validation failure; the message names the offending key and its line."""


@dataclass
class RunConfig:
    shape: str = "hexagon:91"
    roots: str = "center"
    kappa: float = 10.0
    alpha: float = 1.0
    demand: float = 5.0
    demand_kind: str = "uniform"
    demand_lo: float = 0.0
    demand_hi: float = 0.0
    communication: bool = True
    repair: bool = True
    child_selection: str = "round-robin"
    random_orientation: bool = False
    behavior: str = "demand_only"
    move_cost: float = 5.0
    repro_cost: float = 5.0
    max_size: int = 100000
    seed_coord: str = "0,0"
    schedule: str = "permutation"
    stop: str = "max_rounds"
    max_rounds: int = 1000
    target: int = 0
    sequence: str = ""
    crashes: list[tuple[int, AxialCoord]] = field(default_factory=list)
    frames_every: int = 0
    trace: bool = False
    source: str = "<memory>"

    def with_value(self, key: str, value: str) -> "RunConfig":
        """Copy with one key overridden, as a sweep does. ``n`` rewrites the shape size; ``roots`` accepts a count."""
        if key == "n":
            kind = self.shape.split(":", 1)[0] if ":" in self.shape else "hexagon"
            return replace(self, shape=f"{kind}:{int(value)}")
        if key == "roots" and value.strip().isdigit():
            return replace(self, roots=f"count:{int(value)}")
        if key not in RunConfig.__dataclass_fields__ or key in ("crashes", "source"):
            raise ConfigError(f"cannot vary unknown key {key!r}")
        current = getattr(self, key)
        try:
            if isinstance(current, bool):
                new = _parse_bool(value)
            else:
                new = type(current)(value)
        except ValueError:
            raise ConfigError(f"bad value {value!r} for {key}") from None
        return replace(self, **{key: new})


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


def _line_index(text: str) -> dict[tuple[str, str], int]:
    """Map (section, key) to the 1-based line where the key is defined."""
    out = {}
    section = None
    for no, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if not s or s[0] in "#;":
            continue
        if s.startswith("[") and s.endswith("]"):
            section = s[1:-1].strip().lower()
        elif section and ("=" in s or ":" in s):
            sep = min(i for i in (s.find("="), s.find(":")) if i >= 0)
            out[(section, s[:sep].strip().lower())] = no
    return out


def parse_config(text: str, source: str = "<memory>") -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",))
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    lines = _line_index(text)

    def where(sec: str, key: str) -> str:
        no = lines.get((sec, key))
        return f"{source}:{no}" if no else source

    for sec in parser.sections():
        if sec not in SECTIONS:
            raise ConfigError(f"{source}: unknown section [{sec}]")
        for key in parser[sec]:
            if key not in KNOWN_KEYS[sec]:
                raise ConfigError(f"{where(sec, key)}: unknown key {key!r} in [{sec}]")
    if not parser.has_section("system"):
        raise ConfigError(f"{source}: missing [system] section")
    for key in ("shape", "roots", "kappa", "alpha"):
        if key not in parser["system"]:
            raise ConfigError(f"{source}: missing required key {key!r} in [system]")

    cfg = RunConfig(source=source)

    def get(sec, key, conv, attr=None):
        if not parser.has_section(sec) or key not in parser[sec]:
            return
        raw = parser[sec][key]
        try:
            val = conv(raw)
        except ValueError:
            raise ConfigError(f"{where(sec, key)}: bad value {raw!r} for {key}") from None
        setattr(cfg, attr or key, val)

    get("system", "shape", str.strip)
    get("system", "roots", str.strip)
    for key in ("kappa", "alpha", "demand", "demand_lo", "demand_hi"):
        get("system", key, float)
    get("system", "demand_kind", str.strip)
    get("system", "communication", _parse_bool)
    get("system", "communication_disabled", lambda v: not _parse_bool(v), "communication")
    get("system", "repair", _parse_bool)
    get("system", "child_selection", str.strip)
    get("system", "random_orientation", _parse_bool)
    get("behavior", "kind", str.strip, "behavior")
    get("behavior", "move_cost", float)
    get("behavior", "repro_cost", float)
    get("behavior", "max_size", int)
    get("behavior", "seed_coord", str.strip)
    get("schedule", "kind", str.strip, "schedule")
    get("schedule", "stop", str.strip)
    get("schedule", "max_rounds", int)
    get("schedule", "target", int)
    get("schedule", "sequence", str.strip)
    get("faults", "crashes", _parse_crashes)
    get("output", "frames_every", int)
    get("output", "trace", _parse_bool)

    checks = [
        ("behavior", "kind", cfg.behavior in ("demand_only", "hexagon", "growth")),
        ("schedule", "kind", cfg.schedule in ("permutation", "weighted", "random", "explicit")),
        ("schedule", "stop", cfg.stop in STOP_KINDS),
        ("schedule", "max_rounds", cfg.max_rounds >= 0),
        ("system", "demand_kind", cfg.demand_kind in ("uniform", "random")),
        ("output", "frames_every", cfg.frames_every >= 0),
    ]
    for sec, key, ok in checks:
        if not ok:
            raise ConfigError(f"{where(sec, key)}: invalid value for {key}")
    if cfg.schedule == "explicit" and not cfg.sequence:
        raise ConfigError(f"{where('schedule', 'kind')}: explicit schedule needs a sequence")
    try:
        _shape_nodes(cfg.shape, np.random.Generator(np.random.Philox(0)))
    except ValueError as exc:
        raise ConfigError(f"{where('system', 'shape')}: {exc}") from None
    return cfg


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, str(path))


def _parse_coords(text: str) -> list[AxialCoord]:
    return [parse_coord(part) for part in text.split(";") if part.strip()]


def _parse_crashes(text: str) -> list[tuple[int, AxialCoord]]:
    out = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        rnd, _, coord = part.partition("@")
        if not coord:
            raise ValueError(part)
        out.append((int(rnd), parse_coord(coord)))
    return out


def _shape_nodes(text: str, rng: np.random.Generator) -> list[AxialCoord]:
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    if kind in ("hexagon", "line", "blob"):
        try:
            n = int(arg)
        except ValueError:
            raise ValueError(f"bad size in shape {text!r}") from None
        if n < 1:
            raise ValueError("shape size must be positive")
        if kind == "hexagon":
            return spiral((0, 0), n)
        if kind == "line":
            return line((0, 0), n, 0)
        return random_blob((0, 0), n, rng)
    try:
        return _parse_coords(text)
    except ValueError:
        raise ValueError(f"cannot parse shape {text!r}") from None


def _root_nodes(text: str, nodes: list[AxialCoord], rng: np.random.Generator) -> list[AxialCoord]:
    text = text.strip()
    if text == "center":
        return [nodes[0]]
    if text.startswith("count:"):
        k = int(text[6:])
        if not 1 <= k <= len(nodes):
            raise ConfigError(f"root count {k} out of range")
        extra = rng.choice(np.arange(1, len(nodes)), k - 1, replace=False) if k > 1 else []
        return [nodes[0]] + [nodes[int(i)] for i in extra]
    try:
        return _parse_coords(text)
    except ValueError:
        raise ConfigError(f"cannot parse roots {text!r}") from None


def build_from_config(cfg: RunConfig, seed: int) -> tuple[SystemState, Schedule, BehaviorHook, StopCondition]:
    """Instantiate the system, schedule, behavior and stop condition for one seeded run."""
    rng = np.random.Generator(np.random.Philox(seed))
    nodes = _shape_nodes(cfg.shape, rng)
    roots = _root_nodes(cfg.roots, nodes, rng)
    if cfg.behavior == "growth":
        delta: DemandSpec | float = cfg.repro_cost
    elif cfg.behavior == "hexagon":
        delta = cfg.move_cost
    elif cfg.demand_kind == "random":
        delta = DemandSpec.seeded_range(cfg.demand_lo, cfg.demand_hi, seed)
    else:
        delta = cfg.demand
    s = build_system(nodes, roots, cfg.kappa, cfg.alpha, delta, communication=cfg.communication,
                     repair=cfg.repair, child_selection=cfg.child_selection, seed=seed,
                     random_orientation=cfg.random_orientation)
    if cfg.behavior == "growth":
        behavior: BehaviorHook = Reproduction(cfg.repro_cost, cfg.max_size, cfg.random_orientation)
    elif cfg.behavior == "hexagon":
        behavior = HexagonFormation(parse_coord(cfg.seed_coord), cfg.move_cost)
    else:
        behavior = DemandOnly()
    if cfg.schedule == "explicit":
        sch = Schedule.explicit(_parse_coords(cfg.sequence))
    else:
        sch = Schedule(cfg.schedule, seed)
    stop = StopCondition(cfg.stop, cfg.max_rounds, cfg.target)
    return s, sch, behavior, stop
