"""Experiment configuration: a TOML document with flat sections.

Degrees, dBm, MB, mph and milliseconds only live here; everything handed
to the simulation is SI and linear.
"""
from __future__ import annotations

import hashlib
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields, replace
from importlib import resources
from pathlib import Path
from typing import Any, Optional, Union, get_args, get_origin, get_type_hints

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .association import ASSOCIATION_ALGORITHMS, PAUtilityParams
from .channel import ChannelParams, dbm_to_watts
from .content import MEGABYTE_BITS, ContentCatalog
from .game import UtilityParams
from .linkdyn import TimingBudget

SCENARIOS = ("network", "test_requester", "links")


class ConfigError(ValueError):
    """A configuration value violates a constraint; the message names it."""


@dataclass(frozen=True)
class ChannelSection:
    carrier_ghz: float = 28.0  # nominal, not used by the propagation model
    bandwidth_mhz: float = 100.0
    noise_density_dbm_hz: float = -174.0
    tx_power_dbm: float = 15.0
    pathloss_intercept_db: float = -61.7
    pathloss_exponent: float = 2.0
    nakagami_shape: float = 3.0
    blockage_beta: float = 0.0027


@dataclass(frozen=True)
class AntennaSection:
    beamwidths_deg: tuple[float, ...] = (15.0, 25.0, 35.0, 45.0)
    wide_beamwidth_deg: float = 90.0


@dataclass(frozen=True)
class TimingSection:
    t_pilot_us: float = 10.0
    t_reply_ms: float = 1.0
    t_decide_ms: float = 1.0
    t_ack_ms: float = 1.0
    misalignment_threshold: float = 0.5


@dataclass(frozen=True)
class NetworkSection:
    scenario: str = "network"
    arena_side_m: float = 2000.0
    transmitter_density: float = 40.0  # per km^2
    requester_density: float = 40.0  # per km^2
    link_density: float = 30.0  # per km^2, links scenario
    link_count: Optional[int] = None  # links scenario: exact count instead of a Poisson draw
    coverage_m: float = 50.0
    speed_mph: tuple[float, float] = (1.0, 3.0)
    link_distance_m: tuple[float, float] = (30.0, 80.0)
    max_rounds: int = 10


@dataclass(frozen=True)
class ContentSection:
    n_contents: int = 5
    content_size_mb: float = 300.0
    segment_count: int = 100
    cache_probability: float = 1.0
    partial_fraction: float = 1.0
    demand_mb: tuple[float, float] = (0.0, 300.0)  # links scenario


@dataclass(frozen=True)
class AssociationSection:
    algorithm: str = "hpa"
    max_trials: int = 3
    stability_norm_s: float = 60.0
    availability_norm: Optional[float] = None  # segments; omitted -> requester's request size
    los_aware_baselines: bool = False


@dataclass(frozen=True)
class GameSection:
    strategy: str = "lll"
    interference_threshold_dbm: float = -90.0
    penalty_scalar_gbps: Optional[float] = None  # omitted -> best interference-free rate per link
    tau: Optional[float] = None  # omitted -> 1/k schedule
    update_cap: int = 8
    t_max: int = 50
    prob_threshold: float = 0.99
    max_iterations: int = 10_000
    utility_unit_gbps: float = 1.0
    exhaustive_budget: int = 10_000_000


@dataclass(frozen=True)
class RunSection:
    name: str = "experiment"
    n_trials: int = 100
    seed: int = 20240601
    workers: int = 1


SECTIONS = {
    "channel": ChannelSection,
    "antenna": AntennaSection,
    "timing": TimingSection,
    "network": NetworkSection,
    "content": ContentSection,
    "association": AssociationSection,
    "game": GameSection,
    "run": RunSection,
}


@dataclass(frozen=True)
class ExperimentConfig:
    channel: ChannelSection = field(default_factory=ChannelSection)
    antenna: AntennaSection = field(default_factory=AntennaSection)
    timing: TimingSection = field(default_factory=TimingSection)
    network: NetworkSection = field(default_factory=NetworkSection)
    content: ContentSection = field(default_factory=ContentSection)
    association: AssociationSection = field(default_factory=AssociationSection)
    game: GameSection = field(default_factory=GameSection)
    run: RunSection = field(default_factory=RunSection)

    # --- derived, SI ------------------------------------------------------
    def channel_params(self) -> ChannelParams:
        c = self.channel
        return ChannelParams(c.pathloss_intercept_db, c.pathloss_exponent, c.nakagami_shape, c.blockage_beta,
                             c.bandwidth_mhz * 1e6, c.noise_density_dbm_hz, c.tx_power_dbm)

    def timing_budget(self) -> TimingBudget:
        t = self.timing
        return TimingBudget(t.t_pilot_us * 1e-6, t.t_reply_ms * 1e-3, t.t_decide_ms * 1e-3, t.t_ack_ms * 1e-3,
                            t.misalignment_threshold)

    def action_set(self) -> tuple[float, ...]:
        return tuple(sorted(math.radians(b) for b in self.antenna.beamwidths_deg))

    @property
    def psi(self) -> float:
        return math.radians(self.antenna.wide_beamwidth_deg)

    def utility_params(self) -> UtilityParams:
        g = self.game
        pen = None if g.penalty_scalar_gbps is None else g.penalty_scalar_gbps * 1e9
        return UtilityParams(dbm_to_watts(g.interference_threshold_dbm), g.utility_unit_gbps * 1e9, pen)

    def pa_params(self) -> PAUtilityParams:
        a = self.association
        return PAUtilityParams(a.stability_norm_s, a.availability_norm)

    def catalog(self) -> ContentCatalog:
        c = self.content
        return ContentCatalog.uniform(c.n_contents, int(round(c.content_size_mb * MEGABYTE_BITS)), c.segment_count)

    def to_dict(self) -> dict:
        return {name: _plain(asdict(getattr(self, name))) for name in SECTIONS}

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form."""
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _plain(d: dict) -> dict:
    return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items() if v is not None}


def _coerce(section: str, key: str, hint, value):
    where = f"{section}.{key}"
    origin = get_origin(hint)
    if origin is Union:  # Optional[X]
        inner = [a for a in get_args(hint) if a is not type(None)][0]
        return None if value is None else _coerce(section, key, inner, value)
    if origin is tuple:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{where}: expected a list, got {value!r}")
        args = get_args(hint)
        if len(args) == 2 and args[1] is Ellipsis:
            return tuple(_coerce(section, key, args[0], v) for v in value)
        if len(value) != len(args):
            raise ConfigError(f"{where}: expected {len(args)} values, got {len(value)}")
        return tuple(_coerce(section, key, a, v) for a, v in zip(args, value))
    if hint is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true/false, got {value!r}")
        return value
    if hint is int:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or float(value) != int(value):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return int(value)
    if hint is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number, got {value!r}")
        if not math.isfinite(value):
            raise ConfigError(f"{where}: must be finite")
        return float(value)
    if hint is str:
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string, got {value!r}")
        return value
    raise ConfigError(f"{where}: unsupported type {hint}")


def _section_from(name: str, data: Any):
    cls = SECTIONS[name]
    if not isinstance(data, dict):
        raise ConfigError(f"[{name}] must be a table")
    hints = get_type_hints(cls)
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"[{name}] unknown key(s): {', '.join(unknown)}")
    return cls(**{k: _coerce(name, k, hints[k], v) for k, v in data.items()})


def from_dict(data: dict) -> ExperimentConfig:
    unknown = sorted(set(data) - set(SECTIONS))
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(unknown)}")
    cfg = ExperimentConfig(**{k: _section_from(k, v) for k, v in data.items()})
    validate(cfg)
    return cfg


def load(path: Union[str, Path]) -> ExperimentConfig:
    """Read and validate a config file, or a bundled preset by name."""
    p = Path(path)
    if not p.exists() and not p.suffix:
        return load_preset(str(path))
    try:
        with open(p, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {p}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{p}: {exc}") from None
    return from_dict(data)


def preset_names() -> list[str]:
    root = resources.files("mmd2d") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".toml"))


def load_preset(name: str) -> ExperimentConfig:
    root = resources.files("mmd2d") / "presets"
    res = root / f"{name}.toml"
    if not res.is_file():
        raise ConfigError(f"no preset named {name!r} (have: {', '.join(preset_names())})")
    return from_dict(tomllib.loads(res.read_text()))


def parse_strategy(text: str) -> tuple[str, Optional[float]]:
    """``lll`` | ``rbws`` | ``exhaustive`` | ``cbws:<degrees>``."""
    if text in ("lll", "rbws", "exhaustive"):
        return text, None
    if text.startswith("cbws:"):
        try:
            deg = float(text[5:])
        except ValueError:
            raise ConfigError(f"game.strategy: bad beamwidth in {text!r}") from None
        if not 0 < deg <= 180:
            raise ConfigError("game.strategy: cbws beamwidth must lie in (0, 180] degrees")
        return "cbws", math.radians(deg)
    raise ConfigError(f"game.strategy: unknown strategy {text!r}")


def validate(cfg: ExperimentConfig) -> None:
    c, a, t, n = cfg.channel, cfg.antenna, cfg.timing, cfg.network
    ct, asc, g, r = cfg.content, cfg.association, cfg.game, cfg.run
    checks = [
        (c.bandwidth_mhz > 0, "channel.bandwidth_mhz must be > 0"),
        (c.pathloss_exponent >= 0, "channel.pathloss_exponent must be >= 0"),
        (c.nakagami_shape >= 0.5, "channel.nakagami_shape must be >= 0.5"),
        (c.blockage_beta >= 0, "channel.blockage_beta must be >= 0"),
        (len(a.beamwidths_deg) > 0, "antenna.beamwidths_deg must not be empty"),
        (0 < a.wide_beamwidth_deg <= 180, "antenna.wide_beamwidth_deg must lie in (0, 180]"),
        (all(0 < b <= a.wide_beamwidth_deg for b in a.beamwidths_deg),
         "antenna.beamwidths_deg must lie in (0, wide_beamwidth_deg]"),
        (len(set(a.beamwidths_deg)) == len(a.beamwidths_deg), "antenna.beamwidths_deg has duplicates"),
        (t.t_pilot_us > 0, "timing.t_pilot_us must be > 0"),
        (min(t.t_reply_ms, t.t_decide_ms, t.t_ack_ms) >= 0, "timing exchange durations must be >= 0"),
        (0 < t.misalignment_threshold <= 1, "timing.misalignment_threshold must lie in (0, 1]"),
        (n.scenario in SCENARIOS, f"network.scenario must be one of {SCENARIOS}"),
        (n.arena_side_m > 0, "network.arena_side_m must be > 0"),
        (min(n.transmitter_density, n.requester_density, n.link_density) >= 0, "densities must be >= 0"),
        (n.coverage_m > 0, "network.coverage_m must be > 0"),
        (0 <= n.speed_mph[0] <= n.speed_mph[1], "network.speed_mph must be [lo, hi] with 0 <= lo <= hi"),
        (0 < n.link_distance_m[0] <= n.link_distance_m[1], "network.link_distance_m must be [lo, hi], 0 < lo <= hi"),
        (n.max_rounds >= 1, "network.max_rounds must be >= 1"),
        (n.link_count is None or n.link_count >= 0, "network.link_count must be >= 0"),
        (ct.n_contents >= 1, "content.n_contents must be >= 1"),
        (ct.content_size_mb > 0, "content.content_size_mb must be > 0"),
        (ct.segment_count >= 1, "content.segment_count must be >= 1"),
        (0 <= ct.cache_probability <= 1, "content.cache_probability must lie in [0, 1]"),
        (0 < ct.partial_fraction <= 1, "content.partial_fraction must lie in (0, 1]"),
        (0 <= ct.demand_mb[0] <= ct.demand_mb[1], "content.demand_mb must be [lo, hi] with 0 <= lo <= hi"),
        (asc.algorithm in ASSOCIATION_ALGORITHMS, f"association.algorithm must be one of {ASSOCIATION_ALGORITHMS}"),
        (asc.max_trials >= 1, "association.max_trials must be >= 1"),
        (asc.stability_norm_s > 0, "association.stability_norm_s must be > 0"),
        (asc.availability_norm is None or asc.availability_norm > 0, "association.availability_norm must be > 0"),
        (g.penalty_scalar_gbps is None or g.penalty_scalar_gbps > 0, "game.penalty_scalar_gbps must be > 0"),
        (g.tau is None or g.tau > 0, "game.tau must be > 0 (omit it for the 1/k schedule)"),
        (g.update_cap >= 1, "game.update_cap must be >= 1"),
        (g.t_max >= 1, "game.t_max must be >= 1"),
        (0 < g.prob_threshold < 1, "game.prob_threshold must lie in (0, 1)"),
        (g.max_iterations >= 1, "game.max_iterations must be >= 1"),
        (g.utility_unit_gbps > 0, "game.utility_unit_gbps must be > 0"),
        (g.exhaustive_budget >= 1, "game.exhaustive_budget must be >= 1"),
        (r.n_trials >= 1, "run.n_trials must be >= 1"),
        (0 <= r.seed < 2 ** 64, "run.seed must be a 64-bit unsigned integer"),
        (r.workers >= 1, "run.workers must be >= 1"),
    ]
    for ok, message in checks:
        if not ok:
            raise ConfigError(message)
    parse_strategy(g.strategy)


def with_overrides(cfg: ExperimentConfig, overrides: dict[str, Any]) -> ExperimentConfig:
    """Copy of ``cfg`` with ``{"section.key": value}`` replaced and re-validated."""
    sections = {name: getattr(cfg, name) for name in SECTIONS}
    for path, value in overrides.items():
        section, _, key = path.partition(".")
        if section not in SECTIONS or not key:
            raise ConfigError(f"bad parameter path {path!r}; expected section.key")
        cls = SECTIONS[section]
        hints = get_type_hints(cls)
        if key not in hints:
            raise ConfigError(f"[{section}] unknown key: {key}")
        sections[section] = replace(sections[section], **{key: _coerce(section, key, hints[key], value)})
    out = ExperimentConfig(**sections)
    validate(out)
    return out


def parse_value(text: str) -> Any:
    """Interpret a command-line value the way TOML would."""
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text
