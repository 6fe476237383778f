"""Scenario configuration and the flat ``key = value`` config file format."""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass, fields
from pathlib import Path


class WeightMode(str, enum.Enum):
    SUM_RATE = "SumRate"
    PATH_LOSS_COMPENSATION = "PathLossCompensation"


class ConfigError(ValueError):
    """Raised for unknown keys or values that break a config invariant."""


@dataclass(frozen=True)
class ScenarioConfig:
    """Parameters of one single-cell full-duplex scenario.

    Defaults reproduce the 25-user urban-micro setup (100 m cell, 24 dBm
    caps, -116.4 dBm noise per channel, 0 dB SINR targets, step 0.1).
    Power-like fields are in dBm, ratios in dB; conversion to linear units
    happens once in :func:`fdpair.channel.build_instance`.
    """

    cell_radius: float = 100.0
    num_ul: int = 25
    num_dl: int = 25
    num_channels: int = 25
    noise_power: float = -116.4
    si_cancellation: float = -110.0
    p_max_ul: float = 24.0
    p_max_dl: float = 24.0
    sinr_target_ul: float = 0.0
    sinr_target_dl: float = 0.0
    weight_mode: WeightMode = WeightMode.PATH_LOSS_COMPENSATION
    epsilon: float = 0.1
    drops: int = 400
    seed: int = 0
    los_shadow_std: float = 3.0
    nlos_shadow_std: float = 4.0
    # modelling switches beyond the base scenario
    force_nlos: bool = False
    min_distance: float = 3.0
    repa_power: str = "max"

    def __post_init__(self):
        if not isinstance(self.weight_mode, WeightMode):
            object.__setattr__(self, "weight_mode", WeightMode(self.weight_mode))
        self.validate()

    @property
    def n(self) -> int:
        return self.num_ul

    def validate(self) -> None:
        if self.num_ul != self.num_dl:
            raise ConfigError(
                f"num_ul ({self.num_ul}) must equal num_dl ({self.num_dl})")
        if self.num_ul > self.num_channels:
            raise ConfigError(
                f"num_ul ({self.num_ul}) exceeds num_channels ({self.num_channels})")
        for name in ("cell_radius", "num_ul", "num_dl", "num_channels",
                     "epsilon", "drops", "min_distance"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be strictly positive")
        if self.min_distance >= self.cell_radius:
            raise ConfigError("min_distance must be smaller than cell_radius")
        if self.los_shadow_std < 0 or self.nlos_shadow_std < 0:
            raise ConfigError("shadowing std must be non-negative")
        if self.si_cancellation > 0:
            raise ConfigError("si_cancellation is a residual fraction, must be <= 0 dB")
        if self.repa_power not in ("max", "half"):
            raise ConfigError("repa_power must be 'max' or 'half'")

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def with_overrides(self, overrides: dict[str, str]) -> "ScenarioConfig":
        """Apply string-valued ``key=value`` overrides, parsing each per field type."""
        return self.replace(**{k: _parse_value(k, v) for k, v in overrides.items()})

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, WeightMode):
                value = value.value
            lines.append(f"{f.name} = {value}")
        return "\n".join(lines) + "\n"


_FIELD_TYPES = {f.name: f.type for f in fields(ScenarioConfig)}


def _parse_value(key: str, raw: str):
    if key not in _FIELD_TYPES:
        raise ConfigError(f"unknown config key: {key!r}")
    kind = _FIELD_TYPES[key]
    raw = raw.strip()
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            lowered = raw.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind == "WeightMode":
            return WeightMode(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc
    return raw


def parse_config_text(text: str, base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Parse ``key = value`` lines; blank lines and ``#`` comments are skipped."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key, raw = line.split("=", 1)
        values[key.strip()] = raw
    return (base or ScenarioConfig()).with_overrides(values)


PRESETS = {"tableI": ScenarioConfig()}


def load_config(path: str | Path) -> ScenarioConfig:
    """Load a config file, or a named preset such as ``tableI``."""
    if str(path) in PRESETS and not Path(path).exists():
        return PRESETS[str(path)]
    return parse_config_text(Path(path).read_text())
