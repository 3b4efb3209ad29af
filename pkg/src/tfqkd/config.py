"""Protocol configuration and the flat ``key = value`` config file format."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, fields


class ConfigError(ValueError):
    """Malformed or invalid configuration; ``lineno`` is set when known."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


def misalignment_angle(fraction):
    """Angle whose ``sin^2`` equals the given misalignment fraction."""
    return math.asin(math.sqrt(fraction))


@dataclass(frozen=True)
class ProtocolConfig:
    """All protocol, device and security parameters of one run.

    Intensities are mean photon numbers per pulse, angles are radians and
    ``P_d`` is the dark-count probability per detector per pulse.
    """

    N: float = 1e12
    P_Z: float = 0.75
    mu_Z: float = 0.01
    mu_0: float = 0.4
    mu_1: float = 1e-5
    P_mu0: float = 0.15
    alpha: float = misalignment_angle(0.02)
    beta: float = misalignment_angle(0.02)
    P_d: float = 1e-7
    f_EC: float = 1.16
    delta_mu: float = 0.0
    eps_sec: float = 1e-10
    eps_cor: float = 1e-12

    def __post_init__(self):
        self.validate()

    def validate(self):
        if not self.N >= 1:
            raise ConfigError(f"N must be >= 1, got {self.N}")
        if not 0 < self.P_Z < 1:
            raise ConfigError(f"P_Z must lie in (0, 1), got {self.P_Z}")
        if not (self.mu_Z > 0 and self.mu_0 > 0 and self.mu_1 > 0):
            raise ConfigError("intensities mu_Z, mu_0, mu_1 must be positive")
        if not self.mu_1 < self.mu_0:
            raise ConfigError(f"need mu_1 < mu_0, got mu_1={self.mu_1}, mu_0={self.mu_0}")
        if not 0 < self.P_mu0 < 1:
            raise ConfigError(f"P_mu0 must lie in (0, 1), got {self.P_mu0}")
        if not 0 <= self.P_d <= 1:
            raise ConfigError(f"P_d must lie in [0, 1], got {self.P_d}")
        if not self.f_EC >= 1:
            raise ConfigError(f"f_EC must be >= 1, got {self.f_EC}")
        if not 0 <= self.delta_mu < 1:
            raise ConfigError(f"delta_mu must lie in [0, 1), got {self.delta_mu}")
        for name in ("eps_sec", "eps_cor"):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise ConfigError(f"{name} must lie in (0, 1), got {value}")

    @property
    def P_X(self):
        return 1.0 - self.P_Z

    @property
    def P_mu1(self):
        return 1.0 - self.P_mu0

    @property
    def N_Z(self):
        return self.N * self.P_Z ** 2

    @property
    def N_X(self):
        return self.N * self.P_X ** 2

    def decoy_prob(self, index):
        """Selection probability of decoy intensity ``index`` (0 or 1)."""
        return self.P_mu0 if index == 0 else self.P_mu1

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


FIELD_NAMES = tuple(f.name for f in fields(ProtocolConfig))


def _coerce(key, raw, lineno=None):
    if key not in FIELD_NAMES:
        raise ConfigError(f"unknown key {key!r}", lineno)
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"value for {key!r} is not a number: {raw!r}", lineno) from None


def parse_config_text(text, base=None):
    """Parse ``key = value`` lines (``#`` starts a comment) into a config."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        key, raw = (part.strip() for part in line.split("=", 1))
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        values[key] = _coerce(key, raw, lineno)
    base = base or ProtocolConfig()
    return base.replace(**values)


def load_config(path, overrides=()):
    """Read a config file and apply ``key=value`` override strings on top."""
    if path is None:
        config = ProtocolConfig()
    else:
        with open(path, encoding="utf-8") as fh:
            config = parse_config_text(fh.read())
    return apply_overrides(config, overrides)


def apply_overrides(config, overrides):
    values = {}
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must be key=value, got {item!r}")
        key, raw = (part.strip() for part in item.split("=", 1))
        values[key] = _coerce(key, raw)
    return config.replace(**values) if values else config


def dump_config(config):
    return "".join(f"{name} = {getattr(config, name)!r}\n" for name in FIELD_NAMES)
