"""System configuration and flat key-value config files."""

import hashlib
import json
import math
from dataclasses import dataclass, field, asdict

from .errors import ConfigError


@dataclass(frozen=True)
class SystemConfig:
    """Dimensions, power budget and noise level of the downlink system.

    The normalized convention is q = 1, gamma = 1, so an SNR point in dB maps
    to sigma0_sq = q * gamma * 10^(-SNR/10).
    """

    M: int = 32
    K: int = 8
    N: int = 8
    q: float = 1.0
    gamma: float = 1.0
    sigma0_sq: float = 0.01
    snr_db_list: tuple = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0)
    b_split: int = 4
    b_one_stage: int = 1

    def __post_init__(self):
        if not (1 <= self.K <= self.N <= self.M):
            raise ConfigError(
                f"dimensions must satisfy 1 <= K <= N <= M, got K={self.K}, N={self.N}, M={self.M}"
            )
        if self.q <= 0 or self.gamma < 0 or self.sigma0_sq <= 0:
            raise ConfigError("q and sigma0_sq must be positive, gamma non-negative")
        if self.b_split < 1 or self.b_one_stage < 1:
            raise ConfigError("bit budgets must be positive integers")

    def sigma0_sq_for_snr_db(self, snr_db):
        """Noise variance that realizes SNR = q*gamma/sigma0^2 at the given point."""
        return self.q * self.gamma * 10.0 ** (-snr_db / 10.0)

    def snr_db(self):
        return 10.0 * math.log10(self.q * self.gamma / self.sigma0_sq)

    def fronthaul_ratio_consistent(self):
        """Remark-1 check: equal budgets require M/N = B_split/B_one_stage."""
        return self.M * self.b_one_stage == self.N * self.b_split


@dataclass(frozen=True)
class MmWaveParams:
    """Multi-tap Rician mmWave OFDM channel parameters."""

    num_taps: int = 4
    rician_factor_db: float = 10.0
    num_subcarriers: int = 64
    antenna_spacing: float = 0.5
    aod_range: tuple = (-math.pi / 2, math.pi / 2)

    def __post_init__(self):
        if self.num_taps < 1:
            raise ConfigError("num_taps must be >= 1")
        if self.num_subcarriers < self.num_taps:
            raise ConfigError("num_subcarriers must be >= num_taps")
        if self.rician_factor_lin <= 0:
            raise ConfigError("Rician factor must be positive")

    @property
    def rician_factor_lin(self):
        return 10.0 ** (self.rician_factor_db / 10.0)


_SYSTEM_KEYS = {
    "M": int,
    "K": int,
    "N": int,
    "q": float,
    "gamma": float,
    "sigma0_sq": float,
    "snr_db_list": "float_list",
    "b_split": int,
    "b_one_stage": int,
}

_MMWAVE_KEYS = {
    "num_taps": int,
    "rician_factor_db": float,
    "num_subcarriers": int,
    "antenna_spacing": float,
    "aod_range": "float_list",
}

# Keys consumed by the CLI rather than the dataclasses.
_RUN_KEYS = {
    "aas_method": str,
    "channel_model": str,
    "trials": int,
    "seed": int,
    "dim_for_mu": str,
}

_VALID_KEYS = {**_SYSTEM_KEYS, **_MMWAVE_KEYS, **_RUN_KEYS}


def parse_config_text(text):
    """Parse `key = value` lines into a raw dict; '#' starts a comment."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _VALID_KEYS:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        caster = _VALID_KEYS[key]
        try:
            if caster == "float_list":
                raw[key] = tuple(float(v) for v in value.replace(",", " ").split())
            else:
                raw[key] = caster(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: cannot parse value for {key!r}: {exc}")
    return raw


def load_config(path):
    with open(path) as fh:
        return parse_config_text(fh.read())


def system_config_from(raw):
    kwargs = {k: raw[k] for k in _SYSTEM_KEYS if k in raw}
    return SystemConfig(**kwargs)


def mmwave_params_from(raw):
    kwargs = {k: raw[k] for k in _MMWAVE_KEYS if k in raw}
    if "aod_range" in kwargs:
        kwargs["aod_range"] = tuple(kwargs["aod_range"])
    return MmWaveParams(**kwargs)


def config_hash(*objects):
    """Stable short hash over dataclasses / dicts, for tagging result rows."""
    blobs = []
    for obj in objects:
        if hasattr(obj, "__dataclass_fields__"):
            obj = asdict(obj)
        blobs.append(json.dumps(obj, sort_keys=True, default=str))
    return hashlib.sha256("|".join(blobs).encode()).hexdigest()[:16]
