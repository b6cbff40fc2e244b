"""Downlink channel generation: i.i.d. Rayleigh and multi-tap Rician mmWave OFDM."""

import numpy as np
from dataclasses import dataclass

from .config import SystemConfig, MmWaveParams
from .errors import ConfigError


@dataclass(frozen=True)
class ChannelMatrix:
    """K x M downlink channel; row k is the channel of UE k."""

    entries: np.ndarray
    subcarrier_index: int = None

    def __post_init__(self):
        if self.entries.ndim != 2:
            raise ConfigError("channel entries must be a 2-D matrix")
        if not np.all(np.isfinite(self.entries)):
            raise ConfigError("channel entries must be finite")

    @property
    def K(self):
        return self.entries.shape[0]

    @property
    def M(self):
        return self.entries.shape[1]


def gen_rayleigh(config: SystemConfig, seed) -> ChannelMatrix:
    """i.i.d. CN(0, gamma) entries, deterministic given the seed."""
    rng = np.random.default_rng(seed)
    shape = (config.K, config.M)
    h = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    return ChannelMatrix(np.sqrt(config.gamma) * h)


def ula_steering(M, angle, spacing=0.5):
    """Steering vector of a half-wavelength (default) ULA at the given angle."""
    m = np.arange(M)
    return np.exp(-2j * np.pi * spacing * m * np.sin(angle))


def gen_mmwave(config: SystemConfig, params: MmWaveParams, seed):
    """Multi-tap Rician channel with DFT subcarrier responses.

    Per UE: `num_taps` tap vectors of length M with equal average power.
    Tap 0 carries a line-of-sight ULA component with the configured Rician
    factor; the remaining taps are diffuse. The realized per-UE tap power is
    normalized to exactly gamma * M. Returns one ChannelMatrix per subcarrier.
    """
    rng = np.random.default_rng(seed)
    M, K = config.M, config.K
    T, F = params.num_taps, params.num_subcarriers
    kappa = params.rician_factor_lin
    tap_power = config.gamma * M / T

    taps = np.zeros((T, K, M), dtype=complex)
    lo, hi = params.aod_range
    angles = rng.uniform(lo, hi, size=K)
    diffuse = (rng.standard_normal((T, K, M)) + 1j * rng.standard_normal((T, K, M))) / np.sqrt(2.0)
    for k in range(K):
        los = ula_steering(M, angles[k], params.antenna_spacing)
        taps[0, k] = np.sqrt(kappa / (kappa + 1) * tap_power / M) * los \
            + np.sqrt(tap_power / (M * (kappa + 1))) * diffuse[0, k]
        for t in range(1, T):
            taps[t, k] = np.sqrt(tap_power / M) * diffuse[t, k]

    # Deterministic normalization: realized per-UE tap power is exactly gamma*M.
    if config.gamma > 0:
        for k in range(K):
            total = np.sum(np.abs(taps[:, k, :]) ** 2)
            taps[:, k, :] *= np.sqrt(config.gamma * M / total)
    else:
        taps[:] = 0.0

    phases = np.exp(-2j * np.pi * np.outer(np.arange(F), np.arange(T)) / F)
    out = []
    for f in range(F):
        Hf = np.tensordot(phases[f], taps, axes=(0, 0))
        out.append(ChannelMatrix(Hf, subcarrier_index=f))
    return out
