import numpy as np
import pytest

from splitprecode.channel import ChannelMatrix, gen_rayleigh, gen_mmwave, ula_steering
from splitprecode.config import SystemConfig, MmWaveParams
from splitprecode.errors import ConfigError


def test_channel_matrix_validation():
    with pytest.raises(ConfigError):
        ChannelMatrix(np.zeros(4))
    with pytest.raises(ConfigError):
        ChannelMatrix(np.array([[np.nan, 0.0]]))


def test_rayleigh_shape_and_determinism():
    cfg = SystemConfig(M=16, K=4, N=4)
    H1 = gen_rayleigh(cfg, 123)
    H2 = gen_rayleigh(cfg, 123)
    H3 = gen_rayleigh(cfg, 124)
    assert H1.entries.shape == (4, 16)
    np.testing.assert_array_equal(H1.entries, H2.entries)
    assert not np.array_equal(H1.entries, H3.entries)


def test_rayleigh_zero_fading():
    cfg = SystemConfig(M=4, K=2, N=2, gamma=0.0)
    assert np.all(gen_rayleigh(cfg, 0).entries == 0)


def test_rayleigh_second_moment():
    # sample second moment of CN(0, gamma) entries over 1e5 draws
    cfg = SystemConfig(M=10, K=10, N=10)
    acc = [np.mean(np.abs(gen_rayleigh(cfg, s).entries) ** 2) for s in range(1000)]
    assert np.mean(acc) == pytest.approx(1.0, rel=0.02)


def test_rayleigh_frobenius_energy():
    cfg = SystemConfig(M=32, K=8, N=8, gamma=2.0)
    e = [np.linalg.norm(gen_rayleigh(cfg, s).entries, "fro") ** 2 for s in range(2000)]
    assert np.mean(e) == pytest.approx(cfg.gamma * 32 * 8, rel=0.02)


def test_ula_steering_unit_modulus():
    a = ula_steering(16, 0.3)
    assert np.allclose(np.abs(a), 1.0)
    assert a[0] == 1.0


def test_mmwave_subcarriers_and_energy():
    cfg = SystemConfig(M=16, K=4, N=4, gamma=1.5)
    params = MmWaveParams()
    chans = gen_mmwave(cfg, params, 7)
    assert len(chans) == params.num_subcarriers
    assert [H.subcarrier_index for H in chans] == list(range(64))
    # Parseval: the per-UE tap power is normalized to exactly gamma*M, so the
    # mean subcarrier energy is deterministic, not just statistically close.
    mean_energy = np.mean([np.linalg.norm(H.entries, "fro") ** 2 for H in chans])
    assert mean_energy == pytest.approx(cfg.gamma * 16 * 4, rel=1e-10)


def test_mmwave_single_tap_frequency_flat():
    cfg = SystemConfig(M=8, K=2, N=2)
    chans = gen_mmwave(cfg, MmWaveParams(num_taps=1), 3)
    for H in chans[1:]:
        np.testing.assert_allclose(H.entries, chans[0].entries, atol=1e-12)


def test_mmwave_pure_los_rows_are_steering_vectors():
    cfg = SystemConfig(M=8, K=2, N=2, gamma=1.0)
    chans = gen_mmwave(cfg, MmWaveParams(num_taps=1, rician_factor_db=300.0), 5)
    H = chans[0].entries
    # unit-modulus rows scaled to norm sqrt(gamma*M)
    assert np.allclose(np.abs(H), np.abs(H[0, 0]), atol=1e-8)
    assert np.allclose(np.linalg.norm(H, axis=1), np.sqrt(8.0), atol=1e-8)


def test_mmwave_determinism():
    cfg = SystemConfig(M=8, K=2, N=2)
    a = gen_mmwave(cfg, MmWaveParams(), 11)
    b = gen_mmwave(cfg, MmWaveParams(), 11)
    for Ha, Hb in zip(a, b):
        np.testing.assert_array_equal(Ha.entries, Hb.entries)
