"""Sum-rate / sum-MSE metrics, fronthaul accounting, and Monte-Carlo SNR sweeps."""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .aas import AAS_METHODS, effective_channel, EffectiveChannel
from .bbu import bbu_precode, one_stage_precode, qrzf, receiver_gains, ReceiverGains
from .channel import ChannelMatrix, gen_rayleigh, gen_mmwave
from .config import SystemConfig, MmWaveParams, config_hash
from .errors import ConfigError
from .quantizer import QuantizerSpec, calibrate_step, distortion_factor, quantize_complex

CSV_HEADER = "scheme,channel,snr_db,trials,avg_sum_rate,std_err,seed,config_hash"

CALIBRATION_SNR_DB = 20.0
CALIBRATION_DRAWS = 1000


def power_scale(P, q):
    """Scale the precoder so its Frobenius-norm power equals q exactly."""
    nrm2 = np.linalg.norm(P, "fro") ** 2
    if nrm2 == 0:
        raise ConfigError("cannot power-scale a zero precoder")
    return P * np.sqrt(q / nrm2)


def sum_rate(H: ChannelMatrix, P, sigma0_sq):
    """Sum over UEs of log2(1 + SINR_k) for the composite precoder."""
    if sigma0_sq <= 0:
        raise ConfigError("sum rate requires a positive noise variance")
    G = np.abs(H.entries @ P) ** 2  # K x K received powers
    sig = np.diag(G)
    interf = G.sum(axis=1) - sig
    return float(np.sum(np.log2(1.0 + sig / (interf + sigma0_sq))))


def sum_mse(H_eff: EffectiveChannel, P, gains: ReceiverGains, sigma0_sq):
    """Analytic sum MSE for fixed receiver gains."""
    K = H_eff.K
    B = gains.as_diag()
    T = B @ H_eff.matrix @ P
    mse = np.trace(np.eye(K) - T - T.conj().T + T @ T.conj().T).real
    return float(mse + sigma0_sq * np.sum(np.abs(gains.beta) ** 2))


@dataclass(frozen=True)
class FronthaulBudget:
    """Per-coherence-interval precoder bit loads of the two architectures."""

    M: int
    N: int
    K: int
    b_split: int
    b_one_stage: int

    @property
    def split_bits(self):
        return 2 * self.b_split * self.N * self.K

    @property
    def one_stage_bits(self):
        return 2 * self.b_one_stage * self.M * self.K

    @property
    def ratio_identity_holds(self):
        return self.M * self.b_one_stage == self.N * self.b_split


def fronthaul_bits(budget: FronthaulBudget, assert_equal_budget=False):
    """Report both loads; optionally verify the equal-budget ratio identity."""
    if min(budget.M, budget.N, budget.K, budget.b_split, budget.b_one_stage) < 1:
        raise ConfigError("fronthaul budget requires positive dimensions")
    if assert_equal_budget and not budget.ratio_identity_holds:
        raise ConfigError(
            f"equal fronthaul budgets require M/N = B_split/B_one, got "
            f"{budget.M}/{budget.N} vs {budget.b_split}/{budget.b_one_stage}"
        )
    return {
        "split_bits": budget.split_bits,
        "one_stage_bits": budget.one_stage_bits,
        "ratio_identity_holds": budget.ratio_identity_holds,
    }


@dataclass(frozen=True)
class Scheme:
    """One precoding pipeline evaluated by the sweep.

    kind: 'inf_rzf' (continuous RZF on the full channel), 'split' (AAS
    subspace + quantized BBU refinement), 'one_stage' (quantized full-channel
    precoding), or 'rounded_qrzf' (entrywise-quantized QRZF on the effective
    channel, the rounding baseline).
    """

    name: str
    kind: str
    aas_method: str = None
    N: int = None
    bits: int = None

    def __post_init__(self):
        if self.kind not in ("inf_rzf", "split", "one_stage", "rounded_qrzf"):
            raise ConfigError(f"unknown scheme kind {self.kind!r}")
        if self.kind in ("split", "rounded_qrzf") and (
            self.aas_method not in AAS_METHODS or self.N is None or self.bits is None
        ):
            raise ConfigError(f"scheme {self.name!r} needs aas_method, N and bits")
        if self.kind == "one_stage" and self.bits is None:
            raise ConfigError(f"scheme {self.name!r} needs bits")


def default_schemes(config: SystemConfig):
    """The five schemes of the baseline Rayleigh comparison."""
    return [
        Scheme("inf_rzf", "inf_rzf"),
        Scheme("gs_mrt_split", "split", "gs_mrt", config.N, config.b_split),
        Scheme("mrt_split", "split", "mrt", config.N, config.b_split),
        Scheme("dft_split", "split", "dft", config.N, config.b_split),
        Scheme("one_stage_sesd", "one_stage", bits=config.b_one_stage),
    ]


def _effective_for(scheme: Scheme, H: ChannelMatrix):
    A = AAS_METHODS[scheme.aas_method](H, scheme.N)
    return A, effective_channel(H, A)


def calibrate_scheme(config: SystemConfig, scheme: Scheme, seed,
                     channel_model="rayleigh", mmwave_params=None,
                     n_draws=CALIBRATION_DRAWS):
    """Freeze the scheme's quantizer step from QRZF realizations at 20 dB SNR."""
    if scheme.kind == "inf_rzf":
        return None
    sigma0_sq = config.sigma0_sq_for_snr_db(CALIBRATION_SNR_DB)
    eta = distortion_factor(scheme.bits)
    samples = []
    count = 0
    draw = 0
    while count < n_draws:
        child = np.random.SeedSequence([int(seed), 0xCA1, draw])
        if channel_model == "rayleigh":
            channels = [gen_rayleigh(config, child)]
        elif channel_model == "mmwave":
            channels = gen_mmwave(config, mmwave_params or MmWaveParams(), child)
        else:
            raise ConfigError(f"unknown channel model {channel_model!r}")
        for H in channels:
            if count >= n_draws:
                break
            if scheme.kind == "one_stage":
                He, dim = H.entries, config.M
            else:
                _, Heff = _effective_for(scheme, H)
                He, dim = Heff.matrix, scheme.N
            P = qrzf(He, config.q, sigma0_sq, eta, dim).matrix
            samples.append(P.real.ravel())
            samples.append(P.imag.ravel())
            count += 1
        draw += 1
    return calibrate_step(np.concatenate(samples), scheme.bits)


def _scheme_precoder(scheme: Scheme, H: ChannelMatrix, config: SystemConfig,
                     sigma0_sq, specs, allow_large=False):
    """Composite M x K precoder for one channel realization, power-scaled to q."""
    q = config.q
    if scheme.kind == "inf_rzf":
        P = qrzf(H.entries, q, sigma0_sq, 0.0, config.M).matrix
    elif scheme.kind == "one_stage":
        P = one_stage_precode(H, specs[scheme.name], q, sigma0_sq,
                              allow_large=allow_large, best_effort=True).matrix
    elif scheme.kind == "split":
        A, Heff = _effective_for(scheme, H)
        Pb = bbu_precode(Heff, specs[scheme.name], q, sigma0_sq, best_effort=True)
        P = A.matrix @ Pb.matrix
    elif scheme.kind == "rounded_qrzf":
        A, Heff = _effective_for(scheme, H)
        spec = specs[scheme.name]
        cont = qrzf(Heff.matrix, q, sigma0_sq, spec.eta, scheme.N).matrix
        P = A.matrix @ quantize_complex(cont, spec)
    else:  # pragma: no cover
        raise ConfigError(scheme.kind)
    return power_scale(P, q)


def _run_trial(args):
    (config, schemes, specs, snr_idx, snr_db, trial, seed,
     channel_model, mmwave_params, allow_large) = args
    sigma0_sq = config.sigma0_sq_for_snr_db(snr_db)
    child = np.random.SeedSequence([int(seed), snr_idx, trial])
    if channel_model == "rayleigh":
        channels = [gen_rayleigh(config, child)]
    elif channel_model == "mmwave":
        channels = gen_mmwave(config, mmwave_params or MmWaveParams(), child)
    else:
        raise ConfigError(f"unknown channel model {channel_model!r}")
    rates = {}
    for scheme in schemes:
        per_sc = [
            sum_rate(H, _scheme_precoder(scheme, H, config, sigma0_sq, specs,
                                         allow_large), sigma0_sq)
            for H in channels
        ]
        rates[scheme.name] = math.fsum(per_sc) / len(per_sc)
    return rates


@dataclass
class SweepResult:
    rows: list = field(default_factory=list)
    samples: dict = field(default_factory=dict)  # (scheme, snr_db) -> per-trial rates

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write(CSV_HEADER + "\n")
            for r in self.rows:
                fh.write(
                    f"{r['scheme']},{r['channel']},{r['snr_db']:g},{r['trials']},"
                    f"{r['avg_sum_rate']:.10g},{r['std_err']:.6g},{r['seed']},"
                    f"{r['config_hash']}\n"
                )

    def rate(self, scheme, snr_db):
        for r in self.rows:
            if r["scheme"] == scheme and r["snr_db"] == snr_db:
                return r["avg_sum_rate"]
        raise KeyError((scheme, snr_db))

    def std_err(self, scheme, snr_db):
        for r in self.rows:
            if r["scheme"] == scheme and r["snr_db"] == snr_db:
                return r["std_err"]
        raise KeyError((scheme, snr_db))


def run_sweep(config: SystemConfig, schemes, trials, seed,
              channel_model="rayleigh", mmwave_params=None, specs=None,
              snr_db_list=None, threads=1, allow_large=False,
              calibration_seed=None) -> SweepResult:
    """Monte-Carlo average sum rate per (scheme, SNR); deterministic given seed.

    All schemes share the channel realizations of a trial (common random
    numbers). Quantizer specs are calibrated once per scheme when not given.
    """
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    snrs = list(config.snr_db_list if snr_db_list is None else snr_db_list)
    if specs is None:
        specs = {}
        cal_seed = seed if calibration_seed is None else calibration_seed
        for scheme in schemes:
            if scheme.kind != "inf_rzf":
                specs[scheme.name] = calibrate_scheme(
                    config, scheme, cal_seed, channel_model, mmwave_params)

    chash = config_hash(config, {k: v.to_dict() for k, v in sorted(specs.items()) if v},
                        {"schemes": [s.name for s in schemes],
                         "channel": channel_model})
    result = SweepResult()
    for snr_idx, snr_db in enumerate(snrs):
        tasks = [
            (config, schemes, specs, snr_idx, snr_db, t, seed,
             channel_model, mmwave_params, allow_large)
            for t in range(trials)
        ]
        if threads > 1:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                per_trial = list(pool.map(_run_trial, tasks, chunksize=1))
        else:
            per_trial = [_run_trial(t) for t in tasks]
        for scheme in schemes:
            vals = np.array([r[scheme.name] for r in per_trial])
            avg = math.fsum(vals) / trials
            se = float(vals.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
            result.rows.append({
                "scheme": scheme.name, "channel": channel_model,
                "snr_db": float(snr_db), "trials": trials,
                "avg_sum_rate": avg, "std_err": se,
                "seed": seed, "config_hash": chash,
            })
            result.samples[(scheme.name, float(snr_db))] = vals
    return result
