"""Command-line entry point: calibration, sweep presets, CSV/manifest output."""

import argparse
import datetime
import json
import sys
from dataclasses import asdict, replace

import numpy as np

from . import __version__
from .config import (SystemConfig, MmWaveParams, load_config, system_config_from,
                     mmwave_params_from, config_hash)
from .errors import ConfigError, SolverBudgetError, SplitPrecodeError
from .evaluation import (Scheme, default_schemes, calibrate_scheme, run_sweep,
                         FronthaulBudget, fronthaul_bits)
from .quantizer import QuantizerSpec

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3

FIG_SNR_GRID = tuple(range(0, 45, 5))


def _load_raw(path):
    if path is None:
        return {}
    try:
        return load_config(path)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")


def _preset_fig2a(raw):
    cfg = system_config_from({**{"M": 32, "K": 8, "N": 8, "b_split": 4,
                                 "b_one_stage": 1, "snr_db_list": FIG_SNR_GRID},
                              **raw})
    return cfg, default_schemes(cfg), "rayleigh", None, True, {}


def _preset_fig2b(raw):
    cfg = system_config_from({**{"M": 128, "K": 8, "N": 8, "b_split": 4,
                                 "b_one_stage": 1, "snr_db_list": FIG_SNR_GRID},
                              **raw})
    params = mmwave_params_from(raw)
    schemes = [s for s in default_schemes(cfg) if s.kind != "one_stage"]
    deviations = {
        "one_stage": "exact one-stage at M=128 is intractable; a desk-scale "
                     "exact variant (M=16, B=1) runs on its own channel instead"
    }
    return cfg, schemes, "mmwave", params, True, deviations


def _preset_fig3(raw):
    cfg = system_config_from({**{"M": 32, "K": 8, "N": 8, "b_split": 4,
                                 "b_one_stage": 1, "snr_db_list": FIG_SNR_GRID},
                              **raw})
    K, M = cfg.K, cfg.M
    combos = [(K, 1), (K, 4), (2 * K, 1), (2 * K, 4), (M, 1)]
    schemes = [Scheme(f"dft_split_n{n}_b{b}", "split", "dft", n, b) for n, b in combos]
    return cfg, schemes, "rayleigh", None, True, {}


def _preset_custom(raw):
    cfg = system_config_from(raw)
    channel = raw.get("channel_model", "rayleigh")
    params = mmwave_params_from(raw) if channel == "mmwave" else None
    method = raw.get("aas_method", "gs_mrt")
    schemes = [
        Scheme("inf_rzf", "inf_rzf"),
        Scheme(f"{method}_split", "split", method, cfg.N, cfg.b_split),
        Scheme("one_stage_sesd", "one_stage", bits=cfg.b_one_stage),
    ]
    return cfg, schemes, channel, params, False, {}


PRESETS = {"fig2a": _preset_fig2a, "fig2b": _preset_fig2b,
           "fig3": _preset_fig3, "custom": _preset_custom}


def cmd_calibrate(args):
    raw = _load_raw(args.config)
    cfg = system_config_from(raw)
    bits = args.bits if args.bits is not None else raw.get("b_split")
    if bits is None:
        raise ConfigError("missing config key 'b_split' (or pass --bits)")
    method = raw.get("aas_method", "gs_mrt")
    channel = raw.get("channel_model", "rayleigh")
    params = mmwave_params_from(raw) if channel == "mmwave" else None
    scheme = Scheme(f"{method}_split", "split", method, cfg.N, bits)
    spec = calibrate_scheme(cfg, scheme, args.seed, channel, params)
    with open(args.out, "w") as fh:
        json.dump(spec.to_dict(), fh, indent=2)
        fh.write("\n")
    print(f"calibrated B={bits}: delta={spec.delta:.6g}, eta={spec.eta:.6g} -> {args.out}")
    return EXIT_OK


def _budget_report(cfg):
    budget = FronthaulBudget(cfg.M, cfg.N, cfg.K, cfg.b_split, cfg.b_one_stage)
    return fronthaul_bits(budget)


def cmd_sweep(args):
    import os

    raw = _load_raw(args.config)
    cfg, schemes, channel, params, preset_allow_large, deviations = PRESETS[args.preset](raw)
    trials = args.trials if args.trials is not None else raw.get("trials", 500)
    seed = args.seed if args.seed is not None else raw.get("seed", 0)
    allow_large = args.allow_large or preset_allow_large

    os.makedirs(args.out_dir, exist_ok=True)
    started = datetime.datetime.now(datetime.timezone.utc).isoformat()

    specs = {s.name: calibrate_scheme(cfg, s, seed, channel, params)
             for s in schemes if s.kind != "inf_rzf"}
    result = run_sweep(cfg, schemes, trials, seed, channel_model=channel,
                       mmwave_params=params, specs=specs,
                       threads=args.threads, allow_large=allow_large)

    if args.preset == "fig2b":
        # Documented deviation: desk-scale exact one-stage on a reduced array.
        small_cfg = replace(cfg, M=16, N=8)
        small = [Scheme("one_stage_sesd_m16", "one_stage", bits=cfg.b_one_stage)]
        small_specs = {small[0].name: calibrate_scheme(small_cfg, small[0], seed,
                                                       channel, params)}
        small_res = run_sweep(small_cfg, small, trials, seed, channel_model=channel,
                              mmwave_params=params, specs=small_specs,
                              threads=args.threads, allow_large=allow_large)
        result.rows.extend(small_res.rows)
        specs.update(small_specs)

    csv_path = os.path.join(args.out_dir, f"{args.preset}.csv")
    result.to_csv(csv_path)
    manifest = {
        "version": __version__,
        "preset": args.preset,
        "config": asdict(cfg),
        "mmwave_params": asdict(params) if params else None,
        "channel_model": channel,
        "trials": trials,
        "seed": seed,
        "threads": args.threads,
        "allow_large": allow_large,
        "quantizers": {k: v.to_dict() for k, v in specs.items() if v},
        "fronthaul": _budget_report(cfg),
        "deviations": deviations,
        "started_utc": started,
        "finished_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "config_hash": result.rows[0]["config_hash"] if result.rows else None,
    }
    with open(os.path.join(args.out_dir, f"{args.preset}_manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    print(f"wrote {csv_path} ({len(result.rows)} rows)")
    return EXIT_OK


def cmd_plot(args):
    try:
        from precoder_plots.cli import main as plots_main
    except ImportError:
        raise ConfigError(
            "the plotting package 'precoder-plots' is not installed; "
            "install it from the plotting/ directory"
        )
    argv = list(args.csv) + ["--out", args.out_dir, "--format", args.format]
    if args.dump_data:
        argv.append("--dump-data")
    return plots_main(argv)


def build_parser():
    p = argparse.ArgumentParser(
        prog="splitprecode",
        description="Fronthaul-limited splitting precoding: calibration, "
                    "Monte-Carlo sum-rate sweeps, and figure rendering.",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("calibrate", help="freeze a quantizer step size offline")
    c.add_argument("--config", help="flat key-value config file")
    c.add_argument("--bits", type=int, help="bits per real dimension")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", required=True, help="output JSON spec file")
    c.set_defaults(func=cmd_calibrate)

    s = sub.add_parser("sweep", help="run a Monte-Carlo sum-rate SNR sweep")
    s.add_argument("--config", help="flat key-value config file")
    s.add_argument("--preset", choices=sorted(PRESETS), default="custom")
    s.add_argument("--trials", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--out-dir", default=".")
    s.add_argument("--threads", type=int, default=1)
    s.add_argument("--allow-large", action="store_true",
                   help="override the exact one-stage search-tree budget guard")
    s.set_defaults(func=cmd_sweep)

    pl = sub.add_parser("plot", help="render sum-rate figures from sweep CSVs")
    pl.add_argument("csv", nargs="+")
    pl.add_argument("--out-dir", default=".")
    pl.add_argument("--format", choices=("png", "pdf"), default="png")
    pl.add_argument("--dump-data", action="store_true")
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverBudgetError as exc:
        print(f"solver budget error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except SplitPrecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
