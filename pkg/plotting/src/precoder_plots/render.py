"""Figure rendering: one curve per scheme, one panel per channel model."""

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .data import build_series, read_results

# Fixed styles for the standard scheme names, for cross-run comparability.
KNOWN_STYLES = {
    "inf_rzf": {"color": "tab:blue", "marker": "o", "linestyle": "-"},
    "gs_mrt_split": {"color": "tab:red", "marker": "s", "linestyle": "-"},
    "mrt_split": {"color": "tab:green", "marker": "^", "linestyle": "--"},
    "dft_split": {"color": "tab:purple", "marker": "v", "linestyle": "--"},
    "one_stage_sesd": {"color": "tab:orange", "marker": "d", "linestyle": "-."},
    "rounded_qrzf": {"color": "tab:gray", "marker": "x", "linestyle": ":"},
}

_FALLBACK_COLORS = ("tab:brown", "tab:pink", "tab:olive", "tab:cyan", "black")
_FALLBACK_MARKERS = ("p", "*", "h", "<", ">")


@dataclass(frozen=True)
class PlotSpec:
    """What to render: inputs, per-scheme styles, labels and output format."""

    csv_paths: tuple
    styles: dict
    xlabel: str = "SNR (dB)"
    ylabel: str = "Average sum rate (bit/s/Hz)"
    fmt: str = "png"

    def __post_init__(self):
        if self.fmt not in ("png", "pdf"):
            raise ValueError(f"unsupported format {self.fmt!r}")


def style_map(schemes):
    """One fixed style per scheme; unknown names get a deterministic fallback."""
    styles = {}
    extras = [s for s in sorted(set(schemes)) if s not in KNOWN_STYLES]
    for scheme in set(schemes):
        if scheme in KNOWN_STYLES:
            styles[scheme] = KNOWN_STYLES[scheme]
        else:
            i = extras.index(scheme)
            styles[scheme] = {
                "color": _FALLBACK_COLORS[i % len(_FALLBACK_COLORS)],
                "marker": _FALLBACK_MARKERS[i % len(_FALLBACK_MARKERS)],
                "linestyle": "-",
            }
    return styles


def make_spec(csv_paths, fmt="png"):
    rows = read_results(csv_paths)
    schemes = {r["scheme"] for r in rows}
    return PlotSpec(csv_paths=tuple(csv_paths), styles=style_map(schemes), fmt=fmt)


def render(spec: PlotSpec, out_dir):
    """Render one figure with a panel per channel model; returns file paths.

    Curves carry error bars from the std_err column; a series with a single
    SNR point is drawn as markers without a connecting line.
    """
    series = build_series(read_results(spec.csv_paths))
    channels = list(series)
    fig, axes = plt.subplots(1, len(channels), squeeze=False,
                             figsize=(6.4 * len(channels), 4.8))
    for ax, channel in zip(axes[0], channels):
        for scheme, data in series[channel].items():
            style = dict(spec.styles[scheme])
            if len(data["snr_db"]) == 1:
                style["linestyle"] = "none"
            ax.errorbar(data["snr_db"], data["avg_sum_rate"],
                        yerr=data["std_err"], label=scheme, capsize=3, **style)
        ax.set_xlabel(spec.xlabel)
        ax.set_ylabel(spec.ylabel)
        ax.set_title(channel)
        ax.grid(True, alpha=0.3)
        ax.legend()
    fig.tight_layout()
    out_path = f"{out_dir}/sum_rate_vs_snr.{spec.fmt}"
    fig.savefig(out_path)
    plt.close(fig)
    return [out_path]
