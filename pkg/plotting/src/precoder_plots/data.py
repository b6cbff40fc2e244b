"""CSV ingestion for sweep results.

The expected schema is the sweep CSV header of the precoding package:
scheme,channel,snr_db,trials,avg_sum_rate,std_err,seed,config_hash.
Rendering is a pure function of the parsed rows.
"""

import csv

REQUIRED_COLUMNS = ("scheme", "channel", "snr_db", "avg_sum_rate", "std_err")


class SchemaError(ValueError):
    """The CSV does not look like a sweep result file."""


def read_results(paths):
    """Parse and merge one or more sweep CSVs into a list of row dicts.

    Numeric columns are converted to float; rows from all files are
    concatenated. Raises SchemaError on missing columns, unparseable
    numbers, or when no data rows remain after merging.
    """
    rows = []
    for path in paths:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [c for c in REQUIRED_COLUMNS if c not in header]
            if missing:
                raise SchemaError(
                    f"{path}: missing required columns {', '.join(missing)}"
                )
            for lineno, raw in enumerate(reader, start=2):
                try:
                    rows.append({
                        "scheme": raw["scheme"],
                        "channel": raw["channel"],
                        "snr_db": float(raw["snr_db"]),
                        "avg_sum_rate": float(raw["avg_sum_rate"]),
                        "std_err": float(raw["std_err"]),
                    })
                except (TypeError, ValueError) as exc:
                    raise SchemaError(f"{path}:{lineno}: bad numeric value ({exc})")
    if not rows:
        raise SchemaError("no data rows in " + ", ".join(paths))
    return rows


def build_series(rows):
    """Group rows into {channel: {scheme: (snr, rate, std_err)}} sorted by SNR.

    The triple holds three aligned lists. Values are passed through untouched
    so a dump of the series equals the CSV contents exactly.
    """
    series = {}
    for row in rows:
        points = series.setdefault(row["channel"], {}).setdefault(row["scheme"], [])
        points.append((row["snr_db"], row["avg_sum_rate"], row["std_err"]))
    out = {}
    for channel, by_scheme in sorted(series.items()):
        out[channel] = {}
        for scheme, points in sorted(by_scheme.items()):
            points.sort(key=lambda p: p[0])
            snr, rate, err = zip(*points)
            out[channel][scheme] = {
                "snr_db": list(snr),
                "avg_sum_rate": list(rate),
                "std_err": list(err),
            }
    return out
