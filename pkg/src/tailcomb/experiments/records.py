"""Result records and their CSV surface.

CSV files carry exact headers, floats at 17 significant digits (enough to
round-trip IEEE doubles), rows sorted by (test, nu, alpha) for calibration
and (test, effect_size) for power, a trailing newline, UTF-8.  Missing
values are the literal NA.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence

from ..errors import ConfigurationError

CALIBRATION_HEADER = (
    "test,model,nu,d,sigma_kind,rho,alpha,n_sims,rejections,alpha_hat_ratio,se_ratio,seed"
)
POWER_HEADER = (
    "test,effect_size,mu_direction,nu,d,alpha,n_sims,rejections,power,"
    "power_ratio_vs_baseline,seed"
)


@dataclass(frozen=True)
class CalibrationRecord:
    test: str
    model: str
    nu: Optional[float]
    d: int
    sigma_kind: Optional[str]
    rho: Optional[float]
    alpha: float
    n_sims: int
    rejections: int
    alpha_hat_ratio: float
    se_ratio: float
    seed: int


@dataclass(frozen=True)
class PowerRecord:
    test: str
    effect_size: float
    mu_direction: str
    nu: float
    d: int
    alpha: float
    n_sims: int
    rejections: int
    power: float
    power_ratio_vs_baseline: Optional[float]
    seed: int


@dataclass(frozen=True)
class FalsifierReport:
    combiner: str
    d: int
    beta: float
    best_atoms: List[List[float]]
    best_weights: List[float]
    best_ratio: float
    deviation: float
    evaluations: int

    def to_json(self) -> dict:
        return asdict(self)


def _fmt(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.17g}"
    text = str(value)
    # the format is unquoted; a stray separator would corrupt every parser
    if "," in text or "\n" in text:
        raise ConfigurationError(f"CSV cell may not contain commas/newlines: {text!r}")
    return text


def _sort_key_calibration(r: CalibrationRecord):
    return (r.test, r.nu if r.nu is not None else float("-inf"), r.alpha)


def _sort_key_power(r: PowerRecord):
    return (r.test, r.effect_size, r.alpha)


def emit_csv(records: Sequence, path, kind: Optional[str] = None) -> None:
    """Write records to CSV with the exact schema header.

    kind selects the schema ("calibration" or "power") when records is
    empty; otherwise it is inferred and checked.
    """
    if records:
        inferred = "calibration" if isinstance(records[0], CalibrationRecord) else "power"
        if kind is not None and kind != inferred:
            raise ConfigurationError(f"records are {inferred}, not {kind}")
        kind = inferred
        if not all(isinstance(r, type(records[0])) for r in records):
            raise ConfigurationError("mixed record types in one CSV")
    elif kind is None:
        kind = "calibration"

    if kind == "calibration":
        header = CALIBRATION_HEADER
        rows = sorted(records, key=_sort_key_calibration)
    elif kind == "power":
        header = POWER_HEADER
        rows = sorted(records, key=_sort_key_power)
    else:
        raise ConfigurationError(f"unknown CSV kind {kind!r}")

    fields = header.split(",")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for record in rows:
            values = asdict(record)
            fh.write(",".join(_fmt(values[f]) for f in fields) + "\n")


def _parse(value: str):
    if value == "NA":
        return None
    try:
        as_int = int(value)
        return as_int
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        return value


def parse_csv(path):
    """Read an emitted CSV back into records (schema detected by header)."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ConfigurationError("empty CSV file")
    header = lines[0]
    if header == CALIBRATION_HEADER:
        cls = CalibrationRecord
    elif header == POWER_HEADER:
        cls = PowerRecord
    else:
        raise ConfigurationError(f"unrecognized CSV header {header!r}")
    fields = header.split(",")
    records = []
    for line in lines[1:]:
        if not line:
            continue
        values = [_parse(v) for v in line.split(",")]
        kwargs = dict(zip(fields, values))
        # columns that must stay float even when integral
        for key in ("alpha", "alpha_hat_ratio", "se_ratio", "nu", "rho", "effect_size",
                    "power", "power_ratio_vs_baseline"):
            if key in kwargs and kwargs[key] is not None:
                kwargs[key] = float(kwargs[key])
        records.append(cls(**kwargs))
    return records


def save_report(report: FalsifierReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_json(), fh, indent=2)
        fh.write("\n")
