#!/usr/bin/env python3
"""Regenerate the frozen golden CSVs under data/golden/.

These are the acceptance configurations for the calibration trend and the
power study; the acceptance suite re-runs them and asserts byte equality,
and the figure generator renders them.  Fixed seeds, so reruns must be
byte-identical.
"""

import pathlib
import time

import numpy as np

from tailcomb.combiners import cct, pct
from tailcomb.experiments import emit_csv, run_calibration, run_power
from tailcomb.samplers import MultivariateT, sigma_build

GOLDEN = pathlib.Path(__file__).resolve().parent.parent / "data" / "golden"


def calibration_trend():
    sigma = sigma_build("ar", rho=0.5, d=10)
    w = [0.1] * 10
    records = []
    for nu in (1.0, 25.0):
        model = MultivariateT(nu=nu, sigma=sigma, sigma_kind="ar", rho=0.5)
        records.extend(
            run_calibration(model, [pct(w), cct(w)], [1e-3], 1_000_000, seed=600 + int(nu))
        )
    emit_csv(records, GOLDEN / "calibration_mvt_ar05.csv")


def power_study():
    records = run_power(
        10.0,
        sigma_build("ar", rho=0.5, d=10),
        "bottom",
        list(np.linspace(0.0, 40.0, 21)),
        0.05,
        100_000,
        seed=1000,
        sigma_kind="ar",
        rho=0.5,
    )
    emit_csv(records, GOLDEN / "power_bottom_nu10.csv")


if __name__ == "__main__":
    GOLDEN.mkdir(parents=True, exist_ok=True)
    for job in (calibration_trend, power_study):
        t0 = time.time()
        job()
        print(f"{job.__name__}: {time.time() - t0:.1f}s")
