"""Monte Carlo experiment harness: calibration, tail scale, power, falsifier."""

from .calibration import run_calibration
from .falsifier import run_falsifier
from .power import BASELINE_NAME, eigendirection, run_power
from .records import (
    CALIBRATION_HEADER,
    POWER_HEADER,
    CalibrationRecord,
    FalsifierReport,
    PowerRecord,
    emit_csv,
    parse_csv,
    save_report,
)
from .tailscale import TailScaleEstimate, closed_form_tail_constant, run_tail_scale

# Reconstruction-choice presets for the paper-style grids (the source
# figures state them only implicitly).
PRESET_NU_GRID = (1.0, 2.0, 3.0, 5.0, 10.0, 25.0)
PRESET_ALPHA_GRID = (1e-2, 1e-3, 1e-4, 1e-5)
PRESET_D = 10

__all__ = [
    "run_calibration",
    "run_falsifier",
    "run_power",
    "run_tail_scale",
    "eigendirection",
    "closed_form_tail_constant",
    "BASELINE_NAME",
    "CalibrationRecord",
    "PowerRecord",
    "FalsifierReport",
    "TailScaleEstimate",
    "emit_csv",
    "parse_csv",
    "save_report",
    "CALIBRATION_HEADER",
    "POWER_HEADER",
    "PRESET_NU_GRID",
    "PRESET_ALPHA_GRID",
    "PRESET_D",
]
