"""Universality falsifier: empirical search for de-calibrating measures.

Searches standardized measures on the simplex for the one driving the
asymptotic calibration ratio of a combiner furthest from 1.  A linear
combiner should resist every candidate (deviation at solver-noise level);
any genuinely non-linear combiner in d >= 2 has a witness measure.  The
search is derivative-free: uniform Dirichlet atom proposals plus
coordinate-wise perturbation of the incumbent with a step that halves on
stagnation, feasibility restored by nonnegative least squares with axis
augmentation.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..angular import asymptotic_ratio, standardize_weights
from ..combiners import CombinerSpec
from ..errors import ConfigurationError, InfeasibleMeasureError
from ..rng import RngStream
from .records import FalsifierReport

_INITIAL_STEP = 0.1
_STAGNATION_WINDOW = 250


def _project_to_simplex(atoms: np.ndarray) -> np.ndarray:
    clipped = np.clip(atoms, 1e-9, None)
    return clipped / clipped.sum(axis=1, keepdims=True)


def run_falsifier(
    combiner: CombinerSpec,
    d: int,
    beta: float = 1.0,
    n_atoms: int = 8,
    budget: int = 10_000,
    seed: int = 0,
) -> FalsifierReport:
    """Return the measure maximizing |asymptotic_ratio - 1| found in budget evaluations."""
    if budget < 100:
        raise ConfigurationError("budget must be >= 100")
    if d < 1 or n_atoms < 1:
        raise ConfigurationError("d and n_atoms must be >= 1")
    if combiner.dim is not None and combiner.dim != d:
        raise ConfigurationError("combiner dimension does not match d")
    rng = RngStream(seed, 0).generator()

    best_measure = None
    best_ratio = 1.0
    best_dev = -1.0
    best_atoms: Optional[np.ndarray] = None
    step = _INITIAL_STEP
    since_improvement = 0

    for evaluation in range(budget):
        if best_atoms is None or rng.random() < 0.3:
            atoms = rng.dirichlet(np.ones(d), size=n_atoms)
        else:
            noise = rng.normal(scale=step, size=best_atoms.shape)
            atoms = _project_to_simplex(best_atoms + noise)
        try:
            result = standardize_weights(atoms, beta=beta)
            ratio = asymptotic_ratio(combiner, result.measure)
        except InfeasibleMeasureError:
            continue
        dev = abs(ratio - 1.0)
        if dev > best_dev:
            best_dev = dev
            best_ratio = ratio
            best_measure = result.measure
            best_atoms = atoms
            since_improvement = 0
        else:
            since_improvement += 1
            if since_improvement >= _STAGNATION_WINDOW:
                step = max(step / 2.0, 1e-4)
                since_improvement = 0

    if best_measure is None:  # pragma: no cover - augmentation makes candidates feasible
        raise ConfigurationError("no feasible candidate found within budget")
    return FalsifierReport(
        combiner=combiner.kind.value,
        d=d,
        beta=beta,
        best_atoms=best_measure.atoms.tolist(),
        best_weights=best_measure.weights.tolist(),
        best_ratio=float(best_ratio),
        deviation=float(best_dev),
        evaluations=budget,
    )
