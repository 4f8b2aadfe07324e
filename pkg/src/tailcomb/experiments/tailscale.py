"""Tail-scale validation: direct MC estimates of t * P[h(X) > t].

For a 1-homogeneous h and an MRV model with tail index 1, the estimate
should stabilize (over thresholds) at the closed-form constant
c_mu * E[h(Theta)^beta] from the model's angular measure; the comparison is
the empirical check of the homogeneous-function limit.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from ..angular import factor_model_measure
from ..combiners import CombinerSpec, evaluate
from ..errors import ConfigurationError
from ..rng import chunk_ranges
from ..samplers import BreimanDiscrete, LinearFactor, ModelSpec, sample_chunk


@dataclass(frozen=True)
class TailScaleEstimate:
    threshold: float
    count: int
    n: int
    estimate: float  # t * count / n
    se: float        # t * sqrt(phat (1 - phat) / n)


def closed_form_tail_constant(model: ModelSpec, combiner: CombinerSpec) -> float:
    """c_mu * E[h(Theta)^beta] for models with discrete angular measure.

    BreimanDiscrete on the simplex has c_mu = 1; for LinearFactor the
    constant collapses (by homogeneity) to sum_j h(a_j)^beta over columns.
    """
    if isinstance(model, BreimanDiscrete):
        m = model.measure
        h = evaluate(combiner, m.atoms)
        return float(m.weights @ np.power(h, m.beta))
    if isinstance(model, LinearFactor):
        h = evaluate(combiner, model.A.T)
        return float(np.sum(np.power(h, model.beta)))
    raise ConfigurationError(f"no closed-form tail constant for {type(model).__name__}")


def _chunk_exceedances(args) -> np.ndarray:
    model, combiner, thresholds, master_seed, chunk_index, take = args
    batch = sample_chunk(model, master_seed, chunk_index)
    h = evaluate(combiner, batch.x[:take])
    return np.array([np.sum(h > t) for t in thresholds], dtype=np.int64)


def run_tail_scale(
    model: ModelSpec,
    combiner: CombinerSpec,
    thresholds: Sequence[float],
    n: int,
    seed: int,
    workers: int = 1,
) -> List[TailScaleEstimate]:
    """Estimate t * P[h(X) > t] at each threshold with binomial SEs."""
    if not getattr(model, "emits_raw", False):
        raise ConfigurationError(f"{type(model).__name__} emits no raw vectors")
    thresholds = [float(t) for t in thresholds]
    if not thresholds or any(t < 10.0 for t in thresholds):
        raise ConfigurationError("thresholds must be >= 10")
    dim = combiner.dim
    if dim is not None and dim != model.d:
        raise ConfigurationError("combiner dimension does not match the model")

    jobs = [
        (model, combiner, thresholds, seed, c, stop - start)
        for c, start, stop in chunk_ranges(n)
    ]
    if workers <= 1:
        results = [_chunk_exceedances(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_chunk_exceedances, jobs, chunksize=1))
    counts = np.sum(np.stack(results, axis=0), axis=0)

    out = []
    for t, c in zip(thresholds, counts):
        phat = c / n
        out.append(
            TailScaleEstimate(
                threshold=t,
                count=int(c),
                n=n,
                estimate=t * phat,
                se=float(t * np.sqrt(phat * (1.0 - phat) / n)),
            )
        )
    return out
