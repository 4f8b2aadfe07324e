"""The Monte Carlo calibration harness.

One pass over n replicates: each replicate's p-value vector is combined by
every requested test and compared against every alpha with the closed
rejection rule (combined p <= alpha).  Replicates are partitioned into
fixed-size chunks, each owning an independent stream; per-chunk rejection
counts are reduced by exact integer addition, so results do not depend on
chunk scheduling or worker count.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence

import numpy as np

from ..combiners import TestSpec, combined_pvalue
from ..errors import ConfigurationError
from ..rng import CHUNK_SIZE, chunk_ranges
from ..samplers import ModelSpec, MultivariateT, sample_chunk
from .records import CalibrationRecord


def _chunk_counts(args) -> np.ndarray:
    model, tests, alphas, master_seed, chunk_index, take = args
    batch = sample_chunk(model, master_seed, chunk_index)
    p = batch.p[:take]
    alphas_arr = np.asarray(alphas)
    counts = np.zeros((len(tests), len(alphas_arr)), dtype=np.int64)
    for i, test in enumerate(tests):
        combined = combined_pvalue(test, p)
        counts[i] = np.sum(combined[:, None] <= alphas_arr[None, :], axis=0)
    return counts


def run_calibration(
    model: ModelSpec,
    tests: Sequence[TestSpec],
    alphas: Sequence[float],
    n: int,
    seed: int,
    workers: int = 1,
) -> List[CalibrationRecord]:
    """Count rejections for every (test, alpha) over n null replicates."""
    if not getattr(model, "emits_pvalues", False):
        raise ConfigurationError(
            f"{type(model).__name__} has no exact margins and emits no p-values; "
            "use run_tail_scale for it"
        )
    alphas = [float(a) for a in alphas]
    if not alphas or any(not 0.0 < a <= 0.5 for a in alphas):
        raise ConfigurationError("alphas must lie in (0, 0.5]")
    if n < 1:
        raise ConfigurationError("n must be >= 1")
    if n * min(alphas) < 50:
        warnings.warn(
            f"n*min(alpha) = {n * min(alphas):g} < 50; ratio estimates will be noisy",
            stacklevel=2,
        )
    tests = list(tests)
    for test in tests:
        dim = test.combiner.dim
        if dim is not None and dim != model.d:
            raise ConfigurationError(
                f"test {test.name} expects dimension {dim}, model emits {model.d}"
            )

    jobs = [
        (model, tests, alphas, seed, c, stop - start)
        for c, start, stop in chunk_ranges(n)
    ]
    if workers <= 1:
        results = [_chunk_counts(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_chunk_counts, jobs, chunksize=1))
    counts = np.sum(np.stack(results, axis=0), axis=0)

    nu = getattr(model, "nu", None)
    sigma_kind = getattr(model, "sigma_kind", None)
    rho = getattr(model, "rho", None)
    records = []
    for i, test in enumerate(tests):
        for j, alpha in enumerate(alphas):
            rejections = int(counts[i, j])
            alpha_hat = rejections / n
            records.append(
                CalibrationRecord(
                    test=test.name,
                    model=model.fingerprint(),
                    nu=float(nu) if nu is not None else None,
                    d=model.d,
                    sigma_kind=sigma_kind,
                    rho=float(rho) if rho is not None else None,
                    alpha=alpha,
                    n_sims=n,
                    rejections=rejections,
                    alpha_hat_ratio=alpha_hat / alpha,
                    se_ratio=float(np.sqrt(alpha_hat * (1.0 - alpha_hat) / n) / alpha),
                    seed=seed,
                )
            )
    return records
