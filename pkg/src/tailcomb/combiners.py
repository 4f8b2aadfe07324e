"""Homogeneous combination statistics and anchor-calibrated combined p-values.

A combiner is a continuous 1-homogeneous map h: R^d -> R+.  Supported kinds:

* Linear:     h(x) = (sum_i w_i x_i)_+
* Tippett:    h(x) = max_i x_i / d
* PowerMean:  h(x) = (sum_i w_i x_i^gamma)^(1/gamma), gamma > 0
* MaxLinear:  h(z) = max_j a_w(j) z_j / c_w over factor vectors z, where
              a_w(j) = max_i w_i a_{ij} with a_{ij} = 1{j in I_i}/|I_i| and
              c_w = sum_j a_w(j).  This is the Frechet combination statistic
              Y_w/c_w, normalized so independent factors give tail ratio 1.

Combined p-values invert each test's independence anchor, so the rejection
set {combined p <= alpha} matches the threshold form of each test exactly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import ConfigurationError, DomainError
from .transforms import (
    TailScale,
    cauchy_survival,
    cauchy_transform,
    clamp_pvalues,
    frechet_transform,
    pareto_transform,
    sidak_screen,
)

WEIGHT_TOL = 1e-12


class CombinerKind(enum.Enum):
    LINEAR = "linear"
    TIPPETT = "tippett"
    POWER_MEAN = "powermean"
    MAX_LINEAR = "maxlinear"


def validate_weights(weights) -> Tuple[float, ...]:
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ConfigurationError("weights must be a nonempty vector")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ConfigurationError("weights must be nonnegative and finite")
    if abs(w.sum() - 1.0) > WEIGHT_TOL:
        raise ConfigurationError(f"weights must sum to 1 (got {w.sum()!r})")
    return tuple(float(v) for v in w)


def _validate_blocks(blocks, n_factors: int) -> Tuple[Tuple[int, ...], ...]:
    """Blocks are 0-based index sets; together they must cover all factors."""
    if n_factors < 1:
        raise ConfigurationError("n_factors must be >= 1")
    out = []
    covered = np.zeros(n_factors, dtype=bool)
    for block in blocks:
        idx = tuple(sorted(int(i) for i in block))
        if len(idx) == 0:
            raise ConfigurationError("empty block")
        if len(set(idx)) != len(idx):
            raise ConfigurationError(f"duplicate index in block {idx}")
        if idx[0] < 0 or idx[-1] >= n_factors:
            raise ConfigurationError(f"block index out of range in {idx}")
        covered[list(idx)] = True
        out.append(idx)
    if not out:
        raise ConfigurationError("at least one block required")
    if not covered.all():
        missing = np.flatnonzero(~covered) + 1
        raise ConfigurationError(f"blocks must cover every factor (missing {missing.tolist()})")
    return tuple(out)


@dataclass(frozen=True)
class MaxLinearCoefficients:
    """Derived max-linear coefficients: a (d x n), a_w(j) = max_i w_i a_ij, c_w."""

    a: np.ndarray
    a_w: np.ndarray
    c_w: float

    @classmethod
    def from_blocks(cls, blocks, weights, n_factors: int) -> "MaxLinearCoefficients":
        blocks = _validate_blocks(blocks, n_factors)
        w = np.asarray(validate_weights(weights))
        if len(w) != len(blocks):
            raise ConfigurationError("one weight per block required")
        a = np.zeros((len(blocks), n_factors))
        for i, block in enumerate(blocks):
            a[i, list(block)] = 1.0 / len(block)
        a_w = np.max(w[:, None] * a, axis=0)
        if np.any(np.max(a, axis=0) <= 0.0):
            raise ConfigurationError("every factor must appear in some block")
        a.setflags(write=False)
        a_w.setflags(write=False)
        return cls(a=a, a_w=a_w, c_w=float(a_w.sum()))


@dataclass(frozen=True)
class CombinerSpec:
    """A 1-homogeneous combination statistic.

    weights apply to coordinates (Linear, PowerMean) or blocks (MaxLinear);
    gamma is the power-mean order; blocks/n_factors define the max-linear
    block structure (0-based indices internally).
    """

    kind: CombinerKind
    weights: Optional[Tuple[float, ...]] = None
    gamma: Optional[float] = None
    blocks: Optional[Tuple[Tuple[int, ...], ...]] = None
    n_factors: Optional[int] = None

    def __post_init__(self):
        if self.kind in (CombinerKind.LINEAR, CombinerKind.POWER_MEAN):
            if self.weights is None:
                raise ConfigurationError(f"{self.kind.value} requires weights")
            object.__setattr__(self, "weights", validate_weights(self.weights))
        if self.kind is CombinerKind.POWER_MEAN:
            if self.gamma is None or not self.gamma > 0:
                raise ConfigurationError("power mean requires gamma > 0")
        if self.kind is CombinerKind.MAX_LINEAR:
            if self.blocks is None or self.weights is None or self.n_factors is None:
                raise ConfigurationError("max-linear requires blocks, weights and n_factors")
            object.__setattr__(self, "weights", validate_weights(self.weights))
            object.__setattr__(
                self, "blocks", _validate_blocks(self.blocks, self.n_factors)
            )
            # fail fast on inconsistent block/weight shapes
            self.max_linear_coefficients()

    @property
    def dim(self) -> Optional[int]:
        """Expected input dimension, or None when dimension-generic (Tippett)."""
        if self.kind is CombinerKind.MAX_LINEAR:
            return self.n_factors
        if self.weights is not None:
            return len(self.weights)
        return None

    def max_linear_coefficients(self) -> MaxLinearCoefficients:
        if self.kind is not CombinerKind.MAX_LINEAR:
            raise ConfigurationError("not a max-linear combiner")
        return MaxLinearCoefficients.from_blocks(self.blocks, self.weights, self.n_factors)


def linear(weights) -> CombinerSpec:
    return CombinerSpec(kind=CombinerKind.LINEAR, weights=tuple(weights))


def tippett() -> CombinerSpec:
    return CombinerSpec(kind=CombinerKind.TIPPETT)


def power_mean(gamma: float, weights) -> CombinerSpec:
    return CombinerSpec(kind=CombinerKind.POWER_MEAN, gamma=float(gamma), weights=tuple(weights))


def max_linear(blocks, weights, n_factors: int) -> CombinerSpec:
    return CombinerSpec(
        kind=CombinerKind.MAX_LINEAR,
        weights=tuple(weights),
        blocks=tuple(tuple(b) for b in blocks),
        n_factors=int(n_factors),
    )


def evaluate(combiner: CombinerSpec, x):
    """Evaluate h on a vector or a batch with vectors along the last axis."""
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 1
    if combiner.dim is not None and arr.shape[-1] != combiner.dim:
        raise ConfigurationError(
            f"dimension mismatch: combiner expects {combiner.dim}, got {arr.shape[-1]}"
        )
    if arr.shape[-1] == 0:
        raise ConfigurationError("empty input vector")

    if combiner.kind is CombinerKind.LINEAR:
        w = np.asarray(combiner.weights)
        out = np.maximum(arr @ w, 0.0)
    elif combiner.kind is CombinerKind.TIPPETT:
        if np.any(arr < 0):
            raise DomainError("Tippett requires nonnegative inputs")
        out = np.max(arr, axis=-1) / arr.shape[-1]
    elif combiner.kind is CombinerKind.POWER_MEAN:
        if np.any(arr < 0):
            raise DomainError("power mean requires nonnegative inputs")
        w = np.asarray(combiner.weights)
        out = (np.power(arr, combiner.gamma) @ w) ** (1.0 / combiner.gamma)
    elif combiner.kind is CombinerKind.MAX_LINEAR:
        coef = combiner.max_linear_coefficients()
        out = np.max(arr * coef.a_w, axis=-1) / coef.c_w
    else:  # pragma: no cover
        raise ConfigurationError(f"unknown combiner kind {combiner.kind!r}")
    return float(out) if scalar else out


def homogeneity_check(combiner: CombinerSpec, x, c: float) -> bool:
    """True iff |h(c*x) - c*h(x)| <= 1e-10 * (1 + |h(x)|*c)."""
    if not c > 0:
        raise DomainError("c must be positive")
    hx = evaluate(combiner, x)
    hcx = evaluate(combiner, np.asarray(x, dtype=float) * c)
    return bool(np.all(np.abs(hcx - c * np.asarray(hx)) <= 1e-10 * (1.0 + np.abs(hx) * c)))


def fct_statistic(blocks, weights, p_raw):
    """Frechet combination pipeline over raw base p-values.

    Each block's minimum p-value is Sidak-screened to uniform and sent to
    Frechet scale; Y_j is computed in the equivalent direct form
    -1/(|I_j| * log(1 - min p)).  Returns (Y_w, c_w) with
    Y_w = max_j w_j Y_j.  p_raw has base tests along the last axis.
    """
    p = clamp_pvalues(p_raw)
    n = p.shape[-1]
    coef = MaxLinearCoefficients.from_blocks(blocks, weights, n)
    w = np.asarray(validate_weights(weights))
    cols = []
    for j, block in enumerate(_validate_blocks(blocks, n)):
        m = np.min(p[..., list(block)], axis=-1)
        y = -1.0 / (len(block) * np.log1p(-m))
        cols.append(w[j] * y)
    y_w = np.max(np.stack(cols, axis=-1), axis=-1)
    if y_w.ndim == 0:
        return float(y_w), coef.c_w
    return y_w, coef.c_w


@dataclass(frozen=True)
class TestSpec:
    """A named (tail scale, combiner) pairing accepted by combined_pvalue."""

    __test__ = False  # not a pytest class

    name: str
    scale: TailScale
    combiner: CombinerSpec


def pct(weights) -> TestSpec:
    return TestSpec("pct", TailScale.PARETO1, linear(weights))


def cct(weights) -> TestSpec:
    return TestSpec("cct", TailScale.CAUCHY, linear(weights))


def tippett_test() -> TestSpec:
    return TestSpec("tippett", TailScale.FRECHET1, tippett())


def power_mean_test(gamma: float, weights) -> TestSpec:
    return TestSpec("powermean", TailScale.PARETO1, power_mean(gamma, weights))


def fct(blocks, weights, n_factors: int) -> TestSpec:
    return TestSpec("fct", TailScale.FRECHET1, max_linear(blocks, weights, n_factors))


_SUPPORTED = {
    (TailScale.PARETO1, CombinerKind.LINEAR),
    (TailScale.CAUCHY, CombinerKind.LINEAR),
    (TailScale.FRECHET1, CombinerKind.TIPPETT),
    (TailScale.FRECHET1, CombinerKind.MAX_LINEAR),
    (TailScale.PARETO1, CombinerKind.POWER_MEAN),
}


def combined_pvalue(test: TestSpec, p):
    """Combined p-value for one of the five supported tests.

    p holds marginal p-values along the last axis; a matrix yields one
    combined p-value per row.  Anchors:

    * pct:       min(1, 1/T), T = sum w_i / p_i
    * cct:       standard Cauchy survival of T = sum w_i tan(pi(1/2 - p_i))
    * tippett:   exact Sidak form 1 - (1 - min p)^d
    * fct:       1 - exp(-c_w / Y_w)
    * powermean: min(1, 1/T) with the Pareto anchor; only asymptotically
      calibrated under asymptotic independence when gamma = beta
    """
    key = (test.scale, test.combiner.kind)
    if key not in _SUPPORTED:
        raise ConfigurationError(
            f"unsupported pairing ({test.scale.value}, {test.combiner.kind.value})"
        )
    arr = clamp_pvalues(p)
    scalar = arr.ndim == 1
    if test.combiner.dim is not None and arr.shape[-1] != test.combiner.dim:
        raise ConfigurationError(
            f"p-value dimension {arr.shape[-1]} does not match the test ({test.combiner.dim})"
        )

    if key == (TailScale.PARETO1, CombinerKind.LINEAR):
        t = (1.0 / arr) @ np.asarray(test.combiner.weights)
        out = np.minimum(1.0, 1.0 / t)
    elif key == (TailScale.CAUCHY, CombinerKind.LINEAR):
        t = cauchy_transform(arr) @ np.asarray(test.combiner.weights)
        out = cauchy_survival(t)
    elif key == (TailScale.FRECHET1, CombinerKind.TIPPETT):
        out = sidak_screen(np.min(arr, axis=-1), arr.shape[-1])
    elif key == (TailScale.PARETO1, CombinerKind.POWER_MEAN):
        x = 1.0 / arr
        w = np.asarray(test.combiner.weights)
        t = (np.power(x, test.combiner.gamma) @ w) ** (1.0 / test.combiner.gamma)
        out = np.minimum(1.0, 1.0 / t)
    else:  # FCT
        y_w, c_w = fct_statistic(test.combiner.blocks, test.combiner.weights, arr)
        out = -np.expm1(-c_w / np.asarray(y_w, dtype=float))

    out = np.asarray(out, dtype=float)
    return float(out) if scalar else out
