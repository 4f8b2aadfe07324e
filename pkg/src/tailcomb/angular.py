"""Discrete angular measures and closed-form asymptotic calibration ratios.

An angular measure here is a finite collection of atoms on the unit L1
sphere (the simplex when unsigned) with probability weights and a tail
index beta.  For a 1-homogeneous statistic h, the asymptotic calibration
ratio of the h-test against the marginal anchor is

    ratio = E[h(Theta)^beta] / E[(Theta_1)_+^beta],

valid whenever the positive-part margins E[(Theta_i)_+^beta] agree across
coordinates (the standardization every sampler and test generator here
enforces).  ratio = 1 means asymptotically calibrated, < 1 strictly honest
(conservative), > 1 liberal.

The L1 norm is fixed globally, so unsigned measures live on the simplex and
the equal-margin constraint for beta = 1 forces the common margin 1/d.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from .combiners import CombinerKind, CombinerSpec, evaluate
from .errors import ConfigurationError, DomainError, InfeasibleMeasureError
from .transforms import student_t_cdf

ATOM_NORM_TOL = 1e-12
MARGIN_RTOL = 1e-9
NNLS_RESIDUAL_TOL = 1e-9

MEASURE_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class MarginConstraint:
    """Common value the positive-part margins must share, with tolerance."""

    target: float
    tolerance: float = MARGIN_RTOL

    def __post_init__(self):
        if not self.target > 0:
            raise DomainError("margin target must be positive")


@dataclass(frozen=True)
class DiscreteAngularMeasure:
    """Atoms on the unit L1 sphere with probability weights and tail index."""

    beta: float
    atoms: np.ndarray
    weights: np.ndarray
    signed: bool = False

    def __post_init__(self):
        atoms = np.array(self.atoms, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if atoms.ndim != 2 or atoms.shape[0] == 0 or atoms.shape[1] == 0:
            raise DomainError("atoms must form a nonempty K x d array")
        if weights.shape != (atoms.shape[0],):
            raise DomainError("one weight per atom required")
        if not self.beta > 0:
            raise DomainError("beta must be positive")
        norms = np.abs(atoms).sum(axis=1)
        if np.any(np.abs(norms - 1.0) > ATOM_NORM_TOL):
            raise DomainError("every atom must have unit L1 norm")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise DomainError("weights must be nonnegative and finite")
        if abs(weights.sum() - 1.0) > ATOM_NORM_TOL:
            raise DomainError(f"weights must sum to 1 (got {weights.sum()!r})")
        if not self.signed and np.any(atoms < 0):
            raise DomainError("unsigned measure has atoms outside the simplex")
        atoms.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]

    @property
    def n_atoms(self) -> int:
        return self.atoms.shape[0]

    def to_json(self) -> dict:
        return {
            "version": MEASURE_SCHEMA_VERSION,
            "beta": self.beta,
            "signed": self.signed,
            "atoms": self.atoms.tolist(),
            "weights": self.weights.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DiscreteAngularMeasure":
        if obj.get("version") != MEASURE_SCHEMA_VERSION:
            raise ConfigurationError(f"unsupported measure schema version {obj.get('version')!r}")
        try:
            return cls(
                beta=float(obj["beta"]),
                atoms=obj["atoms"],
                weights=obj["weights"],
                signed=bool(obj.get("signed", False)),
            )
        except KeyError as exc:
            raise ConfigurationError(f"measure file missing field {exc}") from None


def save_measure(measure: DiscreteAngularMeasure, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(measure.to_json(), fh, indent=2)
        fh.write("\n")


def load_measure(path) -> DiscreteAngularMeasure:
    with open(path, encoding="utf-8") as fh:
        return DiscreteAngularMeasure.from_json(json.load(fh))


def margin_moments(measure: DiscreteAngularMeasure) -> np.ndarray:
    """Positive-part margins E[(Theta_i)_+^beta], one per coordinate."""
    pos = np.clip(measure.atoms, 0.0, None)
    return measure.weights @ np.power(pos, measure.beta)


def margin_imbalance(measure: DiscreteAngularMeasure) -> float:
    """Relative spread of the margins; 0 means exactly standardized."""
    m = margin_moments(measure)
    mean = m.mean()
    if mean <= 0.0:
        return np.inf
    return float((m.max() - m.min()) / mean)


def asymptotic_ratio(
    combiner: CombinerSpec,
    measure: DiscreteAngularMeasure,
    margin_rtol: float = MARGIN_RTOL,
) -> float:
    """E[h(Theta)^beta] / E[(Theta_1)_+^beta] for a standardized measure."""
    m = margin_moments(measure)
    mean = m.mean()
    if mean <= 0.0:
        raise DomainError("degenerate measure: positive-part margins vanish")
    if (m.max() - m.min()) / mean > margin_rtol:
        raise DomainError(
            "measure is not standardized: margins "
            f"{m.tolist()} differ beyond relative tolerance {margin_rtol}"
        )
    h = evaluate(combiner, measure.atoms)
    numerator = float(measure.weights @ np.power(h, measure.beta))
    return numerator / float(m[0])


class Calibration(enum.Enum):
    CALIBRATED = "calibrated"
    STRICTLY_HONEST = "strictly_honest"
    LIBERAL = "liberal"


def classify(
    combiner: CombinerSpec,
    measure: DiscreteAngularMeasure,
    tol: float = 1e-9,
) -> Calibration:
    """Bucket the asymptotic ratio against 1 with tolerance tol."""
    ratio = asymptotic_ratio(combiner, measure)
    if abs(ratio - 1.0) <= tol:
        return Calibration.CALIBRATED
    return Calibration.STRICTLY_HONEST if ratio < 1.0 else Calibration.LIBERAL


def cct_support_condition(measure: DiscreteAngularMeasure) -> bool:
    """True iff every positively weighted atom lies in R_+^d or in R_-^d."""
    active = measure.weights > 0.0
    atoms = measure.atoms[active]
    nonneg = np.all(atoms >= 0.0, axis=1)
    nonpos = np.all(atoms <= 0.0, axis=1)
    return bool(np.all(nonneg | nonpos))


def factor_model_measure(A, beta: float) -> DiscreteAngularMeasure:
    """Angular measure of linear/max-linear factor models X = A Z.

    Atoms are the L1-normalized columns of A, weighted by their L1 norms to
    the beta; the same measure serves both the sum and max compositions
    (single large jump heuristic).
    """
    arr = np.asarray(A, dtype=float)
    if arr.ndim != 2 or arr.size == 0:
        raise DomainError("A must be a nonempty matrix")
    if np.any(arr < 0):
        raise DomainError("factor loadings must be nonnegative")
    norms = arr.sum(axis=0)
    if np.any(norms <= 0.0):
        raise DomainError("every column of A must be nonzero")
    weights = norms**beta
    return DiscreteAngularMeasure(
        beta=beta,
        atoms=(arr / norms).T,
        weights=weights / weights.sum(),
        signed=False,
    )


def breiman_ratio_mc(
    w_sampler: Callable[[np.random.Generator, int], np.ndarray],
    combiner: CombinerSpec,
    beta: float,
    n: int,
    seed: int,
) -> Tuple[float, float]:
    """Monte Carlo estimate of the calibration ratio via the Breiman identity.

    Draws W from the sampler and returns
    mean(h(W)^beta) / mean((W_1)_+^beta) with a jackknife standard error;
    by 1-homogeneity this equals the reweighted angular expectation without
    normalizing W explicitly.
    """
    if n < 1000:
        raise ConfigurationError("n >= 1e3 required for a stable estimate")
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, 0], dtype=np.uint64)))
    w = np.asarray(w_sampler(rng, n), dtype=float)
    if w.ndim != 2 or w.shape[0] != n:
        raise ConfigurationError("sampler must return an (n, d) array")
    if not np.any(np.abs(w) > 0.0):
        raise DomainError("degenerate sampler: all draws are zero")
    h = np.power(evaluate(combiner, w), beta)
    m = np.power(np.clip(w[:, 0], 0.0, None), beta)
    sum_h, sum_m = h.sum(), m.sum()
    if sum_m <= 0.0:
        raise DomainError("degenerate sampler: first margin vanishes")
    estimate = sum_h / sum_m
    loo = (sum_h - h) / (sum_m - m)
    se = float(np.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2)))
    return float(estimate), se


def measure_atom_sampler(measure: DiscreteAngularMeasure) -> Callable[[np.random.Generator, int], np.ndarray]:
    """Sampler drawing the measure's atoms with its weights (for MC cross-checks)."""

    def sampler(rng: np.random.Generator, n: int) -> np.ndarray:
        idx = rng.choice(measure.n_atoms, size=n, p=measure.weights)
        return measure.atoms[idx]

    return sampler


def t_copula_lambda(nu: float, rho: float) -> float:
    """Upper tail-dependence coefficient of the t-copula.

    lambda = 2 * T_{nu+1}( -sqrt((nu+1)(1-rho)/(1+rho)) ).
    """
    if not nu > 0:
        raise DomainError("nu must be positive")
    if not -1.0 < rho < 1.0:
        raise DomainError("rho must lie in (-1, 1)")
    x = -np.sqrt((nu + 1.0) * (1.0 - rho) / (1.0 + rho))
    return 2.0 * student_t_cdf(x, nu + 1.0)


# ---------------------------------------------------------------------------
# standardization (feasibility) layer


@dataclass(frozen=True)
class StandardizationResult:
    """Outcome of standardize_weights: the measure plus solver diagnostics."""

    measure: DiscreteAngularMeasure
    augmented: bool
    residual: float
    margin: float


def _nnls_equal_margins(phi: np.ndarray) -> Tuple[np.ndarray, float]:
    """Solve for p >= 0 with phi @ p having equal entries and sum(p) = 1.

    phi is (d, K) holding (atom_k positive part)^beta per coordinate.  The
    equal-margin constraint is encoded as differences against coordinate 0,
    the total mass as a ones row.  After Lawson-Hanson NNLS, re-solving the
    unconstrained least squares on the positive support polishes the
    residual down to machine level when the system is consistent.
    """
    d, k = phi.shape
    a = np.vstack([phi[1:] - phi[0], np.ones((1, k))])
    b = np.zeros(d)
    b[-1] = 1.0
    p, _ = optimize.nnls(a, b)
    support = np.flatnonzero(p > 1e-12)
    if support.size:
        q, *_ = np.linalg.lstsq(a[:, support], b, rcond=None)
        if np.all(q >= 0.0):
            polished = np.zeros(k)
            polished[support] = q
            if np.linalg.norm(a @ polished - b) <= np.linalg.norm(a @ p - b):
                p = polished
    residual = float(np.linalg.norm(a @ p - b))
    return p, residual


def standardize_weights(
    atoms,
    beta: float = 1.0,
    residual_tol: float = NNLS_RESIDUAL_TOL,
) -> StandardizationResult:
    """Find nonnegative atom weights making the measure standardized.

    Solves sum_k p_k (theta_{k,i})_+^beta = c for a common c with
    sum_k p_k = 1 by nonnegative least squares.  If infeasible, the d unit
    vectors are appended (always feasible for atoms on the simplex) and the
    result is flagged augmented.  Raises InfeasibleMeasureError when even
    the augmented system misses the residual tolerance (possible only for
    signed atom sets).
    """
    arr = np.asarray(atoms, dtype=float)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise DomainError("atoms must form a nonempty K x d array")
    norms = np.abs(arr).sum(axis=1)
    if np.any(np.abs(norms - 1.0) > ATOM_NORM_TOL):
        raise DomainError("atoms must lie on the unit L1 sphere")
    signed = bool(np.any(arr < 0))
    d = arr.shape[1]

    phi = np.power(np.clip(arr, 0.0, None), beta).T  # (d, K)
    p, residual = _nnls_equal_margins(phi)
    augmented = False
    full_atoms = arr

    if residual > residual_tol:
        augmented = True
        full_atoms = np.vstack([arr, np.eye(d)])
        phi_aug = np.hstack([phi, np.eye(d)])
        p, residual = _nnls_equal_margins(phi_aug)
        if residual > residual_tol:
            raise InfeasibleMeasureError(
                f"no standardized weighting found (residual {residual:.3e})",
                residual=residual,
                augmented=True,
            )

    measure = DiscreteAngularMeasure(beta=beta, atoms=full_atoms, weights=p, signed=signed)
    margins = margin_moments(measure)
    return StandardizationResult(
        measure=measure,
        augmented=augmented,
        residual=residual,
        margin=float(margins.mean()),
    )


# ---------------------------------------------------------------------------
# random standardized measures (test and falsifier workhorses)


def random_standardized_measure(
    d: int,
    n_atoms: int,
    rng: np.random.Generator,
    beta: float = 1.0,
    vertex_shrink: float = 0.7,
) -> DiscreteAngularMeasure:
    """Random unsigned measure with exactly equal margins.

    Draws Dirichlet atoms (shrunk toward the barycenter so they stay
    genuinely dependent), then tops up with the d unit vectors whose weights
    are solved in closed form so all margins agree to machine precision.
    """
    if d < 1 or n_atoms < 1:
        raise DomainError("d and n_atoms must be >= 1")
    atoms = rng.dirichlet(np.ones(d), size=n_atoms)
    center = np.full(d, 1.0 / d)
    atoms = vertex_shrink * atoms + (1.0 - vertex_shrink) * center

    q = rng.dirichlet(np.ones(n_atoms))
    phi = np.power(atoms, beta)  # (K, d)
    u = q @ phi
    u_sum = float(u.sum())
    u_max = float(u.max())
    # scale s of the random part: margins c - s*u_i must stay nonnegative
    s = min(0.6, 0.95 / (1.0 - u_sum + d * u_max))
    c = (1.0 - s + s * u_sum) / d
    axis_weights = c - s * u
    weights = np.concatenate([s * q, axis_weights])
    weights = weights / weights.sum()
    full_atoms = np.vstack([atoms, np.eye(d)])
    return DiscreteAngularMeasure(beta=beta, atoms=full_atoms, weights=weights, signed=False)


def random_signed_measure(
    d: int,
    n_atoms: int,
    rng: np.random.Generator,
    beta: float = 1.0,
    orthant: bool = False,
) -> DiscreteAngularMeasure:
    """Random symmetric signed measure with equal positive-part margins.

    Starts from a random standardized unsigned measure, applies a sign
    pattern per atom (a common sign per atom when orthant=True, so the
    support stays inside R_+^d union R_-^d), then takes the symmetric hull.
    """
    base = random_standardized_measure(d, n_atoms, rng, beta=beta)
    if orthant:
        signs = np.ones_like(base.atoms)
    else:
        signs = rng.choice([-1.0, 1.0], size=base.atoms.shape)
    atoms = signs * base.atoms
    sym_atoms = np.vstack([atoms, -atoms])
    sym_weights = np.concatenate([base.weights, base.weights]) / 2.0
    return DiscreteAngularMeasure(beta=beta, atoms=sym_atoms, weights=sym_weights, signed=True)


def axes_measure(d: int, beta: float = 1.0) -> DiscreteAngularMeasure:
    """The asymptotic-independence measure: unit vectors with equal weights."""
    return DiscreteAngularMeasure(
        beta=beta, atoms=np.eye(d), weights=np.full(d, 1.0 / d), signed=False
    )


def comonotone_measure(d: int, beta: float = 1.0) -> DiscreteAngularMeasure:
    """Full dependence: a single atom at the barycenter of the simplex."""
    return DiscreteAngularMeasure(
        beta=beta, atoms=np.full((1, d), 1.0 / d), weights=np.ones(1), signed=False
    )
