"""Seeded samplers for the in-scope heavy-tailed null models.

Every model that emits p-values does so through an exact marginal law, so
under the global null each marginal p-value is uniform by construction,
not approximately.  Samplers draw whole chunks (see tailcomb.rng): the
chunk with index c uses the stream (master_seed, stream_id = c + stream
offset), and the draw order inside a chunk is fixed per model, so output
is a pure function of (model, master_seed, replicate index).

Draw order per chunk:

* MultivariateT:    normals xi (n, d), then gamma G (n,)
* GaussianCopula:   normals xi (n, d)
* BreimanDiscrete:  atom indices (n,), radial uniforms (n,), then - only
                    when some coordinate has an atom at zero - tie-breaking
                    uniforms (n, d)
* LinearFactor:     factor uniforms (n, p)
* MaxLinearFrechet: factor uniforms (n, p)
* S1SDiscrete:      standard Cauchy draws (n, K)
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy import special

from .angular import DiscreteAngularMeasure
from .errors import ConfigurationError, DomainError, NumericalError
from .rng import CHUNK_SIZE, RngStream
from .transforms import cauchy_survival, student_t_survival


def sigma_build(kind: str, rho: Optional[float] = None, d: Optional[int] = None, matrix=None) -> np.ndarray:
    """Build a unit-diagonal SPD shape matrix.

    kind "ar" gives (rho^|i-j|), "exch" unit diagonal with rho off-diagonal,
    "dense" validates a user matrix.  The exchangeable constraint
    rho in (-1/(d-1), 1) keeps the matrix positive definite.
    """
    if kind == "ar":
        if d is None or rho is None:
            raise ConfigurationError("ar sigma needs rho and d")
        if not -1.0 < rho < 1.0:
            raise DomainError("autoregressive rho must lie in (-1, 1)")
        idx = np.arange(d)
        sigma = np.power(float(rho), np.abs(idx[:, None] - idx[None, :]))
        if rho == 0.0:
            sigma = np.eye(d)
        return sigma
    if kind == "exch":
        if d is None or rho is None:
            raise ConfigurationError("exch sigma needs rho and d")
        if d > 1 and not -1.0 / (d - 1) < rho < 1.0:
            raise DomainError(f"exchangeable rho must lie in (-1/{d-1}, 1)")
        sigma = np.full((d, d), float(rho))
        np.fill_diagonal(sigma, 1.0)
        return sigma
    if kind == "dense":
        sigma = np.asarray(matrix, dtype=float)
        if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
            raise ConfigurationError("dense sigma must be square")
        if not np.allclose(sigma, sigma.T, atol=1e-12):
            raise NumericalError("sigma must be symmetric")
        if not np.allclose(np.diag(sigma), 1.0, atol=1e-12):
            raise NumericalError("sigma must have unit diagonal")
        try:
            np.linalg.cholesky(sigma)
        except np.linalg.LinAlgError:
            raise NumericalError("sigma is not positive definite") from None
        return sigma
    raise ConfigurationError(f"unknown sigma kind {kind!r}")


@dataclass(frozen=True)
class MultivariateT:
    """X = mu + W / sqrt(G/nu), W ~ N(0, Sigma), G ~ Gamma(nu/2, rate 1/2)."""

    nu: float
    sigma: np.ndarray
    mu: Optional[np.ndarray] = None
    sigma_kind: str = "dense"
    rho: Optional[float] = None

    def __post_init__(self):
        if not self.nu > 0:
            raise DomainError("nu must be positive")
        sigma = sigma_build("dense", matrix=self.sigma)
        sigma.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)
        if self.mu is not None:
            mu = np.asarray(self.mu, dtype=float)
            if mu.shape != (sigma.shape[0],):
                raise ConfigurationError("mu must match sigma's dimension")
            mu.setflags(write=False)
            object.__setattr__(self, "mu", mu)

    @property
    def d(self) -> int:
        return self.sigma.shape[0]

    emits_pvalues = True
    emits_raw = True

    def fingerprint(self) -> str:
        loc = "" if self.mu is None else ";mu"
        return f"mvt(nu={self.nu:g};d={self.d};sigma={self.sigma_kind}:{self.rho if self.rho is not None else 'NA'}{loc})"


@dataclass(frozen=True)
class GaussianCopula:
    """p_i = 1 - Phi(W_i) with W ~ N(0, Sigma); the tail-independent baseline."""

    sigma: np.ndarray
    sigma_kind: str = "dense"
    rho: Optional[float] = None

    def __post_init__(self):
        sigma = sigma_build("dense", matrix=self.sigma)
        sigma.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)

    @property
    def d(self) -> int:
        return self.sigma.shape[0]

    emits_pvalues = True
    emits_raw = True

    def fingerprint(self) -> str:
        return f"gauss(d={self.d};sigma={self.sigma_kind}:{self.rho if self.rho is not None else 'NA'})"


@dataclass(frozen=True)
class BreimanDiscrete:
    """X = Y * Theta with Y standard beta-Pareto and Theta ~ discrete measure."""

    measure: DiscreteAngularMeasure

    def __post_init__(self):
        if self.measure.signed:
            raise ConfigurationError("Breiman model requires an unsigned measure")
        dead = np.all(self.measure.atoms[self.measure.weights > 0] <= 0.0, axis=0)
        if np.any(dead):
            raise ConfigurationError(
                f"degenerate margin: coordinates {np.flatnonzero(dead).tolist()} vanish on every atom"
            )

    @property
    def beta(self) -> float:
        return self.measure.beta

    @property
    def d(self) -> int:
        return self.measure.dim

    emits_pvalues = True
    emits_raw = True

    def fingerprint(self) -> str:
        return f"breiman(beta={self.beta:g};d={self.d};K={self.measure.n_atoms})"

    def marginal_survival(self, x: np.ndarray) -> np.ndarray:
        """Exact margins: S_i(x) = sum_k w_k min(1, (theta_ki / x)^beta), x > 0."""
        atoms = self.measure.atoms  # (K, d)
        w = self.measure.weights
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = atoms[None, :, :] / x[:, None, :]  # (n, K, d)
            term = np.minimum(1.0, np.where(np.isnan(ratio), 1.0, ratio) ** self.beta)
        return np.einsum("k,nkd->nd", w, term)


@dataclass(frozen=True)
class LinearFactor:
    """X = A Z with Z iid standard beta-Pareto; raw vectors only.

    Margins have no closed form, so this model never emits p-values; it
    participates in tail-scale validation only.
    """

    A: np.ndarray
    beta: float = 1.0

    def __post_init__(self):
        a = np.asarray(self.A, dtype=float)
        if a.ndim != 2 or np.any(a < 0):
            raise ConfigurationError("A must be a nonnegative matrix")
        if np.any(a.sum(axis=0) <= 0):
            raise ConfigurationError("every column of A must be nonzero")
        if not self.beta > 0:
            raise DomainError("beta must be positive")
        a.setflags(write=False)
        object.__setattr__(self, "A", a)

    @property
    def d(self) -> int:
        return self.A.shape[0]

    emits_pvalues = False
    emits_raw = True

    def fingerprint(self) -> str:
        return f"linfactor(beta={self.beta:g};d={self.d};p={self.A.shape[1]})"


@dataclass(frozen=True)
class MaxLinearFrechet:
    """Y_i = max_j a_ij Z_j with Z iid standard 1-Frechet; exact margins."""

    A: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.A, dtype=float)
        if a.ndim != 2 or np.any(a < 0):
            raise ConfigurationError("A must be a nonnegative matrix")
        if np.any(a.sum(axis=1) <= 0):
            raise ConfigurationError("every row of A needs a positive entry")
        a.setflags(write=False)
        object.__setattr__(self, "A", a)

    @property
    def d(self) -> int:
        return self.A.shape[0]

    emits_pvalues = True
    emits_raw = True

    def fingerprint(self) -> str:
        return f"maxlinear(d={self.d};p={self.A.shape[1]})"


@dataclass(frozen=True)
class S1SDiscrete:
    """X = sum_k gamma_k s_k C_k, C_k iid standard Cauchy.

    Atoms are stored as the symmetric hull (each atom paired with its
    negation, scales halved); marginal scales are sigma_i =
    sum_k gamma_k |s_ki|.  A spec flagged standardized requires sigma_i = 1.
    """

    atoms: np.ndarray
    scales: np.ndarray
    standardized: bool = True

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float)
        scales = np.asarray(self.scales, dtype=float)
        if atoms.ndim != 2 or scales.shape != (atoms.shape[0],):
            raise ConfigurationError("need one scale per atom")
        if np.any(scales <= 0):
            raise DomainError("scales must be positive")
        norms = np.abs(atoms).sum(axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise DomainError("atoms must lie on the unit L1 sphere")
        # symmetric hull
        sym_atoms = np.vstack([atoms, -atoms])
        sym_scales = np.concatenate([scales, scales]) / 2.0
        sym_atoms.setflags(write=False)
        sym_scales.setflags(write=False)
        object.__setattr__(self, "atoms", sym_atoms)
        object.__setattr__(self, "scales", sym_scales)
        sig = self.marginal_scales()
        if self.standardized and np.any(np.abs(sig - 1.0) > 1e-9):
            raise ConfigurationError(
                f"spec flagged standardized but marginal scales are {sig.tolist()}"
            )

    def marginal_scales(self) -> np.ndarray:
        return self.scales @ np.abs(self.atoms)

    @property
    def d(self) -> int:
        return self.atoms.shape[1]

    emits_pvalues = True
    emits_raw = True

    def fingerprint(self) -> str:
        return f"s1s(d={self.d};K={self.atoms.shape[0] // 2})"

    def spectral_measure(self) -> DiscreteAngularMeasure:
        """The (normalized) spectral measure as an angular measure object."""
        total = self.scales.sum()
        return DiscreteAngularMeasure(
            beta=1.0, atoms=self.atoms, weights=self.scales / total, signed=True
        )


ModelSpec = Union[
    MultivariateT, GaussianCopula, BreimanDiscrete, LinearFactor, MaxLinearFrechet, S1SDiscrete
]


@dataclass(frozen=True)
class SampleBatch:
    """One chunk of draws: raw vectors and/or marginal p-values, (n, d)."""

    x: Optional[np.ndarray]
    p: Optional[np.ndarray]


def sample_chunk(
    model: ModelSpec,
    master_seed: int,
    chunk_index: int,
    chunk_size: int = CHUNK_SIZE,
    stream_offset: int = 0,
) -> SampleBatch:
    """Draw one chunk from the model on its own stream."""
    rng = RngStream(master_seed, stream_offset + chunk_index).generator()
    n = chunk_size

    if isinstance(model, MultivariateT):
        chol = np.linalg.cholesky(model.sigma)
        xi = rng.standard_normal((n, model.d))
        g = 2.0 * rng.standard_gamma(model.nu / 2.0, size=n)
        t = (xi @ chol.T) / np.sqrt(g / model.nu)[:, None]
        if model.mu is not None:
            t = t + model.mu
        return SampleBatch(x=t, p=student_t_survival(t, model.nu))

    if isinstance(model, GaussianCopula):
        chol = np.linalg.cholesky(model.sigma)
        w = rng.standard_normal((n, model.d)) @ chol.T
        return SampleBatch(x=w, p=special.ndtr(-w))

    if isinstance(model, BreimanDiscrete):
        measure = model.measure
        idx = rng.choice(measure.n_atoms, size=n, p=measure.weights)
        y = rng.random(n) ** (-1.0 / model.beta)
        x = y[:, None] * measure.atoms[idx]
        p = model.marginal_survival(x)
        zero_mass = measure.weights @ (measure.atoms <= 0.0)
        if np.any(zero_mass > 0.0):
            # randomized PIT at the atom of the marginal law at zero
            v = rng.random((n, model.d))
            p = np.where(x > 0.0, p, 1.0 - v * zero_mass[None, :])
        return SampleBatch(x=x, p=p)

    if isinstance(model, LinearFactor):
        z = rng.random((n, model.A.shape[1])) ** (-1.0 / model.beta)
        return SampleBatch(x=z @ model.A.T, p=None)

    if isinstance(model, MaxLinearFrechet):
        u = rng.random((n, model.A.shape[1]))
        with np.errstate(divide="ignore"):
            z = -1.0 / np.log(u)
            y = np.max(model.A[None, :, :] * z[:, None, :], axis=2)
            row_sums = model.A.sum(axis=1)
            p = -np.expm1(-row_sums[None, :] / y)
        return SampleBatch(x=y, p=p)

    if isinstance(model, S1SDiscrete):
        c = rng.standard_cauchy((n, model.atoms.shape[0]))
        x = c @ (model.scales[:, None] * model.atoms)
        p = cauchy_survival(x / model.marginal_scales()[None, :])
        return SampleBatch(x=x, p=p)

    raise ConfigurationError(f"unknown model {type(model).__name__}")


# ---------------------------------------------------------------------------
# model spec files


def model_from_json(obj: dict) -> ModelSpec:
    kind = obj.get("kind")
    if kind == "mvt":
        sigma, sk, rho = _sigma_from_json(obj)
        return MultivariateT(nu=float(obj["nu"]), sigma=sigma, sigma_kind=sk, rho=rho)
    if kind == "gauss_copula":
        sigma, sk, rho = _sigma_from_json(obj)
        return GaussianCopula(sigma=sigma, sigma_kind=sk, rho=rho)
    if kind == "breiman":
        return BreimanDiscrete(measure=DiscreteAngularMeasure.from_json(obj["measure"]))
    if kind == "linear_factor":
        return LinearFactor(A=np.asarray(obj["A"], dtype=float), beta=float(obj.get("beta", 1.0)))
    if kind == "max_linear":
        return MaxLinearFrechet(A=np.asarray(obj["A"], dtype=float))
    if kind == "s1s":
        return S1SDiscrete(
            atoms=np.asarray(obj["atoms"], dtype=float),
            scales=np.asarray(obj["scales"], dtype=float),
            standardized=bool(obj.get("standardized", True)),
        )
    raise ConfigurationError(f"unknown model kind {kind!r}")


def _sigma_from_json(obj: dict):
    spec = obj.get("sigma")
    d = obj.get("d")
    if isinstance(spec, dict):
        kind = spec.get("kind")
        rho = spec.get("rho")
        if d is None:
            raise ConfigurationError("structured sigma needs d")
        return sigma_build(kind, rho=rho, d=int(d)), kind, float(rho)
    return sigma_build("dense", matrix=spec), "dense", None


def load_model(path) -> ModelSpec:
    with open(path, encoding="utf-8") as fh:
        return model_from_json(json.load(fh))
