"""Pydantic request/response models for the analytic service surface.

Blocks are 1-based on the wire (matching the CLI file formats) and
converted to 0-based indices at the boundary.
"""

from __future__ import annotations

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

from .. import angular, combiners
from ..errors import ConfigurationError


class CombinerModel(BaseModel):
    kind: str
    weights: Optional[List[float]] = None
    gamma: Optional[float] = None
    blocks: Optional[List[List[int]]] = None
    n_factors: Optional[int] = None

    def to_spec(self) -> combiners.CombinerSpec:
        kind = self.kind.lower()
        if kind == "linear":
            if self.weights is None:
                raise ConfigurationError("linear combiner requires weights")
            return combiners.linear(self.weights)
        if kind == "tippett":
            return combiners.tippett()
        if kind == "powermean":
            if self.gamma is None or self.weights is None:
                raise ConfigurationError("powermean requires gamma and weights")
            return combiners.power_mean(self.gamma, self.weights)
        if kind == "maxlinear":
            if self.blocks is None or self.weights is None or self.n_factors is None:
                raise ConfigurationError("maxlinear requires blocks, weights, n_factors")
            blocks0 = [[i - 1 for i in block] for block in self.blocks]
            return combiners.max_linear(blocks0, self.weights, self.n_factors)
        raise ConfigurationError(f"unknown combiner kind {self.kind!r}")


class MeasureModel(BaseModel):
    version: int = 1
    beta: float
    signed: bool = False
    atoms: List[List[float]]
    weights: List[float]

    def to_measure(self) -> angular.DiscreteAngularMeasure:
        return angular.DiscreteAngularMeasure.from_json(self.model_dump())


class CombineRequest(BaseModel):
    test: str
    pvalues: List[List[float]]
    weights: Optional[List[float]] = None
    gamma: Optional[float] = None
    blocks: Optional[List[List[int]]] = None


class CombineResponse(BaseModel):
    combined: List[float]


class RatioRequest(BaseModel):
    combiner: CombinerModel
    measure: MeasureModel
    tol: float = 1e-9


class RatioResponse(BaseModel):
    ratio: float
    classification: str


class LambdaRequest(BaseModel):
    nu: float
    rho: float


class LambdaResponse(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    lambda_: float = Field(alias="lambda")


class FalsifyRequest(BaseModel):
    combiner: CombinerModel
    d: int
    beta: float = 1.0
    n_atoms: int = 8
    budget: int = 10_000
    seed: int = 0


class FalsifyResponse(BaseModel):
    combiner: str
    d: int
    beta: float
    best_atoms: List[List[float]]
    best_weights: List[float]
    best_ratio: float
    deviation: float
    evaluations: int


class HealthResponse(BaseModel):
    status: str
    version: str
