"""tailcomb: heavy-tailed p-value combination tests under tail dependence.

Combines dependent p-values on Pareto, Cauchy, or Frechet scale (PCT, CCT,
Tippett, power-mean, FCT), computes each test's exact asymptotic
calibration ratio for any discrete angular dependence measure, and
validates the closed forms against large seeded Monte Carlo experiments.
"""

from .angular import (
    Calibration,
    DiscreteAngularMeasure,
    MarginConstraint,
    asymptotic_ratio,
    axes_measure,
    breiman_ratio_mc,
    cct_support_condition,
    classify,
    comonotone_measure,
    factor_model_measure,
    load_measure,
    margin_moments,
    random_signed_measure,
    random_standardized_measure,
    save_measure,
    standardize_weights,
    t_copula_lambda,
)
from .combiners import (
    CombinerKind,
    CombinerSpec,
    MaxLinearCoefficients,
    TestSpec,
    cct,
    combined_pvalue,
    evaluate,
    fct,
    fct_statistic,
    homogeneity_check,
    linear,
    max_linear,
    pct,
    power_mean,
    power_mean_test,
    tippett,
    tippett_test,
)
from .errors import (
    ConfigurationError,
    DomainError,
    InfeasibleMeasureError,
    NumericalError,
    TailcombError,
)
from .rng import CHUNK_SIZE, RngStream
from .samplers import (
    BreimanDiscrete,
    GaussianCopula,
    LinearFactor,
    MaxLinearFrechet,
    MultivariateT,
    S1SDiscrete,
    SampleBatch,
    load_model,
    model_from_json,
    sample_chunk,
    sigma_build,
)
from .transforms import (
    TailScale,
    cauchy_survival,
    cauchy_transform,
    clamp_pvalues,
    frechet_survival,
    frechet_transform,
    pareto_survival,
    pareto_transform,
    sidak_screen,
    student_t_cdf,
    student_t_survival,
    tail_scale_inverse_survival,
)

__version__ = "0.1.0"
