"""Fisher-information based power allocation for vector parameter estimation.

Typical use::

    from fimalloc import SystemModel, build_fim_bundle, allocate
    model = SystemModel.linear(F, variances)
    report = allocate(build_fim_bundle(model), "avg_mse", budget=1.0)
"""
from .allocators import (
    CRITERIA,
    AllocationReport,
    Criterion,
    PowerAllocation,
    allocate,
    allocate_avg_fi,
    allocate_avg_mse,
    allocate_nonlinear,
    allocate_shannon,
    allocate_worst_coord_fi,
    allocate_worst_coord_var,
    allocate_worst_eigen,
    allocate_worst_eigen_bound,
    objective,
)
from .errors import (
    DegenerateProblemError,
    DomainError,
    FimAllocError,
    IntegrationError,
    ModelFileError,
    ObjectiveEvaluationError,
    RankError,
    SingularMatrixError,
)
from .model import (
    CustomFimNoise,
    DensityComponent,
    FimBundle,
    GaussianNoise,
    IndependentDensityNoise,
    LinearChannel,
    NonlinearChannel,
    SystemModel,
    build_fim_bundle,
    effective_channel,
    noise_fim,
)
from .optimizer import MultistartOptions, multistart_maximize, sample_simplex

__version__ = "0.1.0"
