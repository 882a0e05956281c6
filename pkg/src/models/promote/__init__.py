from .admm import ADMMResult, NuclearNormADMM
from .penalties import (
    discrete_penalty,
    layer_discrete_penalty,
    layer_nuclear_penalty,
    nuclear_norm,
    nuclear_penalty,
    singular_value_threshold,
)
from .problems import (
    RECOVERY_TOLERANCE,
    FitResult,
    PromoteProblem,
    SolverOptions,
    fit_l1,
    fit_regularized,
    recover_interpolating,
    recovery_success,
    regression_objective,
    select_gamma,
    training_mse,
)
