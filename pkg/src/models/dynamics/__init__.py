from .simulate import (
    TrajectoryData,
    as_field,
    error_curve,
    integrated_relative_error,
    linear_field,
    model_field,
    rk4_step,
    simulate,
    stack_pairs,
)
from .spring_mass import (
    SpringMassSystem,
    assemble_state_matrix,
    general_initial_conditions,
    make_spring_mass,
    momentum_slice,
    planar_initial_conditions,
    position_slice,
)
