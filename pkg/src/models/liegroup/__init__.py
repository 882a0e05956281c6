from .group import (
    GroupKind,
    LieAlgebraElement,
    MatrixLieGroup,
    algebra_projection,
    as_matrix,
    bracket,
    exp_map,
    group_from_descriptor,
    make_group,
    make_product,
    structure_constants,
)
from .representation import (
    Representation,
    direct_sum,
    homogeneous_rep,
    kernel_value_rep,
    particle_rep,
    representation_from_descriptor,
    standard_rep,
    trivial_rep,
)
