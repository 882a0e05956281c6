from .action import (
    ActionPair,
    finite_transform_columns,
    finite_transform_eval,
    generator_vector,
    lie_derivative_columns,
    lie_derivative_eval,
    lie_derivative_matrix,
)
from .inner_product import SampledInnerProduct, build_inner_product, inner_product_convergence
from .lie_tensor import (
    LieOperatorTensor,
    assemble_lie_tensor,
    certified_sample_count,
    default_sample_count,
)
