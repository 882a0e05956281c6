from .basis import (
    DEFAULT_TAU,
    EquivariantBasis,
    KernelBasis,
    LayerBasis,
    equivariant_function_basis,
    equivariant_kernel_basis,
    equivariant_layer_basis,
    kernel_evaluation_table,
    verify_equivariance,
)
