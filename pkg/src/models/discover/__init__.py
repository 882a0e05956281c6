from .functions import (
    ConservedQuantities,
    conserved_quantities,
    function_symmetries,
    layer_operator,
    layer_symmetries,
    shared_symmetries,
    vectorfield_symmetries,
)
from .manifold import (
    PointCloud,
    default_neighbor_count,
    estimate_tangent_frames,
    graph_frames,
    graph_symmetries,
    pointcloud_symmetries,
    symmetry_operator,
)
from .report import SymmetryReport, nullspace_report
