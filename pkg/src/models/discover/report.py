from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ..linalg import svd_nullspace
from ..liegroup.group import LieAlgebraElement, MatrixLieGroup


@dataclass(frozen=True, eq=False)
class SymmetryReport:
    """Spectrum and nullspace of a linear map xi -> (something that vanishes on symmetries)."""
    group: MatrixLieGroup
    singular_values: np.ndarray       # nonincreasing, padded to dim G
    tau: float
    threshold: float
    basis: np.ndarray                 # (dim G, nullity), orthonormal coefficient vectors
    residuals: np.ndarray             # per basis column
    provenance: Dict[str, Any] = field(default_factory=dict)
    heuristics: Dict[str, Any] = field(default_factory=dict)

    @property
    def nullity(self) -> int:
        return int(self.basis.shape[1])

    @property
    def subalgebra(self) -> List[LieAlgebraElement]:
        return [self.group.element(self.basis[:, k]) for k in range(self.nullity)]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "group": self.group.descriptor(),
            "tau": self.tau,
            "threshold": self.threshold,
            "nullity": self.nullity,
            "singular_values": self.singular_values.tolist(),
            "basis": self.basis.T.tolist(),
            "generators": [xi.matrix.tolist() for xi in self.subalgebra],
            "residuals": self.residuals.tolist(),
            "provenance": self.provenance,
            "heuristics": self.heuristics,
        }


def nullspace_report(matrix: np.ndarray, group: MatrixLieGroup, tau: float,
                     cutoff: Optional[float] = None, reference: Optional[float] = None,
                     provenance: Optional[Dict[str, Any]] = None,
                     heuristics: Optional[Dict[str, Any]] = None) -> SymmetryReport:
    """Report for the right nullspace of a (rows, dim G) matrix."""
    if group.dim == 0:
        return SymmetryReport(group, np.zeros(0), tau, 0.0, np.zeros((0, 0)), np.zeros(0),
                              provenance or {}, heuristics or {})
    null = svd_nullspace(matrix, tau=tau, reference=reference, cutoff=cutoff)
    return SymmetryReport(group, null.singular_values, tau, null.threshold, null.basis,
                          null.residuals, provenance or {}, heuristics or {})
