import asyncio
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, Tuple

from .builders import (build_dictionary, build_group, build_inner, build_pair, build_rep,
                       build_tensor, target_int, target_value)
from .outcome import RunOutcome
from ..models.discover import (PointCloud, SymmetryReport, conserved_quantities,
                               estimate_tangent_frames, function_symmetries, graph_symmetries,
                               pointcloud_symmetries, vectorfield_symmetries)
from ..models.errors import ConfigError, LiesymError
from ..models.fnspace.polynomial import PolynomialDictionary
from ..models.operators.action import ActionPair
from ..utils.config import ExperimentConfig
from ..utils.logging import get_logger
from ..views.artifacts import load_table, spectrum_frame


class DiscoverViewModel:
    """Runs one `discover` target: a dictionary model, a point cloud, sampled graph or linear vector field."""

    def __init__(self, config: ExperimentConfig):
        self._logger = get_logger("DiscoverVM")
        self._config = config
        self._executor = ThreadPoolExecutor(max_workers=config.workers)

    async def run(self) -> RunOutcome:
        kind = self._config.target.get("kind")
        handlers = {
            "model": self._model,
            "pointcloud": self._pointcloud,
            "graph": self._graph,
            "vectorfield": self._vectorfield,
        }
        if kind not in handlers:
            raise ConfigError(f"unknown discover target '{kind}'")

        loop = asyncio.get_running_loop()
        try:
            report, extra = await loop.run_in_executor(self._executor, handlers[kind])
        except LiesymError as e:
            self._logger.error(f"Discovery on '{kind}' failed: {e}")
            raise

        self._logger.info(f"Discovered nullity {report.nullity} of {report.group.dim} under {report.group.name}")
        body = {"target": kind, "report": report.to_dict(), **extra}
        return RunOutcome(
            documents={"report.json": body},
            tables={"spectrum.csv": spectrum_frame(report.singular_values, report.threshold)},
        )

    # --- targets ---

    def _model(self) -> Tuple[SymmetryReport, Dict[str, Any]]:
        config = self._config
        group = build_group(config)
        dictionary = build_dictionary(config)
        pair = build_pair(config, group)
        inner = build_inner(config, dictionary, pair)
        tensor = build_tensor(config, dictionary, pair, inner)

        coeffs = load_table(config, target_value(config, "coefficients", required=True),
                            "target.coefficients").ravel()
        if coeffs.size != dictionary.size:
            raise ConfigError(f"target.coefficients has {coeffs.size} entries, dictionary has {dictionary.size}")
        report = function_symmetries(tensor, coeffs, tau=config.tau, cutoff=config.cutoff)
        return report, {"tensor": {"range_dim": tensor.range_dim, "sampling": inner.describe()}}

    def _pointcloud(self) -> Tuple[SymmetryReport, Dict[str, Any]]:
        config = self._config
        group = build_group(config)
        rep = build_rep(group, config.action.input, "action.input")

        points = load_table(config, target_value(config, "points", required=True), "target.points")
        m = target_int(config, "intrinsic_dim", required=True)
        k = target_int(config, "k_neighbors", minimum=1)

        frames_value = target_value(config, "frames")
        if frames_value is not None:
            d = points.shape[1]
            table = load_table(config, frames_value, "target.frames", columns=d * m)
            if table.shape[0] != points.shape[0]:
                raise ConfigError("target.frames needs one row per point")
            cloud = PointCloud(points, m, table.reshape(-1, d, m))
            source = "given"
        else:
            cloud = estimate_tangent_frames(PointCloud(points, m), k)
            source = "local-pca"

        report = pointcloud_symmetries(cloud, group, rep, tau=config.tau, cutoff=config.cutoff)
        return report, {"frames": source, "points": cloud.count}

    def _graph(self) -> Tuple[SymmetryReport, Dict[str, Any]]:
        config = self._config
        group = build_group(config)
        pair = build_pair(config, group)

        m = target_int(config, "input_dim", required=True, minimum=1)
        table = load_table(config, target_value(config, "pairs", required=True), "target.pairs")
        if table.shape[1] <= m:
            raise ConfigError(f"target.pairs needs more than input_dim={m} columns")
        X, Y = table[:, :m], table[:, m:]
        n = Y.shape[1]

        jac_value = target_value(config, "jacobians")
        if jac_value is not None:
            jac = load_table(config, jac_value, "target.jacobians", columns=n * m)
            if jac.shape[0] != X.shape[0]:
                raise ConfigError("target.jacobians needs one row per pair")
            frame_source = jac.reshape(-1, n, m)
        else:
            frame_source = "estimate"

        report = graph_symmetries(X, Y, pair, frame_source, target_int(config, "k_neighbors", minimum=1),
                                  tau=config.tau, cutoff=config.cutoff)
        return report, {"pairs": int(X.shape[0]),
                        "frames": "estimate" if jac_value is None else "jacobians"}

    def _vectorfield(self) -> Tuple[SymmetryReport, Dict[str, Any]]:
        config = self._config
        group = build_group(config)
        rep = build_rep(group, config.action.input, "action.input")

        A = load_table(config, target_value(config, "matrix", required=True), "target.matrix")
        n = A.shape[0]
        if A.shape != (n, n) or n != rep.dim:
            raise ConfigError(f"target.matrix must be {rep.dim} x {rep.dim}, got {A.shape[0]} x {A.shape[1]}")

        field_dict = PolynomialDictionary(n, n, 1, min_degree=1)
        coeffs = A.ravel()
        inner = build_inner(config, field_dict, ActionPair(rep, rep))
        report = vectorfield_symmetries(field_dict, coeffs, group, rep, inner,
                                        tau=config.tau, cutoff=config.cutoff)

        extra: Dict[str, Any] = {"state_dim": n}
        degree = target_int(config, "conserved_degree", minimum=1)
        if degree is not None:
            candidates = PolynomialDictionary(n, 1, degree)
            found = conserved_quantities(field_dict, coeffs, candidates,
                                         build_inner(config, candidates, ActionPair(rep, rep),
                                                     samples=max(inner.count, 2 * candidates.size), stream=1),
                                         tau=config.tau, cutoff=config.cutoff)
            extra["conserved"] = found.to_dict()
        return report, extra

    def close(self):
        self._executor.shutdown(wait=False)
