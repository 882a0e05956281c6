import asyncio
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Tuple

import numpy as np
import pandas as pd

from .builders import (build_dictionary, build_group, build_inner, build_pair, build_rep,
                       build_tensor, target_int, target_value)
from .outcome import RunOutcome
from ..models.enforce import (equivariant_function_basis, equivariant_kernel_basis,
                              equivariant_layer_basis, kernel_evaluation_table, verify_equivariance)
from ..models.errors import ConfigError, LiesymError
from ..models.liegroup.group import MatrixLieGroup
from ..utils.config import ExperimentConfig
from ..utils.logging import get_logger
from ..utils.seeding import make_rng
from ..views.artifacts import load_table

VERIFY_ELEMENTS = 20
VERIFY_POINTS = 32


class EnforceViewModel:
    """Builds an equivariant basis for one `enforce` target and checks it with finite transforms."""

    def __init__(self, config: ExperimentConfig):
        self._logger = get_logger("EnforceVM")
        self._config = config
        self._executor = ThreadPoolExecutor(max_workers=config.workers)

    async def run(self) -> RunOutcome:
        kind = self._config.target.get("kind")
        handlers = {"function": self._function, "layer": self._layer, "kernel": self._kernel}
        if kind not in handlers:
            raise ConfigError(f"unknown enforce target '{kind}'")

        loop = asyncio.get_running_loop()
        try:
            body, tables = await loop.run_in_executor(self._executor, handlers[kind])
        except LiesymError as e:
            self._logger.error(f"Enforcing '{kind}' failed: {e}")
            raise

        self._logger.info(f"Equivariant '{kind}' basis with {body['basis']['dim']} directions")
        return RunOutcome(documents={"basis.json": {"target": kind, **body}}, tables=tables)

    def _elements(self, group: MatrixLieGroup) -> List[np.ndarray]:
        count = target_int(self._config, "verify_elements", VERIFY_ELEMENTS, minimum=1)
        rng = make_rng(self._config.seed, "verify-elements")
        return [group.random_element(rng) for _ in range(count)]

    def _points(self, dim: int) -> np.ndarray:
        lo, hi = self._config.sampling.domain
        rng = make_rng(self._config.seed, "verify-points")
        return lo + (hi - lo) * rng.random((VERIFY_POINTS, dim))

    # --- targets ---

    def _function(self) -> Tuple[Dict[str, Any], Dict[str, pd.DataFrame]]:
        config = self._config
        group = build_group(config)
        dictionary = build_dictionary(config)
        pair = build_pair(config, group)
        inner = build_inner(config, dictionary, pair)
        tensor = build_tensor(config, dictionary, pair, inner)
        basis = equivariant_function_basis(tensor, pair, dictionary, inner, tau=config.tau)

        elements = self._elements(group)
        points = self._points(dictionary.input_dim)
        residuals = [verify_equivariance(pair, dictionary, basis.columns[:, k], points, elements)
                     for k in range(basis.dim)]
        table = pd.DataFrame({
            "column": np.arange(basis.dim),
            "lie_residual": basis.lie_residuals,
            "finite_residual": residuals,
        })
        return {"basis": basis.to_dict()}, {"verification.csv": table}

    def _layer(self) -> Tuple[Dict[str, Any], Dict[str, pd.DataFrame]]:
        config = self._config
        group = build_group(config)
        rep_prev = build_rep(group, target_value(config, "rep_prev", required=True), "target.rep_prev")
        rep_next = build_rep(group, target_value(config, "rep_next", required=True), "target.rep_next")
        basis = equivariant_layer_basis(rep_prev, rep_next, tau=config.tau)

        elements = self._elements(group)
        residuals = []
        for W, b in zip(basis.weights, basis.biases):
            worst = 0.0
            for g in elements:
                G_next, G_prev = rep_next.matrix(g), rep_prev.matrix(g)
                worst = max(worst, float(np.linalg.norm(G_next @ W - W @ G_prev) + np.linalg.norm(G_next @ b - b)))
            residuals.append(worst)
        table = pd.DataFrame({"column": np.arange(basis.dim), "finite_residual": residuals})
        body = {"basis": basis.to_dict(), "representations": [rep_prev.name, rep_next.name]}
        return body, {"verification.csv": table}

    def _kernel(self) -> Tuple[Dict[str, Any], Dict[str, pd.DataFrame]]:
        config = self._config
        group = build_group(config)
        reps = {key: build_rep(group, target_value(config, key, required=True), f"target.{key}")
                for key in ("rep_x", "rep_y", "rep_v", "rep_w")}
        degree = target_int(config, "degree", required=True)

        basis = equivariant_kernel_basis(
            reps["rep_y"], reps["rep_x"], reps["rep_v"], reps["rep_w"], degree,
            seed=config.seed, samples=config.sampling.samples,
            domain=list(config.sampling.domain), tau=config.tau,
        )

        elements = self._elements(group)
        points = self._points(basis.dictionary.input_dim)
        residuals = [verify_equivariance(basis.pair, basis.dictionary, basis.columns[:, k], points, elements)
                     for k in range(basis.dim)]
        tables = {"verification.csv": pd.DataFrame({
            "column": np.arange(basis.dim),
            "lie_residual": basis.lie_residuals,
            "finite_residual": residuals,
        })}

        grid = target_value(config, "grid")
        if grid is not None:
            if not isinstance(grid, dict) or set(grid) != {"x", "y"}:
                raise ConfigError("target.grid must be an object with 'x' and 'y' point lists")
            x_grid = load_table(config, grid["x"], "target.grid.x", columns=reps["rep_x"].dim)
            y_grid = load_table(config, grid["y"], "target.grid.y", columns=reps["rep_y"].dim)
            values = kernel_evaluation_table(basis, x_grid, y_grid)
            tables["kernel_table.csv"] = pd.DataFrame(values, columns=self._kernel_columns(basis, reps))

        body = {"basis": basis.to_dict(), "value_shape": list(basis.value_shape)}
        return body, tables

    @staticmethod
    def _kernel_columns(basis, reps) -> List[str]:
        names = [f"x{i}" for i in range(reps["rep_x"].dim)] + [f"y{i}" for i in range(reps["rep_y"].dim)]
        rows, cols = basis.value_shape
        for k in range(basis.dim):
            names += [f"k{k}_{a}{b}" for a in range(rows) for b in range(cols)]
        return names

    def close(self):
        self._executor.shutdown(wait=False)
