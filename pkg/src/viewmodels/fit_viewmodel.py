import asyncio
from concurrent.futures import ThreadPoolExecutor
from typing import List

import pandas as pd

from .builders import (build_dictionary, build_group, build_inner, build_pair, build_tensor,
                       solver_options, target_floats, target_int, target_value)
from .outcome import EXIT_NUMERICAL, RunOutcome
from ..models.errors import ConfigError, LiesymError
from ..models.promote import FitResult, PromoteProblem, fit_regularized
from ..utils.config import ExperimentConfig
from ..utils.logging import get_logger
from ..views.artifacts import load_table


class FitViewModel:
    """Symmetry-regularized regression over a grid of gamma values, one fit per worker."""

    def __init__(self, config: ExperimentConfig):
        self._logger = get_logger("FitVM")
        self._config = config
        self._executor = ThreadPoolExecutor(max_workers=config.workers)

    def _problem(self) -> PromoteProblem:
        config = self._config
        group = build_group(config)
        dictionary = build_dictionary(config)
        pair = build_pair(config, group)

        m = target_int(config, "input_dim", dictionary.input_dim, minimum=1)
        if m != dictionary.input_dim:
            raise ConfigError(f"target.input_dim={m} but the dictionary is on R^{dictionary.input_dim}")
        data = load_table(config, target_value(config, "data", required=True), "target.data",
                          columns=m + dictionary.output_dim)

        inner = build_inner(config, dictionary, pair)
        tensor = build_tensor(config, dictionary, pair, inner)
        return PromoteProblem(tensor, dictionary, data[:, :m], data[:, m:],
                              solver=solver_options(config.solver))

    async def run(self) -> RunOutcome:
        gammas = target_floats(self._config, "gammas", [0.0])
        loop = asyncio.get_running_loop()
        try:
            problem = await loop.run_in_executor(self._executor, self._problem)
            results: List[FitResult] = await asyncio.gather(*[
                loop.run_in_executor(self._executor, fit_regularized, problem.with_gamma(g), True,
                                     self._config.tau)
                for g in gammas
            ])
        except LiesymError as e:
            self._logger.error(f"Fit failed: {e}")
            raise

        sweep = pd.DataFrame({
            "gamma": [r.gamma for r in results],
            "mse": [r.mse for r in results],
            "penalty": [r.penalty for r in results],
            "converged": [r.converged for r in results],
            "iterations": [r.iterations for r in results],
            "nullity": [r.report.nullity if r.report is not None else -1 for r in results],
        })
        outcome = RunOutcome(
            documents={"fit.json": {"samples": problem.count, "fits": [r.to_dict() for r in results]}},
            tables={"sweep.csv": sweep},
        )
        stalled = [r.gamma for r in results if not r.converged]
        if stalled:
            self._logger.warning(f"ADMM did not converge for gamma in {stalled}")
            outcome.exit_code = EXIT_NUMERICAL
        return outcome

    def close(self):
        self._executor.shutdown(wait=False)
