import asyncio
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any, Dict, List

import numpy as np
import pandas as pd

from .builders import (build_group, build_inner, build_tensor, solver_options, target_float,
                       target_floats, target_int)
from .outcome import RunOutcome
from ..models.discover import function_symmetries
from ..models.dynamics import (SpringMassSystem, error_curve, general_initial_conditions,
                               integrated_relative_error, make_spring_mass,
                               planar_initial_conditions, simulate, stack_pairs)
from ..models.errors import LiesymError
from ..models.liegroup.representation import particle_rep
from ..models.operators.action import ActionPair
from ..models.operators.lie_tensor import LieOperatorTensor
from ..models.promote import FitResult, PromoteProblem, fit_l1, fit_regularized, select_gamma, training_mse
from ..utils.config import ExperimentConfig
from ..utils.logging import get_logger

DEFAULT_GAMMAS = (1e-4, 1e-3, 1e-2, 1e-1)
DEFAULT_L1_GAMMAS = (1e-6, 1e-5, 1e-4, 1e-3)


@dataclass(frozen=True)
class SpringMassSettings:
    n_particles: int
    gammas: List[float]
    l1_gammas: List[float]
    trajectories: int
    samples_per_trajectory: int
    dt: float
    substeps: int
    test_trajectories: int
    test_duration: float
    mse_threshold: float

    @property
    def step(self) -> float:
        return self.dt / self.substeps


class SpringMassViewModel:
    """
    Learns the linear dynamics of a spring-mass system from trajectories confined to the
    x-z plane, once with the SE(3) nuclear-norm penalty and once with an elementwise L1
    penalty, then compares both fits on fully three-dimensional test trajectories.
    """

    def __init__(self, config: ExperimentConfig):
        self._logger = get_logger("SpringMassVM")
        self._config = config
        self._executor = ThreadPoolExecutor(max_workers=config.workers)

    def _settings(self) -> SpringMassSettings:
        config = self._config
        return SpringMassSettings(
            n_particles=target_int(config, "n_particles", 5, minimum=2),
            gammas=target_floats(config, "gammas", DEFAULT_GAMMAS),
            l1_gammas=target_floats(config, "l1_gammas", DEFAULT_L1_GAMMAS),
            trajectories=target_int(config, "trajectories", 2, minimum=1),
            samples_per_trajectory=target_int(config, "samples_per_trajectory", 50, minimum=2),
            dt=target_float(config, "dt", 0.1),
            substeps=target_int(config, "substeps", 10, minimum=1),
            test_trajectories=target_int(config, "test_trajectories", 5, minimum=1),
            test_duration=target_float(config, "test_duration", 5.0),
            mse_threshold=target_float(config, "mse_threshold", 1e-4),
        )

    def _training_data(self, system: SpringMassSystem, s: SpringMassSettings) -> tuple[np.ndarray, np.ndarray]:
        runs = []
        for k in range(s.trajectories):
            x0 = planar_initial_conditions(s.n_particles, self._config.seed, f"train:{k}")
            runs.append(simulate(system, x0, (s.samples_per_trajectory - 1) * s.dt, s.step,
                                 record_every=s.substeps))
        X, Y = stack_pairs(runs)
        self._logger.info(f"Training data: {X.shape[0]} planar pairs from {s.trajectories} trajectories")
        return X, Y

    def _setup(self, s: SpringMassSettings) -> Dict[str, Any]:
        config = self._config
        system = make_spring_mass(s.n_particles, config.seed)
        group = build_group(config)
        rep = particle_rep(group, s.n_particles)
        dictionary = system.dictionary()
        pair = ActionPair(rep, rep)
        inner = build_inner(config, dictionary, pair)
        tensor = build_tensor(config, dictionary, pair, inner)
        X, Y = self._training_data(system, s)
        problem = PromoteProblem(tensor, dictionary, X, Y, solver=solver_options(config.solver))
        return {"system": system, "tensor": tensor, "problem": problem}

    def _test(self, system: SpringMassSystem, s: SpringMassSettings, fits: Dict[str, FitResult],
              k: int) -> tuple[Dict[str, float], pd.DataFrame]:
        dictionary = system.dictionary()
        x0 = general_initial_conditions(s.n_particles, self._config.seed, f"test:{k}")
        reference = simulate(system, x0, s.test_duration, s.step, record_every=s.substeps)
        frame = pd.DataFrame({"trajectory": k, "t": reference.times})
        errors = {}
        for name, fit in fits.items():
            predicted = simulate((dictionary, fit.coeffs), x0, s.test_duration, s.step,
                                 record_every=s.substeps, homogeneous=True)
            curve = np.full(reference.count, np.inf)
            values = error_curve(reference, predicted)
            curve[:values.size] = values
            frame[f"{name}_error"] = curve
            errors[name] = integrated_relative_error(reference, predicted)
        return errors, frame

    async def run(self) -> RunOutcome:
        s = self._settings()
        loop = asyncio.get_running_loop()
        try:
            setup = await loop.run_in_executor(self._executor, self._setup, s)
            system: SpringMassSystem = setup["system"]
            tensor: LieOperatorTensor = setup["tensor"]
            problem: PromoteProblem = setup["problem"]

            truth = await loop.run_in_executor(self._executor, function_symmetries, tensor, system.coeffs,
                                               self._config.tau, self._config.cutoff)
            nuclear: List[FitResult] = await asyncio.gather(*[
                loop.run_in_executor(self._executor, fit_regularized, problem.with_gamma(g), True,
                                     self._config.tau)
                for g in s.gammas
            ])
            sparse: List[FitResult] = await asyncio.gather(*[
                loop.run_in_executor(self._executor, fit_l1, problem.dictionary, problem.X, problem.Y, g)
                for g in s.l1_gammas
            ])
            for fit in sparse:
                fit.report = function_symmetries(tensor, fit.coeffs, self._config.tau, self._config.cutoff)

            chosen = {"symmetric": select_gamma(nuclear, s.mse_threshold),
                      "l1": select_gamma(sparse, s.mse_threshold)}
            tests = await asyncio.gather(*[
                loop.run_in_executor(self._executor, self._test, system, s, chosen, k)
                for k in range(s.test_trajectories)
            ])
        except LiesymError as e:
            self._logger.error(f"Spring-mass experiment failed: {e}")
            raise

        return self._outcome(s, system, problem, truth, nuclear, sparse, chosen, tests)

    def _outcome(self, s, system, problem, truth, nuclear, sparse, chosen, tests) -> RunOutcome:
        A = system.state_matrix
        shape = A.shape
        sweep = pd.DataFrame([
            {"model": model, "gamma": r.gamma, "mse": r.mse, "penalty": r.penalty,
             "converged": r.converged, "iterations": r.iterations, "nullity": r.report.nullity}
            for model, results in (("symmetric", nuclear), ("l1", sparse)) for r in results
        ])
        errors = {name: [t[0][name] for t in tests] for name in chosen}
        curves = pd.concat([t[1] for t in tests], ignore_index=True)

        def summary(fit: FitResult) -> Dict[str, Any]:
            W = fit.coeffs.reshape(shape)
            return {
                "gamma": fit.gamma,
                "mse": fit.mse,
                "converged": fit.converged,
                "nullity": fit.report.nullity,
                "relative_distance": float(np.linalg.norm(W - A) / np.linalg.norm(A)),
            }

        mean_errors = {name: float(np.mean(v)) for name, v in errors.items()}
        self._logger.info(
            f"Test error (mean integrated): symmetric {mean_errors['symmetric']:.3e}, l1 {mean_errors['l1']:.3e}"
        )
        report = {
            "system": system.describe(),
            "settings": {**asdict(s), "initial_conditions": "fresh centers per trajectory"},
            "training_pairs": problem.count,
            "true_model": {"mse": training_mse(problem.dictionary, system.coeffs, problem.X, problem.Y),
                           "report": truth.to_dict()},
            "selected": {name: summary(fit) for name, fit in chosen.items()},
            "test_errors": errors,
            "mean_test_error": mean_errors,
            "unconverged_gammas": {"symmetric": [r.gamma for r in nuclear if not r.converged],
                                   "l1": [r.gamma for r in sparse if not r.converged]},
        }
        return RunOutcome(
            documents={"report.json": report},
            tables={"gamma_sweep.csv": sweep, "test_errors.csv": curves},
            matrices={"true_A.csv": A,
                      "symmetric_A.csv": chosen["symmetric"].coeffs.reshape(shape),
                      "l1_A.csv": chosen["l1"].coeffs.reshape(shape)},
        )

    def close(self):
        self._executor.shutdown(wait=False)
