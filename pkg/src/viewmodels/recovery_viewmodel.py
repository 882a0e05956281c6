import asyncio
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List

import numpy as np
import pandas as pd

from .builders import build_group, build_inner, build_pair, build_tensor, solver_options, target_int, target_value
from .outcome import RunOutcome
from ..models.errors import ConfigError, LiesymError
from ..models.fnspace.targets import StructuredTarget, linear_features_target, radial_features_target
from ..models.operators.lie_tensor import LieOperatorTensor
from ..models.operators.action import ActionPair
from ..models.promote import SolverOptions, recover_interpolating
from ..utils.config import ExperimentConfig
from ..utils.logging import get_logger
from ..utils.seeding import make_rng

MAX_AMBIENT_DIM = 6
FAMILIES = ("lin", "rad")


@dataclass
class TrialOutcome:
    r: int
    trial: int
    successes: List[bool]       # index N - 1
    unconverged: int

    @property
    def n_star(self) -> int:
        """Smallest N from which every larger prefix also recovers the target."""
        n_star = len(self.successes) + 1
        for N in range(len(self.successes), 0, -1):
            if not self.successes[N - 1]:
                break
            n_star = N
        return n_star

    @property
    def monotone(self) -> bool:
        first = next((i for i, ok in enumerate(self.successes) if ok), len(self.successes))
        return all(self.successes[first:])


def draw_target(family: str, n: int, r: int, degree: int, seed: int, trial: int) -> StructuredTarget:
    rng = make_rng(seed, "truth", f"r:{r}", f"trial:{trial}")
    if family == "lin":
        return linear_features_target(n, r, degree, rng)
    return radial_features_target(n, r, degree, rng)


def prefix_sweep(tensor: LieOperatorTensor, pair: ActionPair, target: StructuredTarget,
                 points: np.ndarray, solver: SolverOptions) -> tuple[List[bool], int]:
    """Recover the target from the first N points for every N = 1 .. len(points)."""
    values = target.dictionary.model_values(target.coeffs, points)
    successes, unconverged = [], 0
    for N in range(1, len(points) + 1):
        fit = recover_interpolating(tensor, target.dictionary, points[:N], values[:N], pair=pair,
                                    solver=solver, truth=target.coeffs)
        successes.append(bool(fit.success))
        unconverged += 0 if fit.converged else 1
    return successes, unconverged


class RecoveryViewModel:
    """Sample counts needed to recover structured polynomials with nuclear-norm interpolation."""

    def __init__(self, config: ExperimentConfig):
        self._logger = get_logger("RecoveryVM")
        self._config = config
        self._executor = ThreadPoolExecutor(max_workers=config.workers)

    def _settings(self) -> Dict[str, Any]:
        config = self._config
        family = target_value(config, "family", required=True)
        if family not in FAMILIES:
            raise ConfigError(f"target.family must be one of {list(FAMILIES)}, got {family!r}")
        n = target_int(config, "n", required=True, minimum=1)
        if n > MAX_AMBIENT_DIM:
            raise ConfigError(f"target.n={n} exceeds the supported ambient dimension {MAX_AMBIENT_DIM}")
        ranks = target_value(config, "ranks", list(range(1, n + 1)))
        if not isinstance(ranks, list) or not ranks or \
                not all(isinstance(r, int) and not isinstance(r, bool) and 1 <= r <= n for r in ranks):
            raise ConfigError(f"target.ranks must be a list of integers in [1, {n}], got {ranks!r}")
        degree = target_int(config, "degree", 2, minimum=1)
        trials = target_int(config, "trials", 10, minimum=1)
        return {"family": family, "n": n, "ranks": ranks, "degree": degree, "trials": trials}

    def _trial(self, settings: Dict[str, Any], tensor: LieOperatorTensor, pair: ActionPair,
               r: int, trial: int) -> TrialOutcome:
        config = self._config
        target = draw_target(settings["family"], settings["n"], r, settings["degree"], config.seed, trial)
        lo, hi = config.sampling.domain
        rng = make_rng(config.seed, "points", f"r:{r}", f"trial:{trial}")
        points = lo + (hi - lo) * rng.random((target.dictionary.size, settings["n"]))
        successes, unconverged = prefix_sweep(tensor, pair, target, points, solver_options(config.solver))
        outcome = TrialOutcome(r, trial, successes, unconverged)
        self._logger.info(f"Trial {trial} at r={r}: N* = {outcome.n_star} of {len(successes)}")
        return outcome

    def _tensor(self, settings: Dict[str, Any]) -> tuple[LieOperatorTensor, ActionPair]:
        config = self._config
        group = build_group(config)
        pair = build_pair(config, group)
        # every trial shares one dictionary, so one tensor serves them all
        template = draw_target(settings["family"], settings["n"], settings["ranks"][0], settings["degree"],
                            config.seed, 0)
        inner = build_inner(config, template.dictionary, pair)
        return build_tensor(config, template.dictionary, pair, inner), pair

    async def run(self) -> RunOutcome:
        settings = self._settings()
        loop = asyncio.get_running_loop()
        try:
            tensor, pair = await loop.run_in_executor(self._executor, self._tensor, settings)
            outcomes: List[TrialOutcome] = await asyncio.gather(*[
                loop.run_in_executor(self._executor, self._trial, settings, tensor, pair, r, k)
                for r in settings["ranks"] for k in range(settings["trials"])
            ])
        except LiesymError as e:
            self._logger.error(f"Recovery experiment failed: {e}")
            raise

        baseline = tensor.size
        trials = pd.DataFrame([
            {"trial": o.trial, "r": o.r, "N": N, "success": ok}
            for o in outcomes for N, ok in enumerate(o.successes, start=1)
        ])
        summary_rows = []
        for r in settings["ranks"]:
            stars = np.array([o.n_star for o in outcomes if o.r == r])
            summary_rows.append({"r": r, "min": int(stars.min()), "mean": float(stars.mean()),
                                 "max": int(stars.max()), "baseline": baseline})
        summary = pd.DataFrame(summary_rows)

        report = {
            "settings": settings,
            "group": tensor.group_descriptor,
            "baseline": baseline,
            "sampling": tensor.sampling,
            "trials": [{"r": o.r, "trial": o.trial, "n_star": o.n_star, "monotone": o.monotone,
                        "unconverged": o.unconverged} for o in outcomes],
            "unconverged_solves": int(sum(o.unconverged for o in outcomes)),
        }
        self._logger.info(f"Recovery sweep done: {len(outcomes)} trials, baseline {baseline}")
        return RunOutcome(documents={"report.json": report},
                          tables={"trials.csv": trials, "summary.csv": summary})

    def close(self):
        self._executor.shutdown(wait=False)
