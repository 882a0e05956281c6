import json

import numpy as np
import pytest

from src.models.dynamics import momentum_slice, position_slice
from src.models.errors import ConfigError
from src.models.fnspace import PolynomialDictionary
from src.utils.config import parse_config
from src.viewmodels.discover_viewmodel import DiscoverViewModel
from src.viewmodels.enforce_viewmodel import EnforceViewModel
from src.viewmodels.fit_viewmodel import FitViewModel
from src.viewmodels.outcome import EXIT_OK
from src.viewmodels.recovery_viewmodel import RecoveryViewModel, TrialOutcome
from src.viewmodels.spring_mass_viewmodel import SpringMassViewModel


def _config(**body):
    return parse_config(json.dumps({"workers": 2, **body}))


async def _run(viewmodel_class, config):
    viewmodel = viewmodel_class(config)
    try:
        return await viewmodel.run()
    finally:
        viewmodel.close()


def _radial_coeffs():
    dictionary = PolynomialDictionary(2, 1, 2)
    c = np.zeros(dictionary.size)
    for alpha in [(0, 0), (2, 0), (0, 2)]:
        c[dictionary.index_of(alpha)] = 1.0
    return dictionary, c


class TestDiscoverViewModel:
    async def test_model_target(self):
        dictionary, c = _radial_coeffs()
        config = _config(command="discover", group={"kind": "SO", "n": 2}, dictionary=dictionary.descriptor(),
                         target={"kind": "model", "coefficients": c.tolist()})
        outcome = await _run(DiscoverViewModel, config)
        report = outcome.documents["report.json"]["report"]
        assert report["nullity"] == 1
        assert len(outcome.tables["spectrum.csv"]) == 1
        assert bool(outcome.tables["spectrum.csv"]["null"].iloc[0])

    async def test_coefficient_count_is_checked(self):
        dictionary, c = _radial_coeffs()
        config = _config(command="discover", group={"kind": "SO", "n": 2}, dictionary=dictionary.descriptor(),
                         target={"kind": "model", "coefficients": c[:4].tolist()})
        with pytest.raises(ConfigError):
            await _run(DiscoverViewModel, config)

    async def test_vectorfield_with_conserved_quantities(self):
        config = _config(command="discover", group={"kind": "SO", "n": 2},
                         target={"kind": "vectorfield", "matrix": [[0.0, 1.0], [-1.0, 0.0]],
                                 "conserved_degree": 2})
        body = (await _run(DiscoverViewModel, config)).documents["report.json"]
        assert body["report"]["nullity"] == 1
        assert body["conserved"]["nullity"] == 2

    async def test_pointcloud_target(self):
        angles = np.linspace(0.0, 2 * np.pi, 60, endpoint=False)
        points = np.column_stack([np.cos(angles) + 0.5, np.sin(angles) - 0.25])
        frames = np.column_stack([-np.sin(angles), np.cos(angles)])
        config = _config(command="discover", group={"kind": "SE", "n": 2},
                         target={"kind": "pointcloud", "points": points.tolist(),
                                 "frames": frames.tolist(), "intrinsic_dim": 1})
        body = (await _run(DiscoverViewModel, config)).documents["report.json"]
        assert body["report"]["nullity"] == 1
        assert body["frames"] == "given"


class TestEnforceViewModel:
    async def test_invariant_functions(self):
        config = _config(command="enforce", group={"kind": "SO", "n": 2},
                         dictionary={"type": "poly", "m": 2, "n": 1, "d": 2},
                         target={"kind": "function"})
        outcome = await _run(EnforceViewModel, config)
        assert outcome.documents["basis.json"]["basis"]["dim"] == 2
        assert outcome.tables["verification.csv"]["finite_residual"].max() <= 1e-7

    async def test_trivial_group_keeps_the_dictionary(self):
        config = _config(command="enforce", group={"kind": "trivial", "n": 2},
                         dictionary={"type": "poly", "m": 2, "n": 1, "d": 2},
                         target={"kind": "function"})
        outcome = await _run(EnforceViewModel, config)
        assert outcome.documents["basis.json"]["basis"]["dim"] == 6

    async def test_layer(self):
        config = _config(command="enforce", group={"kind": "SO", "n": 3},
                         target={"kind": "layer", "rep_prev": "standard", "rep_next": "standard"})
        outcome = await _run(EnforceViewModel, config)
        assert outcome.documents["basis.json"]["basis"]["dim"] == 1
        assert outcome.tables["verification.csv"]["finite_residual"].max() <= 1e-10

    async def test_kernel_with_grid(self):
        config = _config(command="enforce", seed=4, group={"kind": "SO", "n": 2},
                         sampling={"samples": 60},
                         target={"kind": "kernel", "rep_x": "standard", "rep_y": "standard",
                                 "rep_v": "trivial", "rep_w": "trivial", "degree": 2,
                                 "grid": {"x": [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
                                          "y": [[0.5, 0.5], [-0.5, 0.5], [0.0, 0.0], [1.0, 1.0]]}})
        outcome = await _run(EnforceViewModel, config)
        assert outcome.documents["basis.json"]["basis"]["dim"] == 5
        table = outcome.tables["kernel_table.csv"]
        assert table.shape == (12, 4 + 5)
        assert list(table.columns[:4]) == ["x0", "x1", "y0", "y1"]


class TestFitViewModel:
    async def test_gamma_sweep(self):
        dictionary, c = _radial_coeffs()
        X = np.random.default_rng(2).uniform(-1.0, 1.0, (25, 2))
        y = dictionary.model_values(c, X)[:, 0]
        config = _config(command="fit", group={"kind": "SO", "n": 2}, dictionary=dictionary.descriptor(),
                         target={"data": np.column_stack([X, y]).tolist(), "gammas": [0.0, 0.01]})
        outcome = await _run(FitViewModel, config)
        sweep = outcome.tables["sweep.csv"]
        assert list(sweep["gamma"]) == [0.0, 0.01]
        assert sweep["nullity"].iloc[0] == 1
        assert sweep["mse"].iloc[0] < 1e-20
        assert len(outcome.documents["fit.json"]["fits"]) == 2

    async def test_data_width_is_checked(self):
        dictionary, _ = _radial_coeffs()
        config = _config(command="fit", group={"kind": "SO", "n": 2}, dictionary=dictionary.descriptor(),
                         target={"data": [[0.0, 1.0, 2.0, 3.0]]})
        with pytest.raises(ConfigError):
            await _run(FitViewModel, config)


class TestRecoveryViewModel:
    def test_n_star(self):
        assert TrialOutcome(1, 0, [False, True, False, True, True], 0).n_star == 4
        assert TrialOutcome(1, 0, [False, False], 0).n_star == 3
        assert not TrialOutcome(1, 0, [True, False, True], 0).monotone

    async def test_small_sweep(self):
        config = _config(command="exp-polyrec", group={"kind": "T", "n": 2},
                         target={"family": "lin", "n": 2, "ranks": [1], "degree": 2, "trials": 1})
        outcome = await _run(RecoveryViewModel, config)
        trials = outcome.tables["trials.csv"]
        assert len(trials) == 6
        assert bool(trials["success"].iloc[-1])
        summary = outcome.tables["summary.csv"]
        assert summary["baseline"].iloc[0] == 6
        assert summary["max"].iloc[0] <= 6

    async def test_ambient_dimension_cap(self):
        config = _config(command="exp-polyrec", group={"kind": "T", "n": 7},
                         target={"family": "rad", "n": 7})
        with pytest.raises(ConfigError):
            await _run(RecoveryViewModel, config)

    @pytest.mark.slow
    async def test_lower_rank_needs_fewer_samples(self):
        config = _config(command="exp-polyrec", group={"kind": "T", "n": 3},
                         target={"family": "lin", "n": 3, "ranks": [1, 2], "degree": 2, "trials": 10})
        outcome = await _run(RecoveryViewModel, config)
        summary = outcome.tables["summary.csv"].set_index("r")
        assert summary.loc[1, "mean"] < summary.loc[2, "mean"]
        assert summary["max"].max() <= 10

        trials = outcome.tables["trials.csv"]
        full = trials[trials["N"] == 10]
        assert len(full) == 20
        assert full["success"].all()


def _y_indices(n_particles):
    return np.array([s.start + 1 for i in range(n_particles)
                     for s in (position_slice(i), momentum_slice(i))])


@pytest.mark.slow
async def test_spring_mass_experiment():
    config = _config(command="exp-springmass", group={"kind": "SE", "n": 3}, target={"n_particles": 5})
    outcome = await _run(SpringMassViewModel, config)
    report = outcome.documents["report.json"]
    assert report["true_model"]["report"]["nullity"] == 4
    assert report["true_model"]["mse"] < 1e-20
    assert report["training_pairs"] == 100
    assert len(outcome.tables["gamma_sweep.csv"]) == 8
    assert outcome.exit_code == EXIT_OK

    selected = report["selected"]
    assert 2 * selected["symmetric"]["relative_distance"] <= selected["l1"]["relative_distance"]
    assert report["mean_test_error"]["symmetric"] < report["mean_test_error"]["l1"]

    # planar training data never excites y, so only the symmetric fit can fill those blocks
    y = _y_indices(5)
    true_A = outcome.matrices["true_A.csv"]
    symmetric_A = outcome.matrices["symmetric_A.csv"]
    assert symmetric_A.shape == (31, 31)
    assert not outcome.matrices["l1_A.csv"][np.ix_(y, y)].any()

    block_true, block_fit = true_A[np.ix_(y, y)], symmetric_A[np.ix_(y, y)]
    strong = np.abs(block_true) >= 0.5
    assert strong.any()
    assert np.all(np.sign(block_fit[strong]) == np.sign(block_true[strong]))
    assert np.linalg.norm(block_fit) >= 0.5 * np.linalg.norm(block_true)
