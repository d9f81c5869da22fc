from pathlib import Path

import pytest
from pydantic import ValidationError

from runner.models import ExperimentConfig, ExperimentKind, Grid, grid_values
from schemes import SchemeKind


def test_minimal_config_defaults():
    config = ExperimentConfig.model_validate({"experiment": "SqueezeSweep", "lambdas": [0.01]})
    assert config.experiment is ExperimentKind.SQUEEZE_SWEEP
    assert config.scheme is SchemeKind.TAT_SQUEEZED
    assert config.n_atoms == 100
    assert config.shots == [10_000]
    assert config.lambda_values == [0.01]


def test_unknown_keys_are_rejected():
    with pytest.raises(ValidationError):
        ExperimentConfig.model_validate(
            {"experiment": "SqueezeSweep", "lambdas": [0.01], "lamdas": [0.02]}
        )
    with pytest.raises(ValidationError):
        ExperimentConfig.model_validate({"experiment": "Nope", "lambdas": [0.01]})


def test_grid_expansion():
    assert Grid(start=0.01, stop=0.17, points=45).values()[-1] == pytest.approx(0.17)
    assert len(grid_values(Grid(start=0.01, stop=0.17, points=45))) == 45
    assert grid_values(None) == []
    config = ExperimentConfig.model_validate(
        {"experiment": "SqueezeSweep", "lambdas": {"start": 0.0, "stop": 0.1, "points": 3}}
    )
    assert config.lambda_values == pytest.approx([0.0, 0.05, 0.1])


def test_scalar_shots_are_wrapped():
    config = ExperimentConfig.model_validate(
        {"experiment": "SqueezeSweep", "lambdas": [0.01], "shots": 250}
    )
    assert config.shots == [250]
    with pytest.raises(ValidationError):
        ExperimentConfig.model_validate({"experiment": "SqueezeSweep", "lambdas": [0.01], "shots": 0})


@pytest.mark.parametrize(
    "payload",
    [
        {"experiment": "MomErrorGrid", "lambdas": [0.02]},
        {"experiment": "NonGaussMC", "lambdas": [0.05], "repeats": 5},
        {"experiment": "NonGaussMC", "lambdas": [0.05], "dlambdas": [0.0025], "repeats": 1},
        {"experiment": "DeltaCrit"},
        {"experiment": "MixedState", "lambdas": [0.02]},
        {"experiment": "SqueezeSweep", "lambdas": []},
        {"experiment": "SqueezeSweep", "lambdas": [-0.01]},
        {"experiment": "SqueezeSweep", "lambdas": [0.01], "analytic": True},
        {"experiment": "MomVsMle", "lambdas": [0.05], "dlambdas": [0.0025], "basis": "x", "phi": -0.1},
        {"experiment": "TwoParamRescue", "lambdas": [0.01], "dlambdas": [0.005], "repeats": 3,
         "lambda_domain": [0.1, 0.0]},
        {"experiment": "SqueezeSweep", "lambdas": [0.01], "master_seed": -1},
    ],
)
def test_experiment_specific_requirements(payload):
    with pytest.raises(ValidationError):
        ExperimentConfig.model_validate(payload)


def test_config_hash_tracks_content():
    a = ExperimentConfig.model_validate({"experiment": "SqueezeSweep", "lambdas": [0.01]})
    b = ExperimentConfig.model_validate({"experiment": "SqueezeSweep", "lambdas": [0.01]})
    c = ExperimentConfig.model_validate(
        {"experiment": "SqueezeSweep", "lambdas": [0.01], "master_seed": 1}
    )
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != c.config_hash()
    assert len(a.config_hash()) == 64


def test_shipped_configs_validate():
    configs = sorted((Path(__file__).parents[2] / "configs").glob("*.json"))
    assert len(configs) >= len(ExperimentKind)
    seen = {ExperimentConfig.model_validate_json(path.read_text()).experiment for path in configs}
    assert seen == set(ExperimentKind)
