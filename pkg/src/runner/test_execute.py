import json
import math

import pandas as pd
import pytest

from config import Settings
from runner.execute import (
    RunResult,
    load_config,
    parse_override,
    run_experiment,
    write_outputs,
)
from runner.models import ExperimentConfig, WarningRecord
from utils.errors import InvalidInputError


def test_parse_override():
    assert parse_override("n_atoms=30") == (["n_atoms"], 30)
    assert parse_override("lambdas=[0.01, 0.02]") == (["lambdas"], [0.01, 0.02])
    assert parse_override("scheme=oat_squeezed") == (["scheme"], "oat_squeezed")
    assert parse_override("lambdas.points=5") == (["lambdas", "points"], 5)
    with pytest.raises(InvalidInputError):
        parse_override("n_atoms")
    with pytest.raises(InvalidInputError):
        parse_override("=3")


def test_load_config_applies_overrides(tmp_path):
    path = tmp_path / "sweep.json"
    path.write_text(
        json.dumps(
            {
                "experiment": "SqueezeSweep",
                "lambdas": {"start": 0.01, "stop": 0.02, "points": 2},
            }
        )
    )
    config = load_config(path, ["n_atoms=30", "lambdas.points=3"], "SqueezeSweep", {"format": "json"})
    assert config.n_atoms == 30
    assert config.lambda_values == pytest.approx([0.01, 0.015, 0.02])
    assert config.format.value == "json"


def test_load_config_without_file_takes_experiment():
    config = load_config(None, ["lambdas=[0.01]"], "SqueezeSweep")
    assert config.experiment.value == "SqueezeSweep"


def test_load_config_errors(tmp_path):
    with pytest.raises(InvalidInputError):
        load_config(tmp_path / "missing.json")

    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(InvalidInputError):
        load_config(broken)

    listing = tmp_path / "list.json"
    listing.write_text("[1, 2]")
    with pytest.raises(InvalidInputError):
        load_config(listing)

    sweep = tmp_path / "sweep.json"
    sweep.write_text(json.dumps({"experiment": "SqueezeSweep", "lambdas": [0.01]}))
    with pytest.raises(InvalidInputError):
        load_config(sweep, experiment="MomErrorGrid")


def _mom_grid_config(**overrides) -> ExperimentConfig:
    payload = {
        "experiment": "MomErrorGrid",
        "n_atoms": 20,
        "lambdas": [0.05],
        "lambda_assumed": [0.03, 0.05],
        "shots": 200,
        "repeats": 5,
        "master_seed": 3,
    }
    payload.update(overrides)
    return ExperimentConfig.model_validate(payload)


def test_reruns_are_byte_identical(tmp_path):
    config = _mom_grid_config()
    first = write_outputs(run_experiment(config, Settings(workers=1)), tmp_path / "a")
    second = write_outputs(run_experiment(config, Settings(workers=3)), tmp_path / "b")
    assert first[0].read_bytes() == second[0].read_bytes()


def test_write_outputs_csv(tmp_path):
    result = run_experiment(_mom_grid_config(), Settings(workers=2))
    data_path, envelope_path = write_outputs(result, tmp_path)

    assert data_path.name == "MomErrorGrid.csv"
    raw = data_path.read_bytes()
    assert b"\r\n" not in raw
    assert raw.decode("utf-8").splitlines()[0].startswith("lambda,lambda_assumed,B,Q,E")
    assert len(pd.read_csv(data_path)) == 2

    envelope = json.loads(envelope_path.read_text())
    assert envelope_path.name == "MomErrorGrid.envelope.json"
    assert envelope["data_file"] == "MomErrorGrid.csv"
    assert envelope["rows"] is None
    assert envelope["n_rows"] == 2
    assert envelope["master_seed"] == 3
    assert envelope["config"]["lambda_assumed"] == [0.03, 0.05]
    assert envelope["config_hash"] == result.config.config_hash()


def test_write_outputs_json_maps_nan_to_null(tmp_path):
    config = ExperimentConfig.model_validate(
        {
            "experiment": "SqueezeSweep",
            "scheme": "oat_squeezed",
            "n_atoms": 1000,
            "lambdas": [0.001],
            "analytic": True,
            "format": "json",
        }
    )
    frame = pd.DataFrame({"lambda": [0.001], "xi": [0.5], "fq_over_n": [math.nan], "regime": ["gaussian"]})
    warning = WarningRecord(category="SmallEnsembleWarning", message="small", count=2)
    paths = write_outputs(RunResult(config=config, frame=frame, warnings=[warning]), tmp_path)

    assert [p.name for p in paths] == ["SqueezeSweep.json"]
    envelope = json.loads(paths[0].read_text())
    assert envelope["data_file"] is None
    assert envelope["columns"] == ["lambda", "xi", "fq_over_n", "regime"]
    assert envelope["rows"][0]["fq_over_n"] is None
    assert envelope["rows"][0]["xi"] == 0.5
    assert envelope["warnings"] == [{"category": "SmallEnsembleWarning", "message": "small", "count": 2}]
