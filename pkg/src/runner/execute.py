import json
import logging
import warnings
from collections import Counter
from dataclasses import dataclass
from datetime import datetime, timezone
from importlib import metadata
from pathlib import Path
from typing import Any, Optional, Sequence

import pandas as pd

from config import Settings
from utils.errors import InvalidInputError

from .experiments import PIPELINES
from .models import ExperimentConfig, OutputFormat, ResultEnvelope, WarningRecord

logger = logging.getLogger(__name__)

PACKAGE_NAME = "spin-prep-error"
FALLBACK_VERSION = "0.1.0"
CSV_FLOAT_FORMAT = "%.17g"


def tool_version() -> str:
    try:
        return metadata.version(PACKAGE_NAME)
    except metadata.PackageNotFoundError:
        return FALLBACK_VERSION


def parse_override(item: str) -> tuple[list[str], Any]:
    """``key=value`` with a dotted key path; the value is JSON, or a plain string if it is not."""
    key, sep, raw = item.partition("=")
    if not sep or not key.strip():
        raise InvalidInputError(f"override {item!r} is not of the form key=value")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip().split("."), value


def _set_path(raw: dict[str, Any], path: list[str], value: Any) -> None:
    node = raw
    for part in path[:-1]:
        child = node.get(part)
        if not isinstance(child, dict):
            child = {}
            node[part] = child
        node = child
    node[path[-1]] = value


def load_config(
    path: Optional[str | Path] = None,
    overrides: Sequence[str] = (),
    experiment: Optional[str] = None,
    updates: Optional[dict[str, Any]] = None,
) -> ExperimentConfig:
    """Read a JSON config, apply ``--set`` overrides to the raw mapping, then validate."""
    raw: Any = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise InvalidInputError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise InvalidInputError("config must be a JSON object")

    for item in overrides:
        key_path, value = parse_override(item)
        _set_path(raw, key_path, value)
    raw.update(updates or {})

    if experiment is not None:
        declared = raw.setdefault("experiment", experiment)
        if declared != experiment:
            raise InvalidInputError(
                f"config declares experiment {declared!r} but {experiment!r} was requested"
            )
    return ExperimentConfig.model_validate(raw)


@dataclass(frozen=True)
class RunResult:
    config: ExperimentConfig
    frame: pd.DataFrame
    warnings: list[WarningRecord]


def summarize_warnings(caught: Sequence[warnings.WarningMessage]) -> list[WarningRecord]:
    counts = Counter((w.category.__name__, str(w.message)) for w in caught)
    return [
        WarningRecord(category=category, message=message, count=count)
        for (category, message), count in counts.items()
    ]


def run_experiment(config: ExperimentConfig, settings: Optional[Settings] = None) -> RunResult:
    if settings is None:
        settings = Settings()  # pyright: ignore [reportCallIssue]
    pipeline = PIPELINES[config.experiment]
    logger.info("running %s, config %s", config.experiment.value, config.config_hash()[:12])

    # Records warnings from trial worker threads as well.
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        frame = pipeline(config, settings)

    records = summarize_warnings(caught)
    for record in records:
        logger.warning("%s x%d: %s", record.category, record.count, record.message)
    logger.info("%s produced %d rows", config.experiment.value, len(frame))
    return RunResult(config=config, frame=frame, warnings=records)


def _records(frame: pd.DataFrame) -> list[dict[str, Any]]:
    return frame.astype(object).where(frame.notna(), None).to_dict(orient="records")


def write_outputs(result: RunResult, out_dir: str | Path) -> list[Path]:
    """Write the data series and its envelope; returns the files written."""
    config, frame = result.config, result.frame
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = config.experiment.value

    written: list[Path] = []
    data_file = None
    rows = None
    if config.format is OutputFormat.CSV:
        data_path = out / f"{stem}.csv"
        frame.to_csv(
            data_path,
            index=False,
            float_format=CSV_FLOAT_FORMAT,
            lineterminator="\n",
            encoding="utf-8",
        )
        written.append(data_path)
        data_file = data_path.name
        envelope_path = out / f"{stem}.envelope.json"
    else:
        rows = _records(frame)
        envelope_path = out / f"{stem}.json"

    envelope = ResultEnvelope(
        experiment=config.experiment,
        version=tool_version(),
        created_at=datetime.now(timezone.utc),
        master_seed=config.master_seed,
        config=config,
        config_hash=config.config_hash(),
        columns=[str(c) for c in frame.columns],
        n_rows=len(frame),
        data_file=data_file,
        rows=rows,
        warnings=result.warnings,
    )
    envelope_path.write_text(envelope.model_dump_json(indent=2) + "\n", encoding="utf-8")
    written.append(envelope_path)
    logger.info("wrote %s", ", ".join(str(p) for p in written))
    return written
