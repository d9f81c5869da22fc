from .execute import RunResult, load_config, run_experiment, tool_version, write_outputs
from .experiments import PIPELINES
from .models import ExperimentConfig, ExperimentKind, Grid, OutputFormat, ResultEnvelope, WarningRecord
from .selftest import CheckResult, SelftestReport, run_selftest

__all__ = [
    "PIPELINES",
    "CheckResult",
    "ExperimentConfig",
    "ExperimentKind",
    "Grid",
    "OutputFormat",
    "ResultEnvelope",
    "RunResult",
    "SelftestReport",
    "WarningRecord",
    "load_config",
    "run_experiment",
    "run_selftest",
    "tool_version",
    "write_outputs",
]
