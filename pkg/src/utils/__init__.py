from .errors import (
    InvalidInputError,
    NumericalQualityError,
    NumericalQualityWarning,
    ResourceLimitError,
    SpinPrepError,
)
from .log_formatter import LOG_DATE_FORMAT, LOG_FORMAT, UTCKeyValueFormatter, configure_logging
from .optimize import golden_section_maximize, golden_section_minimize

__all__ = [
    "InvalidInputError",
    "NumericalQualityError",
    "NumericalQualityWarning",
    "ResourceLimitError",
    "SpinPrepError",
    "LOG_DATE_FORMAT",
    "LOG_FORMAT",
    "UTCKeyValueFormatter",
    "configure_logging",
    "golden_section_maximize",
    "golden_section_minimize",
]
