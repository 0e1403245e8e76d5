from .config import Configuration, ConfigError, build_domain, load_config
from .analyzer import (
    AbortAnalysis,
    AnalysisOptions,
    Analyzer,
    InternalError,
    analyze,
)

__all__ = [
    "AbortAnalysis",
    "AnalysisOptions",
    "Analyzer",
    "ConfigError",
    "Configuration",
    "InternalError",
    "analyze",
    "build_domain",
    "load_config",
]
