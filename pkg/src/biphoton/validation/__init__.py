from .validator import InvalidRunConfig, LoadError, RunConfigValidator

__all__ = ["InvalidRunConfig", "LoadError", "RunConfigValidator"]
