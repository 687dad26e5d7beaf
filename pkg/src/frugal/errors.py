"""Exception types shared across the package."""


class FrugalError(Exception):
    """Base class for all package errors."""


class DatasetError(FrugalError):
    """Malformed input data: parse failures, schema mismatches, bad values."""


class TrainingError(FrugalError):
    """A learner's training preconditions were not met."""


class UnsupportedScoreError(FrugalError):
    """The requested score function cannot be computed on this data."""


class ConfigError(FrugalError):
    """Invalid experiment or CLI configuration."""
