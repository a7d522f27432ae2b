"""Exceptions shared across the package."""


class DataError(ValueError):
    """Malformed or unusable input data (files, tables, instances)."""


class TrainingError(RuntimeError):
    """Training could not produce a usable model."""
