"""Exception types raised across the pipeline."""

from __future__ import annotations


class TradeMotifsError(Exception):
    """Base class for all pipeline errors."""


class EmptyGraphError(TradeMotifsError):
    """Raised when an operation receives no usable records or edges."""


class CsvFormatError(TradeMotifsError):
    """Raised when an input CSV is missing required columns."""


class NoDiscontinuityError(TradeMotifsError):
    """Raised when no empty-bin gap exists and no manual threshold was given."""


class InvalidMotifIdError(TradeMotifsError):
    """Raised for adjacency codes that are disconnected or carry self-loops."""


class EnsembleError(TradeMotifsError):
    """Raised when too many null-model replicates fail."""


class StageError(TradeMotifsError):
    """Wraps a failure with the pipeline stage it occurred in."""

    def __init__(self, stage: str, message: str):
        super().__init__(message)
        self.stage = stage

    def __str__(self) -> str:
        return f"[{self.stage}] {super().__str__()}"
