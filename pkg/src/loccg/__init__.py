"""Quantum and classical values of grouped THRESHOLD XOR games."""
from loccg.errors import (
    CapacityError,
    ConsistencyError,
    ConvergenceError,
    DomainError,
    ExtractionError,
    LoccgError,
)
from loccg.games import Grouping, ThresholdGame, and_game, majority
from loccg.reduction import BiasedGame, reduce

__version__ = "0.1.0"

__all__ = [
    "BiasedGame",
    "CapacityError",
    "ConsistencyError",
    "ConvergenceError",
    "DomainError",
    "ExtractionError",
    "Grouping",
    "LoccgError",
    "ThresholdGame",
    "and_game",
    "majority",
    "reduce",
]
