"""Exception types shared across the package.

Every contract violation raises a named exception so callers (and the CLI's
exit-code mapping) can tell usage problems apart from data problems.
"""

from __future__ import annotations


class BotforestError(Exception):
    """Base class for all package errors."""


class MalformedJson(BotforestError):
    """Input line is not valid JSON."""


class SchemaViolation(BotforestError):
    """A record violates the corpus schema; names the offending field."""

    def __init__(self, field: str, message: str = "", line: int | None = None):
        self.field = field
        self.line = line
        loc = f" (line {line})" if line is not None else ""
        detail = f": {message}" if message else ""
        super().__init__(f"schema violation in field '{field}'{loc}{detail}")


class PreconditionViolation(BotforestError):
    """An operation was called with arguments outside its contract."""


class RegistryMismatch(BotforestError):
    """Feature vector / model / registry version hashes disagree."""


class EmptyHistogram(BotforestError):
    """Entropy of a histogram with no positive counts is undefined."""


class EmptyNode(BotforestError):
    """Gini impurity of an empty node is undefined."""


class SingleClassCorpus(BotforestError):
    """Forest training needs both labels present."""


class SingleClassInput(BotforestError):
    """Calibration / AUC need at least one example of each label."""


class NonConvergence(BotforestError):
    """Iterative fit failed to converge within the iteration cap."""


class EmptyClass(BotforestError):
    """A declared bot class has no training examples."""

    def __init__(self, class_name: str):
        self.class_name = class_name
        super().__init__(f"bot class '{class_name}' has no examples")


class NoHumans(BotforestError):
    """Ensemble training needs human examples to balance against."""


class DuplicateClass(BotforestError):
    """A specialist with this class name already exists."""


class EmptyNewData(BotforestError):
    """Adaptation requires at least one new bot example."""


class PartitionError(BotforestError):
    """A bot example maps to zero or more than one declared class."""


class NoPositiveLabels(BotforestError):
    """Precision/recall need at least one positive label."""


class LengthMismatch(BotforestError):
    """Paired score vectors must have equal length."""


class ZeroVariance(BotforestError):
    """Rank correlation of a constant vector is undefined."""


class TooFewExamples(BotforestError):
    """Not enough examples per class to build stratified folds."""


class DegenerateResample(BotforestError):
    """Bootstrap resamples kept losing one of the label classes."""


class InsufficientHoldout(BotforestError):
    """Hold-out corpus too small for the requested adaptation budget."""


class UsageError(BotforestError):
    """Bad command-line arguments."""
