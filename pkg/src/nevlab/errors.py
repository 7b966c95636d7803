"""Exception hierarchy shared by every nevlab module."""

from __future__ import annotations


class NevlabError(Exception):
    """Base class for all library errors."""


class DomainError(NevlabError, ValueError):
    """Argument outside the set where a transform or identity is defined."""


class InvalidMeasure(NevlabError, ValueError):
    pass


class NonPositiveWeight(InvalidMeasure):
    pass


class NotAProbability(InvalidMeasure):
    pass


class NotAPositiveMeasure(NevlabError, ValueError):
    pass


class NotAPole(NevlabError, ValueError):
    pass


class MultiplePole(NevlabError, ValueError):
    pass


class PoleEvaluation(NevlabError, ZeroDivisionError):
    pass


class ConvergenceError(NevlabError, RuntimeError):
    pass


class RankDeficient(NevlabError, ValueError):
    pass


class ResidualTooLarge(NevlabError, ValueError):
    pass


class DistinctnessViolated(NevlabError, ValueError):
    pass


class SupportExhausted(NevlabError, ValueError):
    pass


class ConsistencyError(NevlabError, RuntimeError):
    """Two independent evaluations of the same quantity disagree."""
