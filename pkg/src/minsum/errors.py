"""Exception types raised across the package."""


class MinsumError(Exception):
    """Base class for all package errors."""


class EmptyCluster(MinsumError, ValueError):
    """A mean was requested for an empty point set."""


class InvalidLabeling(MinsumError, ValueError):
    """Labels are out of range or inconsistent with the dataset."""


class Mismatch(MinsumError, ValueError):
    """Two inputs disagree in size (points vs labels, centers vs k, ...)."""


class TooLarge(MinsumError, ValueError):
    """An exhaustive routine was asked to run above its size limit."""


class Infeasible(MinsumError):
    """Constraints admit no solution."""


class DegenerateDistribution(MinsumError):
    """A sampling distribution has no mass."""


class GuessInfeasible(Infeasible):
    """No assignment profile fits under the current optimum guess."""


class BoundsRoundingConflict(Infeasible):
    """Rounded lower bounds exceed the number of points."""


class EmptyPredictedCluster(MinsumError, ValueError):
    """A predicted cluster has no points."""


class InvalidAlpha(MinsumError, ValueError):
    """Error rate outside [0, 1/2)."""


class DuplicateSet(MinsumError, ValueError):
    """A set system contains the same set twice."""


class ParseError(MinsumError, ValueError):
    """A data file could not be parsed.

    The message carries the offending path and 1-based line number.
    """

    def __init__(self, path, line, message):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")
