""" Exceptions raised by dhymlib

Every exception carries an ``exit_code`` used by the command line interface.
"""


class DhymError(Exception):
    """Base class of all dhymlib errors"""

    exit_code = 1


class MetricNotPositive(DhymError, ValueError):
    """A Hermitian metric is not positive definite"""


class BadOrder(DhymError, ValueError):
    """Angle order k outside 1..n"""


class DegenerateFrame(DhymError, ArithmeticError):
    """Orthonormalization of a random frame failed"""


class HypothesisViolated(DhymError, ValueError):
    """An operation was called outside of its hypotheses"""

    exit_code = 2


class DegreeOverflow(DhymError, ValueError):
    """Wedge product beyond the top degree"""


class DegenerateVolume(DhymError, ArithmeticError):
    """The total complex volume vanishes"""


class NoSupercriticalPhase(DhymError, ValueError):
    """No representative of the phase lies in (0, pi)"""


class UnknownCycle(DhymError, KeyError):
    """Subvariety label not declared in the ring"""

    def __str__(self):
        return Exception.__str__(self)


class ConeEscape(DhymError, RuntimeError):
    """Newton iterates left the cone and step halving could not recover"""

    exit_code = 3


class MaxIterations(DhymError, RuntimeError):
    """Newton did not reach the tolerance"""

    exit_code = 4


class PathBreak(DhymError, RuntimeError):
    """Continuity path failed at parameter ``s``"""

    def __init__(self, s, reason=""):
        self.s = s
        self.reason = reason
        super().__init__(f"continuity path broke at s = {s:.6g}: {reason}")


class PathHypothesisViolated(PathBreak, HypothesisViolated):
    """Continuity path left the hypotheses at parameter ``s``"""

    exit_code = 2


class BadMeasure(DhymError, ValueError):
    """Fiber measure with a nonpositive weight or vertical mass"""


class ResolutionError(DhymError, ValueError):
    """Chart grid too coarse or radius too large"""

    exit_code = 2


class SeparationViolated(DhymError, ValueError):
    """Gluing separation condition fails at ``location``"""

    def __init__(self, message, location=None):
        self.location = location
        super().__init__(message if location is None else f"{message} at {location}")


class ConfigError(DhymError, ValueError):
    """Invalid configuration value"""

    exit_code = 2

    def __init__(self, field, message="invalid value"):
        self.field = field
        super().__init__(f"config field <{field}>: {message}")


class ParseError(DhymError, ValueError):
    """Malformed data file"""

    exit_code = 2

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
