"""Exception hierarchy.

Each class carries an ``exit_code`` used by the command-line front end.
"""


class HaarIntError(Exception):
    exit_code = 5


class InvalidInputError(HaarIntError, ValueError):
    exit_code = 4


class ParseError(HaarIntError, ValueError):
    exit_code = 2

    def __init__(self, message, position=None, expected=None):
        self.position = position
        self.expected = expected
        text = message
        if position is not None:
            text += f" at position {position}"
        if expected:
            text += f" (expected {expected})"
        super().__init__(text)


class DispatchError(HaarIntError, ValueError):
    """Integrand and measure do not fit together (unknown symbol, wrong family...)."""

    exit_code = 3


class MeasureError(DispatchError):
    """Invalid measure constraints: odd symplectic dimension, k > d for Stiefel, ..."""


class DimensionError(MeasureError):
    pass


class ArgumentError(MeasureError):
    """Operation requires a concrete dimension but got a symbolic one (or similar)."""


class UnsupportedFormError(HaarIntError, ValueError):
    exit_code = 3


class PoleError(HaarIntError, ZeroDivisionError):
    exit_code = 4

    def __init__(self, point):
        self.point = point
        super().__init__(f"rational function has a pole at d = {point}")


class SingularSystemError(HaarIntError, ArithmeticError):
    exit_code = 4


class DesignOrderError(HaarIntError, ValueError):
    exit_code = 4

    def __init__(self, q, t):
        self.q = q
        self.t = t
        super().__init__(
            f"balanced degree q={q} exceeds the design order t={t}; "
            "a t-design does not fix moments beyond t"
        )


class DegreeGuardError(HaarIntError, ValueError):
    exit_code = 4


class DegenerateSpectrumError(HaarIntError, ValueError):
    exit_code = 4


class NotRationalError(HaarIntError, ValueError):
    """The average is not a rational function of d (trace-moment step functions)."""

    exit_code = 4
