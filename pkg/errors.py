from typing import Any, List, Optional


class PyLossGenError(Exception):
    """Base class of every error raised by the simulator."""


class ValidationError(PyLossGenError):
    """Raised if a value violates the invariant of its field."""

    def __init__(self, name: str, value: Any, constraint: str) -> None:
        self.name = name
        self.value = value
        self.constraint = constraint

    def __str__(self):
        return "{0} value ({1}) is not valid: must be {2}".format(
            self.name, self.value, self.constraint)


class ParseError(PyLossGenError):
    """Raised for malformed configuration text."""

    def __init__(self, message: str, line: Optional[int] = None,
                 field: Optional[str] = None) -> None:
        self.message = message
        self.line = line
        self.field = field

    def __str__(self):
        where = []
        if self.line is not None:
            where.append("line {0}".format(self.line))
        if self.field is not None:
            where.append("field '{0}'".format(self.field))
        if not where:
            return self.message
        return "{0} ({1})".format(self.message, ", ".join(where))


class DegenerateTCPError(PyLossGenError):
    """Raised if the device has no finite temperature compensation point."""

    def __init__(self, reason: str) -> None:
        self.reason = reason

    def __str__(self):
        return "No finite temperature compensation point: {0}".format(
            self.reason)


class BelowThresholdError(PyLossGenError):
    """Raised if a current is requested from a device that is off."""

    def __init__(self, v_gs: float, v_th: float) -> None:
        self.v_gs = v_gs
        self.v_th = v_th

    def __str__(self):
        return "V_GS ({0} V) is not above threshold ({1} V)".format(
            self.v_gs, self.v_th)


class ComplianceExceededError(PyLossGenError):
    """Raised if the regulated current needs more than the compliance
    voltage."""

    def __init__(self, i_target: float, v_compliance: float) -> None:
        self.i_target = i_target
        self.v_compliance = v_compliance

    def __str__(self):
        return "{0} A cannot be reached within the {1} V compliance".format(
            self.i_target, self.v_compliance)


class DimensionMismatchError(PyLossGenError):
    """Raised if a vector length does not match the model."""

    def __init__(self, name: str, expected: int, got: int) -> None:
        self.name = name
        self.expected = expected
        self.got = got

    def __str__(self):
        return "{0} has length {1}, expected {2}".format(
            self.name, self.got, self.expected)


class UnknownNodeError(PyLossGenError):
    """Raised if a thermal node name is not in the model."""

    def __init__(self, node: str, known: List[str]) -> None:
        self.node = node
        self.known = known

    def __str__(self):
        return "Node '{0}' is unknown. Known nodes: {1}".format(
            self.node, self.known)


class UnsettledError(PyLossGenError):
    """Raised if a trace neither settles nor runs away."""

    def __init__(self, spread: float, tolerance: float) -> None:
        self.spread = spread
        self.tolerance = tolerance

    def __str__(self):
        return ("Trace has not settled: relative spread {0:.3g} of the "
                "final window exceeds {1:.3g}").format(
            self.spread, self.tolerance)


class NoConvergenceError(PyLossGenError):
    """Raised if an iteration does not converge."""

    def __init__(self, what: str, iterations: int) -> None:
        self.what = what
        self.iterations = iterations

    def __str__(self):
        return "{0} did not converge in {1} iterations".format(
            self.what, self.iterations)


class UnderdeterminedError(PyLossGenError):
    """Raised if there is not enough data for a fit."""

    def __init__(self, what: str, needed: int, got: int) -> None:
        self.what = what
        self.needed = needed
        self.got = got

    def __str__(self):
        return "Fit needs at least {0} {1}, got {2}".format(
            self.needed, self.what, self.got)


class DegenerateSpreadError(PyLossGenError):
    """Raised if the power samples are too close together to fit a
    slope."""

    def __init__(self, spread: float) -> None:
        self.spread = spread

    def __str__(self):
        return "Power spread ({0} W) is too small for a fit".format(
            self.spread)


class NotAStepError(PyLossGenError):
    """Raised if a trace is not a step response from rest."""

    def __init__(self, reason: str) -> None:
        self.reason = reason

    def __str__(self):
        return "Trace is not a step response: {0}".format(self.reason)


class ZeroModelError(PyLossGenError):
    """Raised if a fitted model cannot be inverted."""

    def __str__(self):
        return "All thermal resistances are zero, power is not observable"


class SchemaError(PyLossGenError):
    """Raised if a CSV file does not follow its column layout."""

    def __init__(self, message: str) -> None:
        self.message = message

    def __str__(self):
        return self.message


class NonMonotonicTimeError(PyLossGenError):
    """Raised if trace times are not strictly increasing."""

    def __init__(self, row: int) -> None:
        self.row = row

    def __str__(self):
        return "time_s is not strictly increasing at line {0}".format(
            self.row)


class SweepError(PyLossGenError):
    """Raised if every point of a calibration sweep failed."""

    def __init__(self, errors: List[Exception]) -> None:
        self.errors = errors

    def __str__(self):
        return "All {0} sweep points failed; first error: {1}".format(
            len(self.errors), self.errors[0] if self.errors else None)
