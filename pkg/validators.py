import math
from typing import Any, Iterable, List

from errors import ValidationError


def value_positive(value_name: str, value: float) -> None:
    """Validate whether the value is finite and strictly positive."""
    if not math.isfinite(value) or value <= 0:
        raise ValidationError(value_name, value, "> 0")


def value_non_negative(value_name: str, value: float) -> None:
    """Validate whether the value is finite and not negative."""
    if not math.isfinite(value) or value < 0:
        raise ValidationError(value_name, value, ">= 0")


def value_non_positive(value_name: str, value: float) -> None:
    """Validate whether the value is finite and not positive."""
    if not math.isfinite(value) or value > 0:
        raise ValidationError(value_name, value, "<= 0")


def value_finite(value_name: str, value: float) -> None:
    """Validate whether the value is a finite number."""
    if not math.isfinite(value):
        raise ValidationError(value_name, value, "finite")


def values_finite(value_name: str, values: Iterable[float]) -> None:
    """Validate whether all values are finite numbers."""
    for value in values:
        value_finite(value_name, value)


def value_less_than(value_name: str, value: float, bound_name: str,
                    bound: float) -> None:
    """Validate whether the value is strictly below another value."""
    if not value < bound:
        raise ValidationError(
            value_name, value, "< {0} ({1})".format(bound_name, bound))


def value_in_list(value_name: str, value: Any, allowed: List[Any]) -> None:
    """Validate whether the value is in the list of allowed values."""
    if value not in allowed:
        raise ValidationError(
            value_name, value, "one of {0}".format(allowed))
