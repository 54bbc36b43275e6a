import math

import numpy as np

# Offset between the Celsius and kelvin scales.
ZERO_CELSIUS = 273.15

# Number of neighbouring floats tried when looking for a Celsius text that
# converts back to the exact kelvin value.
CELSIUS_SEARCH_STEPS = 8


def celsius_to_kelvin(t_c: float) -> float:
    """Convert a temperature from Celsius to kelvin."""
    return t_c + ZERO_CELSIUS


def kelvin_to_celsius(t_k: float) -> float:
    """Convert a temperature from kelvin to Celsius."""
    return t_k - ZERO_CELSIUS


def format_float(value: float) -> str:
    """Format a float as the shortest text that parses back to it."""
    return repr(float(value))


def format_celsius(t_k: float) -> str:
    """Format a kelvin temperature as Celsius text such that
    celsius_to_kelvin(float(text)) gives back t_k exactly."""
    t_k = float(t_k)
    if not math.isfinite(t_k):
        return format_float(kelvin_to_celsius(t_k))

    first = kelvin_to_celsius(t_k)
    candidates = [first]
    down = up = first
    for _ in range(CELSIUS_SEARCH_STEPS):
        down = math.nextafter(down, -math.inf)
        up = math.nextafter(up, math.inf)
        candidates += [down, up]

    for t_c in candidates:
        if celsius_to_kelvin(t_c) == t_k:
            return format_float(t_c)

    return format_float(first)


def inclusive_grid(start: float, stop: float, step: float) -> np.ndarray:
    """Evenly spaced grid from start to stop, both ends included."""
    n = int(round((stop - start) / step)) + 1
    return np.round(start + step * np.arange(max(n, 1)), 12)


def log_grid(low: float, high: float, n: int) -> np.ndarray:
    """Ascending logarithmic grid of n points between low and high.

    The points are the first n of the sequence high, low, then the
    log-midpoints of every interval, level by level. The grid of n points
    is therefore contained in the grid of n + 1 points, and for
    n = 2^m + 1 it is evenly spaced in log scale.
    """
    fractions = [1.0, 0.0]
    level = 1
    while len(fractions) < n:
        fractions += [(2 * j + 1) / 2 ** level
                      for j in range(2 ** (level - 1))]
        level += 1

    fractions = np.array(fractions[:n])
    return np.sort(low * (high / low) ** fractions)
