import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Tuple

import numpy as np
from scipy import optimize, stats

from errors import (
    DegenerateSpreadError, DimensionMismatchError, NotAStepError,
    UnderdeterminedError, ValidationError, ZeroModelError
)
from thermal.network import FosterStage, foster_response
from utils import log_grid
from validators import (
    value_non_negative, value_positive, values_finite
)

logger = logging.getLogger(__name__)

# Smallest power spread that still determines a slope (W).
MIN_POWER_SPREAD = 1e-12

# Largest initial rise of a step response, relative to its final rise.
MAX_INITIAL_RISE = 0.05

# Shortest fitted time constant, relative to the trace span.
MIN_TAU_RATIO = 1e-3


@dataclass(frozen=True)
class CalibrationSample:
    """Dissipated power and the steady-state temperature of every node."""
    p: float
    temps: Tuple[float, ...]

    def __post_init__(self) -> None:
        value_non_negative("p", self.p)
        values_finite("temps", self.temps)


@dataclass(frozen=True)
class CalibrationMap:
    """Power versus temperature samples of a calibration run."""
    ambient: float
    nodes: Tuple[str, ...]
    samples: Tuple[CalibrationSample, ...]

    def __post_init__(self) -> None:
        value_positive("ambient", self.ambient)
        if len(self.samples) == 0:
            raise ValidationError("samples", [], "at least one sample")
        for sample in self.samples:
            if len(sample.temps) != len(self.nodes):
                raise DimensionMismatchError(
                    "temps", len(self.nodes), len(sample.temps))

    @property
    def powers(self) -> np.ndarray:
        """Sample powers (W)."""
        return np.array([sample.p for sample in self.samples])

    @property
    def temps(self) -> np.ndarray:
        """Sample temperatures, one column per node (K)."""
        return np.array([sample.temps for sample in self.samples])


@dataclass(frozen=True)
class StaticFitResult:
    """Per-node straight line T = ambient_est + r * p."""
    nodes: Tuple[str, ...]
    r: Tuple[float, ...]
    ambient_est: Tuple[float, ...]
    residual_rms: Tuple[float, ...]
    r_squared: Tuple[float, ...]


@dataclass(frozen=True)
class DynamicFitResult:
    """Foster network fitted to the step response of one node."""
    node: str
    stages: Tuple[FosterStage, ...]
    residual_rms: float


class PowerEstimate(NamedTuple):
    """Estimated power and the per-node misfit of the estimate."""
    p: float
    discrepancy: Tuple[float, ...]


def fit_static(calibration: CalibrationMap) -> StaticFitResult:
    """Least-squares line through the (power, temperature) samples of
    every node."""
    p = calibration.powers
    distinct = len(np.unique(p))
    if distinct < 2:
        raise UnderdeterminedError("distinct powers", 2, distinct)
    spread = float(np.ptp(p))
    if spread < MIN_POWER_SPREAD:
        raise DegenerateSpreadError(spread)

    r, ambient, rms, r_squared = [], [], [], []
    for column in calibration.temps.T:
        line = stats.linregress(p, column)
        residuals = column - (line.intercept + line.slope * p)
        ss_res = float(np.sum(residuals ** 2))
        ss_tot = float(np.sum((column - np.mean(column)) ** 2))

        r.append(float(line.slope))
        ambient.append(float(line.intercept))
        rms.append(math.sqrt(ss_res / len(p)))
        r_squared.append(1 - ss_res / ss_tot if ss_tot > 0 else 1.0)

    return StaticFitResult(tuple(calibration.nodes), tuple(r),
                           tuple(ambient), tuple(rms), tuple(r_squared))


def estimate_power(fit: StaticFitResult, measured: Sequence[float],
                   ambient: float) -> PowerEstimate:
    """Power of a single heat source that best explains the measured node
    temperatures."""
    measured = np.asarray(measured, dtype=float)
    if measured.shape != (len(fit.nodes),):
        raise DimensionMismatchError("measured", len(fit.nodes),
                                     measured.size)

    r = np.array(fit.r)
    norm = float(r @ r)
    if norm == 0:
        raise ZeroModelError()

    rise = measured - ambient
    p = float(r @ rise) / norm
    return PowerEstimate(p, tuple((rise - r * p).tolist()))


def _step_basis(t: np.ndarray, taus: np.ndarray) -> np.ndarray:
    """Unit step responses of stages with the given time constants."""
    return -np.expm1(-t[:, np.newaxis] / taus[np.newaxis, :])


def fit_dynamic(time: Sequence[float], rise: Sequence[float], p_step: float,
                n_tau: int, node: str = "node") -> DynamicFitResult:
    """Foster network whose step response matches rise(t) / p_step.

    The time constants are fixed on a logarithmic grid over the trace span
    and the stage resistances solved by non-negative least squares.
    """
    time = np.asarray(time, dtype=float)
    rise = np.asarray(rise, dtype=float)
    value_positive("p_step", p_step)
    if n_tau < 1:
        raise ValidationError("n_tau", n_tau, ">= 1")
    if time.shape != rise.shape:
        raise DimensionMismatchError("rise", len(time), len(rise))
    if len(time) < n_tau:
        raise UnderdeterminedError("samples", n_tau, len(time))

    final = rise[-1]
    if final <= 0:
        raise NotAStepError("no temperature rise")
    if rise[0] > MAX_INITIAL_RISE * final:
        raise NotAStepError(
            "initial rise {0} K is above {1:.0%} of the final {2} K".format(
                rise[0], MAX_INITIAL_RISE, final))

    elapsed = time - time[0]
    span = elapsed[-1]
    if span <= 0:
        raise NotAStepError("trace has no duration")

    taus = log_grid(MIN_TAU_RATIO * span, span, n_tau)
    basis = _step_basis(elapsed, taus)
    weights, _ = optimize.nnls(basis, rise / p_step)

    residuals = rise - p_step * (basis @ weights)
    rms = math.sqrt(float(np.mean(residuals ** 2)))

    stages = tuple(FosterStage(float(w), float(tau / w))
                   for w, tau in zip(weights, taus) if w > 0)
    logger.debug("Kept %d of %d stages, residual %.3g K",
                 len(stages), n_tau, rms)

    return DynamicFitResult(node, stages, rms)


def zth_from_fit(fit: DynamicFitResult, t):
    """Step response of a fitted Foster network (K/W)."""
    return foster_response(fit.stages, t)
