"""Closed-loop electro-thermal simulation.

The non-linear electrical block (the device model) is evaluated at the
junction temperature of every step; the linear thermal block (the Foster
networks) is integrated exactly over the step with the resulting power.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from device.mosfet import (
    DeviceParams, alpha_at, current_at, solve_vds_for_current, vth
)
from errors import (
    BelowThresholdError, ComplianceExceededError, NoConvergenceError,
    PyLossGenError, SweepError, UnsettledError, ValidationError
)
from thermal.calibration import CalibrationMap, CalibrationSample
from thermal.network import (
    ThermalModel, initial_state, node_temperatures, step,
    steady_state_temp, total_resistance
)
from validators import (
    value_less_than, value_non_negative, value_positive
)

logger = logging.getLogger(__name__)

# Share of the trace, at its end, that must be flat to call it settled.
SETTLE_WINDOW = 0.1

# Default relative spread allowed within the settle window.
SETTLE_TOL = 1e-4

# Convergence threshold of the steady-state fixed point (K).
FIXED_POINT_TOL = 1e-9

# Iteration budget of the steady-state fixed point.
FIXED_POINT_MAX_ITER = 500

# Smallest damping factor of the fixed-point iteration.
MIN_DAMPING = 2 ** -12


@dataclass(frozen=True)
class VoltageMode:
    """Gate and drain voltages both imposed by the supplies."""
    v_gs: float
    v_ds: float

    def __post_init__(self) -> None:
        value_non_negative("v_ds", self.v_ds)


@dataclass(frozen=True)
class CurrentMode:
    """Gate voltage imposed, drain current regulated by a supply with a
    voltage compliance."""
    v_gs: float
    i_set: float
    v_compliance: float

    def __post_init__(self) -> None:
        value_non_negative("i_set", self.i_set)
        value_positive("v_compliance", self.v_compliance)


# Type alias for the excitation of the device.
DriveMode = Union[VoltageMode, CurrentMode]


@dataclass(frozen=True)
class SimConfig:
    """Time grid and classification settings of a simulation.

    t_ambient, when given, replaces the ambient of the thermal model.
    """
    dt: float
    t_end: float
    runaway_temp: float
    junction_node: str
    t_ambient: Optional[float] = None

    def __post_init__(self) -> None:
        value_positive("dt", self.dt)
        value_less_than("dt", self.dt, "t_end", self.t_end)
        value_positive("runaway_temp", self.runaway_temp)
        if self.t_ambient is not None:
            value_positive("t_ambient", self.t_ambient)
            value_less_than("t_ambient", self.t_ambient,
                            "runaway_temp", self.runaway_temp)


@dataclass(eq=False)
class SimTrace:
    """Uniformly sampled waveforms of a simulation.

    temps holds one column per node, in kelvin. clamped marks the samples
    at which the current regulation was held at its compliance voltage.
    """
    nodes: Tuple[str, ...]
    time: np.ndarray
    v_gs: np.ndarray
    v_ds: np.ndarray
    i_ds: np.ndarray
    p: np.ndarray
    temps: np.ndarray
    clamped: np.ndarray

    def __len__(self) -> int:
        return len(self.time)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SimTrace):
            return NotImplemented
        return (tuple(self.nodes) == tuple(other.nodes) and all(
            np.array_equal(a, b) for a, b in zip(
                (self.time, self.v_gs, self.v_ds, self.i_ds, self.p,
                 self.temps),
                (other.time, other.v_gs, other.v_ds, other.i_ds, other.p,
                 other.temps))))

    def node_temps(self, node: str) -> np.ndarray:
        """Temperature series of one node (K)."""
        if node not in self.nodes:
            raise ValidationError("node", node,
                                  "one of {0}".format(list(self.nodes)))
        return self.temps[:, list(self.nodes).index(node)]


@dataclass(frozen=True)
class Stable:
    """Trace settled; steady values are means over the final window."""
    t_settle: float
    p: float
    t_j: float
    v_ds: float
    i_ds: float


@dataclass(frozen=True)
class Runaway:
    """Junction temperature reached the runaway threshold."""
    t_cross: float


@dataclass(frozen=True)
class ComplianceLimited:
    """Current regulation is held at the compliance voltage at the end."""
    t_hit: float


# Type alias for the outcome of classify.
StabilityVerdict = Union[Stable, Runaway, ComplianceLimited]


class SteadyState(NamedTuple):
    """Fixed point of the current-regulated electro-thermal loop."""
    p: float
    t_j: float
    v_ds: float
    i_ds: float
    iterations: int


def _electrical_point(device: DeviceParams, drive: DriveMode,
                      t_j: float) -> Tuple[float, float, bool]:
    """Drain voltage, drain current and clamp flag at junction
    temperature t_j."""
    if isinstance(drive, VoltageMode):
        return drive.v_ds, current_at(device, drive.v_gs, drive.v_ds, t_j), \
            False

    try:
        v_ds = solve_vds_for_current(device, drive.i_set, drive.v_gs, t_j,
                                     drive.v_compliance)
        return v_ds, drive.i_set, False
    except (BelowThresholdError, ComplianceExceededError):
        v_ds = drive.v_compliance
        return v_ds, current_at(device, drive.v_gs, v_ds, t_j), True


def _with_ambient(thermal: ThermalModel,
                  t_ambient: Optional[float]) -> ThermalModel:
    """Thermal model with its ambient replaced, if one is given."""
    if t_ambient is None or t_ambient == thermal.t_ambient:
        return thermal
    return replace(thermal, t_ambient=t_ambient)


def simulate(device: DeviceParams, thermal: ThermalModel, drive: DriveMode,
             cfg: SimConfig) -> SimTrace:
    """Simulate the electro-thermal loop from ambient over cfg.t_end."""
    thermal = _with_ambient(thermal, cfg.t_ambient)
    junction = thermal.index(cfg.junction_node)
    if len(thermal.stages[junction]) == 0:
        raise ValidationError("junction_node", cfg.junction_node,
                              "a node with Foster stages")
    value_less_than("t_ambient", thermal.t_ambient,
                    "runaway_temp", cfg.runaway_temp)

    n = int(math.floor(cfg.t_end / cfg.dt + 1e-9)) + 1
    time = cfg.dt * np.arange(n)
    v_ds = np.empty(n)
    i_ds = np.empty(n)
    p = np.empty(n)
    temps = np.empty((n, len(thermal.nodes)))
    clamped = np.empty(n, dtype=bool)

    state = initial_state(thermal)
    for k in range(n):
        temps[k] = node_temperatures(thermal, state)
        v_ds[k], i_ds[k], clamped[k] = _electrical_point(
            device, drive, temps[k, junction])
        p[k] = v_ds[k] * i_ds[k]

        if k > 0 and clamped[k] != clamped[k - 1]:
            logger.debug("Compliance clamp %s at t=%g s",
                         "engaged" if clamped[k] else "released", time[k])

        state = step(thermal, state, p[k], cfg.dt)

    logger.info("Simulated %d samples, final T_j=%.3f K, P=%.4g W",
                n, temps[-1, junction], p[-1])

    return SimTrace(thermal.nodes, time, np.full(n, float(drive.v_gs)),
                    v_ds, i_ds, p, temps, clamped)


def _relative_deviation(series: np.ndarray, reference: float) -> np.ndarray:
    """Deviation of the series from reference, relative to it."""
    if reference == 0:
        return np.abs(series)
    return np.abs(series - reference) / abs(reference)


def classify(trace: SimTrace, cfg: SimConfig,
             settle_tol: float = SETTLE_TOL) -> StabilityVerdict:
    """Classify a trace as runaway, compliance-limited or stable."""
    if len(trace) == 0:
        raise ValidationError("trace", 0, "at least one sample")
    value_positive("settle_tol", settle_tol)

    t_j = trace.node_temps(cfg.junction_node)

    crossed = np.flatnonzero(t_j >= cfg.runaway_temp)
    if crossed.size:
        return Runaway(float(trace.time[crossed[0]]))

    if trace.clamped[-1]:
        released = np.flatnonzero(~trace.clamped)
        first = released[-1] + 1 if released.size else 0
        return ComplianceLimited(float(trace.time[first]))

    window = max(1, int(math.ceil(SETTLE_WINDOW * len(trace))))
    steady_p = float(np.mean(trace.p[-window:]))
    steady_t = float(np.mean(t_j[-window:]))

    inside = (_relative_deviation(t_j, steady_t) < settle_tol) \
        & (_relative_deviation(trace.p, steady_p) < settle_tol)
    if not np.all(inside[-window:]):
        spread = max(np.ptp(t_j[-window:]) / steady_t,
                     np.ptp(trace.p[-window:]) / steady_p
                     if steady_p else 0.0)
        raise UnsettledError(spread, settle_tol)

    outside = np.flatnonzero(~inside)
    first = outside[-1] + 1 if outside.size else 0

    return Stable(float(trace.time[first]), steady_p, steady_t,
                  float(np.mean(trace.v_ds[-window:])),
                  float(np.mean(trace.i_ds[-window:])))


def regulation_onset(trace: SimTrace) -> Optional[float]:
    """Time at which the current regulation took over for good."""
    if len(trace) == 0 or trace.clamped[-1]:
        return None
    clamped = np.flatnonzero(trace.clamped)
    first = clamped[-1] + 1 if clamped.size else 0
    return float(trace.time[first])


def local_stability(device: DeviceParams, thermal: ThermalModel, v_gs: float,
                    v_ds: float, t_j: float,
                    node: Optional[str] = None) -> float:
    """Small-signal thermal loop gain v_ds * alpha * R_th under voltage
    drive. Above one the loop runs away."""
    value_positive("t_j", t_j)
    overdrive = v_gs - vth(device, t_j)
    if v_ds < overdrive:
        raise ValidationError(
            "v_ds", v_ds, ">= V_GS - V_th ({0}) for saturation".format(
                overdrive))

    node = thermal.nodes[0] if node is None else node
    return v_ds * alpha_at(device, v_gs, v_ds, t_j) \
        * total_resistance(thermal, node)


def steady_state_operating_point(device: DeviceParams, thermal: ThermalModel,
                                 drive: CurrentMode,
                                 junction_node: Optional[str] = None
                                 ) -> SteadyState:
    """Steady state of the current-regulated loop by damped fixed-point
    iteration on the junction temperature."""
    if not isinstance(drive, CurrentMode):
        raise ValidationError("drive", type(drive).__name__, "CurrentMode")

    t_ambient = thermal.t_ambient
    if drive.i_set == 0:
        return SteadyState(0.0, t_ambient, 0.0, 0.0, 0)

    junction_node = thermal.nodes[0] if junction_node is None \
        else junction_node
    r_total = total_resistance(thermal, junction_node)

    def evaluate(t_j: float):
        v_ds, i_ds, clamped = _electrical_point(device, drive, t_j)
        p = v_ds * i_ds
        return t_ambient + r_total * p - t_j, p, v_ds, i_ds, clamped

    t_j = t_ambient
    residual, p, v_ds, i_ds, clamped = evaluate(t_j)
    damping = 1.0

    for iteration in range(1, FIXED_POINT_MAX_ITER + 1):
        t_next = t_j + damping * residual
        next_residual, p, v_ds, i_ds, clamped = evaluate(t_next)
        logger.debug("Fixed point %d: T=%.12g K, residual=%.3g K",
                     iteration, t_next, next_residual)

        if abs(next_residual) < FIXED_POINT_TOL:
            if clamped:
                raise ComplianceExceededError(drive.i_set,
                                              drive.v_compliance)
            return SteadyState(p, t_next + next_residual, v_ds, i_ds,
                               iteration)

        if abs(next_residual) >= abs(residual):
            damping = max(damping / 2, MIN_DAMPING)

        t_j, residual = t_next, next_residual

    raise NoConvergenceError("steady-state operating point",
                             FIXED_POINT_MAX_ITER)


def sweep_calibration_points(device: DeviceParams, thermal: ThermalModel,
                             points: Sequence[CurrentMode], cfg: SimConfig,
                             noise_sigma: float = 0.0,
                             seed: Optional[int] = None) -> CalibrationMap:
    """Steady-state (power, node temperatures) sample for every current
    setpoint. Failing points are skipped."""
    if len(points) == 0:
        raise ValidationError("points", [], "at least one point")
    value_non_negative("noise_sigma", noise_sigma)

    thermal = _with_ambient(thermal, cfg.t_ambient)
    rng = np.random.default_rng(seed)
    sources = np.zeros(thermal.sources)

    samples: List[CalibrationSample] = []
    errors: List[PyLossGenError] = []
    for point in points:
        try:
            state = steady_state_operating_point(device, thermal, point,
                                                 cfg.junction_node)
        except PyLossGenError as e:
            logger.warning("Sweep point %s skipped: %s", point, e)
            errors.append(e)
            continue

        sources[0] = state.p
        temps = steady_state_temp(thermal, sources)
        if noise_sigma > 0:
            temps = temps + rng.normal(0.0, noise_sigma, len(temps))
        samples.append(CalibrationSample(state.p, tuple(temps)))
        logger.info("Sweep point I=%g A: P=%.6g W", point.i_set, state.p)

    if not samples:
        raise SweepError(errors)

    samples.sort(key=lambda sample: sample.p)
    return CalibrationMap(thermal.t_ambient, thermal.nodes, tuple(samples))
