"""Temperature dependent level-1 MOSFET model.

The drain current follows the square law of the saturation region with a
power-law mobility and a linearly falling threshold voltage, so that both
the temperature coefficient of the current and the temperature
compensation point (TCP) have closed forms.
"""
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import optimize

from errors import (
    BelowThresholdError, ComplianceExceededError,
    DegenerateTCPError, ValidationError
)
from validators import value_finite, value_positive, value_non_negative

# Reference temperature of the parameter set (25 °C).
T_REF = 298.15

# Absolute tolerance of the drain voltage bisection (V).
VDS_XTOL = 1e-14

# Relative tolerance of the drain voltage bisection.
VDS_RTOL = 4 * np.finfo(float).eps

# Absolute tolerance of the TCP root find (V).
TCP_XTOL = 1e-13

# Type alias for a (V_TCP, I_TCP) pair.
TCPPoint = Tuple[float, float]


@dataclass(frozen=True)
class DeviceParams:
    """Parameters of the temperature dependent square-law model.

    The defaults form the reference set: 1 A at V_GS = 3.55 V and 25 °C.
    """
    c_ox: float = 0.02
    w_cell: float = 4 / 45
    l_ch: float = 1e-6
    mu0: float = 0.05
    t_ref: float = T_REF
    mobility_exp: float = 2.2
    vth0: float = 3.4
    vth_tempco: float = 0.008
    lambda_: float = 0.0

    def __post_init__(self) -> None:
        value_positive("c_ox", self.c_ox)
        value_positive("w_cell", self.w_cell)
        value_positive("l_ch", self.l_ch)
        value_positive("mu0", self.mu0)
        value_positive("t_ref", self.t_ref)
        value_non_negative("mobility_exp", self.mobility_exp)
        value_non_negative("vth_tempco", self.vth_tempco)
        value_non_negative("lambda", self.lambda_)
        value_finite("vth0", self.vth0)

    @property
    def gain(self) -> float:
        """Gain factor K = mu0 * C_ox * W / (2 L) at the reference
        temperature (A/V^2)."""
        return 0.5 * self.mu0 * self.c_ox * self.w_cell / self.l_ch


@dataclass(frozen=True)
class OperatingPoint:
    """Bias and junction temperature of the device."""
    v_gs: float
    v_ds: float
    t_j: float

    def __post_init__(self) -> None:
        value_non_negative("v_ds", self.v_ds)
        value_positive("t_j", self.t_j)


@dataclass(frozen=True)
class OutputCurve:
    """One output characteristic with its safe operating area overlay."""
    v_gs: float
    v_ds: np.ndarray
    i_d: np.ndarray
    clipped: np.ndarray
    soa_current: Optional[np.ndarray]


def vth(params: DeviceParams, t: float) -> float:
    """Threshold voltage at temperature t."""
    return params.vth0 - params.vth_tempco * (t - params.t_ref)


def mobility(params: DeviceParams, t: float) -> float:
    """Electron mobility at temperature t."""
    return params.mu0 * (t / params.t_ref) ** (-params.mobility_exp)


def gain(params: DeviceParams, t: float) -> float:
    """Gain factor K at temperature t (A/V^2)."""
    return 0.5 * mobility(params, t) * params.c_ox * params.w_cell \
        / params.l_ch


def current_at(params: DeviceParams, v_gs: float, v_ds: float,
               t: float) -> float:
    """Piecewise level-1 drain current at explicit bias and temperature."""
    overdrive = v_gs - vth(params, t)
    if overdrive <= 0:
        return 0.0

    k = gain(params, t)
    clm = 1 + params.lambda_ * v_ds

    # One operation order in both branches keeps I_D monotone in v_ds.
    if v_ds < overdrive:
        d = overdrive - v_ds
        return k * (overdrive * overdrive - d * d) * clm

    return k * (overdrive * overdrive) * clm


def alpha_at(params: DeviceParams, v_gs: float, v_ds: float,
             t: float) -> float:
    """Analytic dI_D/dT of the piecewise model at fixed bias."""
    overdrive = v_gs - vth(params, t)
    if overdrive <= 0:
        return 0.0

    k = gain(params, t)
    dk_dt = -params.mobility_exp * k / t
    clm = 1 + params.lambda_ * v_ds

    if v_ds < overdrive:
        return 2 * clm * (dk_dt * (overdrive * v_ds - v_ds * v_ds / 2)
                          + k * params.vth_tempco * v_ds)

    return clm * k * overdrive * (
        2 * params.vth_tempco - params.mobility_exp * overdrive / t)


def drain_current(params: DeviceParams, op: OperatingPoint) -> float:
    """Drain current at the operating point (A)."""
    return current_at(params, op.v_gs, op.v_ds, op.t_j)


def alpha(params: DeviceParams, op: OperatingPoint) -> float:
    """Temperature coefficient of the drain current (A/K)."""
    return alpha_at(params, op.v_gs, op.v_ds, op.t_j)


def saturation_current(params: DeviceParams, v_gs: float, t: float) -> float:
    """Saturation current without channel-length modulation (A)."""
    overdrive = v_gs - vth(params, t)
    if overdrive <= 0:
        return 0.0
    return gain(params, t) * (overdrive * overdrive)


def _check_tcp_exists(params: DeviceParams) -> None:
    """Raise if alpha never changes sign above threshold."""
    if params.vth_tempco == 0:
        raise DegenerateTCPError(
            "threshold tempco is zero, alpha < 0 everywhere above threshold")
    if params.mobility_exp == 0:
        raise DegenerateTCPError(
            "mobility exponent is zero, alpha > 0 everywhere above threshold")


def tcp(params: DeviceParams, t: float) -> TCPPoint:
    """Temperature compensation point (V_TCP, I_TCP) at temperature t."""
    _check_tcp_exists(params)
    v_tcp = vth(params, t) + 2 * params.vth_tempco * t / params.mobility_exp
    return v_tcp, saturation_current(params, v_tcp, t)


def tcp_numeric(params: DeviceParams, t: float,
                v_ds: Optional[float] = None) -> float:
    """V_TCP found as the root of the saturation alpha."""
    _check_tcp_exists(params)
    v_th = vth(params, t)
    overdrive_tcp = 2 * params.vth_tempco * t / params.mobility_exp
    low = v_th + 1e-6 * overdrive_tcp
    high = v_th + 2 * overdrive_tcp

    # Keep every bracketed point in saturation.
    v_ds_sat = max(v_ds or 0.0, 2 * overdrive_tcp)

    return optimize.brentq(
        lambda v_gs: alpha_at(params, v_gs, v_ds_sat, t),
        low, high, xtol=TCP_XTOL)


def unstable_range(params: DeviceParams, t: float) -> Tuple[float, float]:
    """V_GS interval in which alpha is positive (thermally unstable)."""
    v_tcp, _ = tcp(params, t)
    return vth(params, t), v_tcp


def solve_vds_for_current(params: DeviceParams, i_target: float, v_gs: float,
                          t: float, v_compliance: float) -> float:
    """Smallest drain voltage within the compliance that drives i_target."""
    value_non_negative("i_target", i_target)
    value_positive("v_compliance", v_compliance)

    if i_target == 0:
        return 0.0

    v_th = vth(params, t)
    if v_gs <= v_th:
        raise BelowThresholdError(v_gs, v_th)

    def residual(v_ds: float) -> float:
        return current_at(params, v_gs, v_ds, t) - i_target

    if residual(v_compliance) < 0:
        raise ComplianceExceededError(i_target, v_compliance)

    # The current is flat in saturation when lambda is zero, so a target
    # reached at the saturation edge is bracketed below it.
    edge = min(v_gs - v_th, v_compliance)
    if residual(edge) >= 0:
        return optimize.bisect(residual, 0.0, edge,
                               xtol=VDS_XTOL, rtol=VDS_RTOL)

    return optimize.bisect(residual, edge, v_compliance,
                           xtol=VDS_XTOL, rtol=VDS_RTOL)


def _validate_grid(name: str, grid: np.ndarray, min_points: int) -> None:
    """Validate that a sweep grid is long enough and ascending."""
    if grid.ndim != 1 or len(grid) < min_points:
        raise ValidationError(
            name, grid.tolist(), "at least {0} points".format(min_points))
    if np.any(np.diff(grid) <= 0):
        raise ValidationError(name, grid.tolist(), "strictly ascending")


def transfer_curve(params: DeviceParams, v_ds: float, t: float,
                   v_gs_grid) -> Tuple[np.ndarray, np.ndarray]:
    """Drain current over a V_GS sweep at fixed V_DS and temperature."""
    v_gs_grid = np.asarray(v_gs_grid, dtype=float)
    _validate_grid("v_gs_grid", v_gs_grid, 1)
    currents = np.array([current_at(params, v_gs, v_ds, t)
                         for v_gs in v_gs_grid])
    return v_gs_grid, currents


def output_curve(params: DeviceParams, v_gs: float, t: float, v_ds_grid,
                 soa_power_limit: Optional[float] = None) -> OutputCurve:
    """Drain current over a V_DS sweep, flagging points beyond the power
    limit."""
    v_ds_grid = np.asarray(v_ds_grid, dtype=float)
    _validate_grid("v_ds_grid", v_ds_grid, 2)
    if v_ds_grid[0] < 0:
        raise ValidationError("v_ds_grid", v_ds_grid[0], ">= 0")

    currents = np.array([current_at(params, v_gs, v_ds, t)
                         for v_ds in v_ds_grid])

    if soa_power_limit is None:
        clipped = np.zeros(len(v_ds_grid), dtype=bool)
        soa_current = None
    else:
        value_positive("soa_power_limit", soa_power_limit)
        clipped = v_ds_grid * currents > soa_power_limit
        with np.errstate(divide='ignore'):
            soa_current = np.where(v_ds_grid > 0,
                                   soa_power_limit / v_ds_grid, np.inf)

    return OutputCurve(v_gs, v_ds_grid, currents, clipped, soa_current)


def loss_current_comparison(params: DeviceParams, p_target: float,
                            v_gs: float, t: float,
                            r_ds_on: float) -> Tuple[float, float, float]:
    """Current needed for p_target in a fully enhanced channel versus the
    current and drain voltage that give the same loss at v_gs."""
    value_positive("p_target", p_target)
    value_positive("r_ds_on", r_ds_on)

    v_th = vth(params, t)
    if v_gs <= v_th:
        raise BelowThresholdError(v_gs, v_th)

    i_ohmic = math.sqrt(p_target / r_ds_on)

    def loss_residual(v_ds: float) -> float:
        return v_ds * current_at(params, v_gs, v_ds, t) - p_target

    # v_ds * I_D(v_ds) grows without bound, so doubling finds a bracket.
    high = max(p_target / saturation_current(params, v_gs, t),
               v_gs - v_th)
    while loss_residual(high) < 0:
        high *= 2

    v_ds = optimize.brentq(loss_residual, 0.0, high, xtol=VDS_XTOL)
    return i_ohmic, current_at(params, v_gs, v_ds, t), v_ds
