import math

import numpy as np
import pytest

from device.mosfet import (
    DeviceParams, OperatingPoint, T_REF, alpha, alpha_at, current_at,
    drain_current, loss_current_comparison, mobility, output_curve,
    saturation_current, solve_vds_for_current, tcp, tcp_numeric,
    transfer_curve, unstable_range, vth
)
from errors import (
    BelowThresholdError, ComplianceExceededError, DegenerateTCPError,
    ValidationError
)
from utils import inclusive_grid

# Drain voltage that keeps the reference device saturated.
V_SAT = 50.0


def finite_difference_alpha(params, v_gs, v_ds, t, dt=0.01):
    return (current_at(params, v_gs, v_ds, t + dt)
            - current_at(params, v_gs, v_ds, t - dt)) / (2 * dt)


def test_vth_law(device):
    assert vth(device, T_REF) == pytest.approx(3.4)
    assert vth(device, 398.15) == pytest.approx(2.6)
    flat = DeviceParams(vth_tempco=0.0)
    assert vth(flat, 500.0) == flat.vth0


def test_mobility_law(device):
    assert mobility(device, T_REF) == pytest.approx(device.mu0)
    assert mobility(device, 398.15) == pytest.approx(
        0.05 * (398.15 / 298.15) ** -2.2, rel=1e-12)
    assert mobility(DeviceParams(mobility_exp=0.0), 400.0) == 0.05


def test_reference_gain(device):
    assert device.gain == pytest.approx(44.444, rel=1e-4)


def test_drain_current_anchor(device):
    assert drain_current(device, OperatingPoint(3.4, 5.0, T_REF)) == 0.0
    assert drain_current(device, OperatingPoint(3.55, 5.0, T_REF)) \
        == pytest.approx(1.0, rel=1e-12)
    hot = drain_current(device, OperatingPoint(3.55, 5.0, 398.15))
    assert hot == pytest.approx(21.2, rel=1e-2)


def test_drain_current_continuous_at_saturation_edge(device):
    v_gs = 3.8
    overdrive = v_gs - vth(device, T_REF)
    edge = current_at(device, v_gs, overdrive, T_REF)
    below = current_at(device, v_gs, np.nextafter(overdrive, 0), T_REF)
    assert abs(edge - below) < 1e-12 * edge


def test_drain_current_non_decreasing_in_vds():
    params = DeviceParams(lambda_=0.02)
    grid = np.linspace(0.0, 10.0, 1001)
    currents = [current_at(params, 3.9, v, 320.0) for v in grid]
    assert np.all(np.diff(currents) >= 0)


def test_alpha_matches_finite_difference():
    rng = np.random.default_rng(1)
    for _ in range(200):
        params = DeviceParams(
            mobility_exp=rng.uniform(1.5, 2.5),
            vth_tempco=rng.uniform(0.004, 0.012),
            lambda_=rng.uniform(0.0, 0.05))
        t = rng.uniform(250.0, 450.0)
        v_th = vth(params, t)
        v_tcp, _ = tcp(params, t)
        # Stay away from the TCP, where alpha itself vanishes.
        if rng.uniform() < 0.5:
            v_gs = v_th + rng.uniform(0.05, 0.5 * (v_tcp - v_th))
        else:
            v_gs = v_tcp + rng.uniform(0.5, 2.0)

        analytic = alpha_at(params, v_gs, V_SAT, t)
        numeric = finite_difference_alpha(params, v_gs, V_SAT, t)
        assert analytic == pytest.approx(numeric, rel=1e-6)


def test_alpha_matches_finite_difference_in_ohmic_region(device):
    analytic = alpha_at(device, 4.2, 0.3, 330.0)
    numeric = finite_difference_alpha(device, 4.2, 0.3, 330.0)
    assert analytic == pytest.approx(numeric, rel=1e-6)


def test_alpha_sign_partition(device):
    rng = np.random.default_rng(7)
    for _ in range(200):
        t = rng.uniform(250.0, 450.0)
        v_th = vth(device, t)
        v_tcp, _ = tcp(device, t)

        unstable = v_th + rng.uniform(0.001, 0.999) * (v_tcp - v_th)
        assert alpha(device, OperatingPoint(unstable, V_SAT, t)) > 0

        stable = v_tcp + rng.uniform(0.01, 2.0)
        assert alpha(device, OperatingPoint(stable, V_SAT, t)) < 0


def test_alpha_vanishes_at_tcp(device):
    for t in (250.0, T_REF, 450.0):
        v_tcp, _ = tcp(device, t)
        assert abs(alpha_at(device, v_tcp, V_SAT, t)) < 1e-9


def test_tcp_reference_value(device):
    v_tcp, i_tcp = tcp(device, T_REF)
    assert v_tcp == pytest.approx(3.4 + 2 * 0.008 * 298.15 / 2.2)
    assert v_tcp == pytest.approx(5.568, abs=1e-3)
    assert i_tcp == pytest.approx(saturation_current(device, v_tcp, T_REF))


@pytest.mark.parametrize("t", [250.0, 298.15, 350.0, 450.0])
def test_tcp_closed_form_matches_root_find(device, t):
    assert tcp_numeric(device, t) == pytest.approx(tcp(device, t)[0],
                                                   abs=1e-9)


def test_tcp_numeric_holds_vds_in_saturation():
    # 1 V is below the saturation edge at V_TCP and is raised to it.
    params = DeviceParams(lambda_=0.03)
    low = tcp_numeric(params, T_REF, v_ds=1.0)
    high = tcp_numeric(params, T_REF, v_ds=50.0)
    assert low == pytest.approx(high, abs=1e-9)
    assert high == pytest.approx(tcp(params, T_REF)[0], abs=1e-9)


def test_tcp_degenerate():
    with pytest.raises(DegenerateTCPError):
        tcp(DeviceParams(vth_tempco=0.0), T_REF)
    with pytest.raises(DegenerateTCPError):
        tcp_numeric(DeviceParams(mobility_exp=0.0), T_REF)


def test_unstable_range(device):
    low, high = unstable_range(device, T_REF)
    assert low == pytest.approx(3.4)
    assert high == pytest.approx(tcp(device, T_REF)[0])


def test_solve_vds_zero_current(device):
    assert solve_vds_for_current(device, 0.0, 3.0, T_REF, 5.0) == 0.0


def test_solve_vds_ohmic_root(device):
    k = device.gain
    expected = (0.3 - math.sqrt(0.09 - 4 * 0.5 / k)) / 2
    v_ds = solve_vds_for_current(device, 0.5, 3.55, T_REF, 5.0)
    assert v_ds == pytest.approx(expected, rel=1e-9)
    assert current_at(device, 3.55, v_ds, T_REF) == pytest.approx(0.5)


def test_solve_vds_at_saturation_current():
    params = DeviceParams(vth0=3.0)
    i_sat = saturation_current(params, 3.5, T_REF)
    assert solve_vds_for_current(params, i_sat, 3.5, T_REF, 5.0) \
        == pytest.approx(0.5, abs=1e-12)


def test_solve_vds_at_tcp_current(device):
    v_tcp, i_tcp = tcp(device, T_REF)
    v_ds = solve_vds_for_current(device, i_tcp, v_tcp, T_REF, 20.0)
    assert v_ds == pytest.approx(v_tcp - vth(device, T_REF), abs=1e-12)


def test_solve_vds_errors(device):
    with pytest.raises(ComplianceExceededError):
        solve_vds_for_current(device, 2.0, 3.55, T_REF, 5.0)
    with pytest.raises(BelowThresholdError):
        solve_vds_for_current(device, 0.1, 3.3, T_REF, 5.0)
    with pytest.raises(ValidationError):
        solve_vds_for_current(device, -1.0, 3.55, T_REF, 5.0)


def test_transfer_curve_below_threshold(device):
    _, currents = transfer_curve(device, 5.0, T_REF, [2.0, 2.5, 3.0, 3.4])
    assert np.all(currents == 0)


def test_transfer_curves_cross_once(device):
    t1, t2 = 298.15, 398.15
    step = 0.01
    grid = inclusive_grid(3.41, 7.0, step)
    _, cold = transfer_curve(device, V_SAT, t1, grid)
    _, hot = transfer_curve(device, V_SAT, t2, grid)

    changes = np.flatnonzero(np.diff(np.sign(cold - hot)) != 0)
    assert len(changes) == 1

    # Analytic crossing of sqrt(K1) (v - Vth1) = sqrt(K2) (v - Vth2).
    vth1, vth2 = vth(device, t1), vth(device, t2)
    r1 = math.sqrt(saturation_current(device, 4.0, t1)) / (4.0 - vth1)
    r2 = math.sqrt(saturation_current(device, 4.0, t2)) / (4.0 - vth2)
    crossing = (r1 * vth1 - r2 * vth2) / (r1 - r2)
    assert abs(grid[changes[0]] - crossing) <= step
    assert tcp(device, t2)[0] < crossing < tcp(device, t1)[0]


def test_transfer_curve_at_tcp_is_temperature_flat(device):
    v_tcp, _ = tcp(device, T_REF)
    _, low = transfer_curve(device, V_SAT, T_REF - 0.01, [v_tcp])
    _, high = transfer_curve(device, V_SAT, T_REF + 0.01, [v_tcp])
    assert low[0] == pytest.approx(high[0], rel=1e-6)


def test_transfer_curve_rejects_bad_grid(device):
    with pytest.raises(ValidationError):
        transfer_curve(device, 5.0, T_REF, [])
    with pytest.raises(ValidationError):
        transfer_curve(device, 5.0, T_REF, [4.0, 3.5])


def test_output_curve_family(device):
    family = inclusive_grid(3.5, 4.0, 0.05)
    grid = inclusive_grid(0.0, 10.0, 0.05)
    curves = [output_curve(device, v_gs, T_REF, grid, 4.0)
              for v_gs in family]

    assert len(curves) == 11
    for curve in curves:
        assert np.all(np.diff(curve.i_d) >= 0)
        np.testing.assert_allclose(curve.soa_current[1:], 4.0 / grid[1:])
        assert np.isinf(curve.soa_current[0])
        np.testing.assert_array_equal(curve.clipped,
                                      grid * curve.i_d > 4.0)

    currents = np.array([curve.i_d[1:] for curve in curves])
    assert np.all(np.diff(currents, axis=0) > 0)
    assert curves[-1].clipped.any()


def test_drain_current_monotone_across_saturation_edge(device):
    assert current_at(device, 3.7, 0.35, T_REF) \
        >= current_at(device, 3.7, 0.30, T_REF)
    for v_gs in inclusive_grid(3.45, 5.0, 0.01):
        edge = v_gs - vth(device, T_REF)
        grid = np.linspace(0.0, 2 * edge, 2001)
        currents = [current_at(device, v_gs, v_ds, T_REF) for v_ds in grid]
        assert np.all(np.diff(currents) >= 0)


def test_output_curve_boundary_not_clipped(device):
    i_sat = current_at(device, 3.55, 4.0, T_REF)
    curve = output_curve(device, 3.55, T_REF, [0.0, 4.0, 8.0], 4.0 * i_sat)
    assert list(curve.clipped) == [False, False, True]


def test_output_curve_without_limit(device):
    curve = output_curve(device, 4.0, T_REF, [0.0, 5.0, 10.0])
    assert not curve.clipped.any()
    assert curve.soa_current is None


def test_loss_current_comparison(device):
    i_ohmic, i_sat, v_ds = loss_current_comparison(device, 4.0, 3.55, T_REF,
                                                   5e-3)
    assert i_ohmic == pytest.approx(math.sqrt(800.0))
    assert v_ds * i_sat == pytest.approx(4.0, rel=1e-9)
    assert i_sat < i_ohmic / 20
    with pytest.raises(BelowThresholdError):
        loss_current_comparison(device, 4.0, 3.3, T_REF, 5e-3)


def test_params_validation():
    with pytest.raises(ValidationError) as error:
        DeviceParams(c_ox=-0.02)
    assert error.value.name == "c_ox"
    with pytest.raises(ValidationError) as error:
        DeviceParams(lambda_=-0.1)
    assert error.value.name == "lambda"
    with pytest.raises(ValidationError):
        OperatingPoint(3.55, -1.0, T_REF)
    with pytest.raises(ValidationError):
        OperatingPoint(3.55, 1.0, 0.0)
