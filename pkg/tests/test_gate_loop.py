import math

import numpy as np
import pytest

from device.gate_loop import (
    GateLoopCircuit, damping_ratio, min_damping_resistor, poles,
    resonant_frequency
)
from errors import ValidationError

L_CABLE = 1e-6
C_EFF = 12.92e-9
Z0 = math.sqrt(L_CABLE / C_EFF)


def circuit(r_ext: float = 0.0, r_loop: float = 0.0) -> GateLoopCircuit:
    return GateLoopCircuit(L_CABLE, r_ext, r_loop, C_EFF)


def test_lossless_loop_rings_at_1_4_mhz():
    lossless = circuit()
    first, second = poles(lossless)
    omega0 = 1 / math.sqrt(L_CABLE * C_EFF)

    assert first.real == 0 and second.real == 0
    assert first.imag == pytest.approx(omega0)
    assert second.imag == pytest.approx(-omega0)
    assert resonant_frequency(lossless) == pytest.approx(1.40e6, rel=5e-3)
    assert resonant_frequency(lossless) \
        == pytest.approx(1 / (2 * math.pi * math.sqrt(L_CABLE * C_EFF)))


def test_damping_ratio():
    assert damping_ratio(circuit()) == 0
    assert damping_ratio(circuit(2 * Z0)) == pytest.approx(1.0)
    assert damping_ratio(circuit(6.0)) \
        == pytest.approx(2 * damping_ratio(circuit(3.0)))
    assert damping_ratio(circuit(2.0, 1.0)) \
        == pytest.approx(damping_ratio(circuit(3.0)))


def test_damped_frequency_matches_undamped_formula():
    f0 = resonant_frequency(circuit())
    damped = circuit(Z0)
    zeta = damping_ratio(damped)
    assert zeta == pytest.approx(0.5)
    assert resonant_frequency(damped) \
        == pytest.approx(f0 * math.sqrt(1 - zeta ** 2), rel=1e-12)


def test_critical_damping_resistor():
    r_min = min_damping_resistor(circuit(), 1.0)
    assert r_min == pytest.approx(17.6, abs=0.01)

    critical = circuit(r_min)
    first, second = poles(critical)
    assert first == pytest.approx(second, rel=1e-9)
    assert first.imag == 0
    assert first.real < 0
    assert first.real == pytest.approx(-r_min / (2 * L_CABLE), rel=1e-9)
    assert resonant_frequency(critical) is None


def test_min_damping_resistor_clamps():
    assert min_damping_resistor(circuit(r_loop=20.0), 1.0) == 0
    assert min_damping_resistor(circuit(), 0.0) == 0
    target = circuit(min_damping_resistor(circuit(r_loop=2.0), 0.7),
                     r_loop=2.0)
    assert damping_ratio(target) == pytest.approx(0.7)


def test_poles_strictly_left_half_plane():
    rng = np.random.default_rng(11)
    for r_total in 10 ** rng.uniform(-3, 3, 200):
        for pole in poles(circuit(r_total)):
            assert pole.real < 0


@pytest.mark.parametrize("zeta", [0.0, 0.3, 0.7, 1.5, 3.0])
def test_poles_match_companion_matrix(zeta):
    loop = circuit(2 * zeta * Z0)
    omega0 = loop.omega0
    zeta = damping_ratio(loop)
    companion = omega0 * np.array([[-2 * zeta, -1.0], [1.0, 0.0]])

    expected = sorted(np.linalg.eigvals(companion),
                      key=lambda s: (s.imag, s.real))
    computed = sorted(poles(loop), key=lambda s: (s.imag, s.real))
    for pole, eigenvalue in zip(computed, expected):
        assert abs(pole - eigenvalue) <= 1e-12 * abs(eigenvalue)


def test_frequency_falls_with_resistance():
    frequencies = [resonant_frequency(circuit(r))
                   for r in np.linspace(0.0, 2 * Z0 * 0.999, 50)]
    assert np.all(np.diff(frequencies) < 0)
    assert resonant_frequency(circuit(2 * Z0 * 1.001)) is None


def test_validation():
    with pytest.raises(ValidationError):
        GateLoopCircuit(l_cable=0.0)
    with pytest.raises(ValidationError):
        GateLoopCircuit(r_ext=-1.0)
    with pytest.raises(ValidationError):
        min_damping_resistor(circuit(), -0.5)
