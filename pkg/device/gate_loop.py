"""Small-signal model of the external gate drive loop.

The cable inductance, the series resistances and the effective gate input
capacitance form a series RLC circuit with characteristic polynomial
L s^2 + R s + 1/C.
"""
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from validators import value_non_negative, value_positive

# Damping ratios closer to one than this are treated as critical damping.
CRITICAL_DAMPING_TOL = 1e-12

# Type alias for a pair of poles (rad/s).
PolePair = Tuple[complex, complex]


@dataclass(frozen=True)
class GateLoopCircuit:
    """Parasitics of the gate loop. The defaults ring at 1.4 MHz."""
    l_cable: float = 1e-6
    r_ext: float = 0.0
    r_loop: float = 0.0
    c_eff: float = 12.92e-9

    def __post_init__(self) -> None:
        value_positive("l_cable", self.l_cable)
        value_non_negative("r_ext", self.r_ext)
        value_non_negative("r_loop", self.r_loop)
        value_positive("c_eff", self.c_eff)

    @property
    def r_total(self) -> float:
        """Total series resistance of the loop."""
        return self.r_ext + self.r_loop

    @property
    def z0(self) -> float:
        """Characteristic impedance sqrt(L/C)."""
        return math.sqrt(self.l_cable / self.c_eff)

    @property
    def omega0(self) -> float:
        """Undamped natural frequency (rad/s)."""
        return 1 / math.sqrt(self.l_cable * self.c_eff)


def damping_ratio(circuit: GateLoopCircuit) -> float:
    """Damping ratio of the loop."""
    return circuit.r_total / (2 * circuit.z0)


def poles(circuit: GateLoopCircuit) -> PolePair:
    """Roots of L s^2 + R s + 1/C, upper half plane first."""
    omega0 = circuit.omega0
    zeta = damping_ratio(circuit)

    if abs(zeta - 1) <= CRITICAL_DAMPING_TOL:
        pole = complex(-omega0 * zeta, 0.0)
        return pole, pole

    if zeta < 1:
        omega_d = omega0 * math.sqrt((1 - zeta) * (1 + zeta))
        return (complex(-omega0 * zeta, omega_d),
                complex(-omega0 * zeta, -omega_d))

    # Overdamped: take the small root from the product of the roots.
    fast = -omega0 * (zeta + math.sqrt((zeta - 1) * (zeta + 1)))
    slow = omega0 * omega0 / fast
    return complex(slow, 0.0), complex(fast, 0.0)


def resonant_frequency(circuit: GateLoopCircuit) -> Optional[float]:
    """Ringing frequency in Hz, None if the loop does not ring."""
    if damping_ratio(circuit) >= 1 - CRITICAL_DAMPING_TOL:
        return None
    return poles(circuit)[0].imag / (2 * math.pi)


def min_damping_resistor(circuit: GateLoopCircuit,
                         zeta_target: float) -> float:
    """Smallest external resistor that gives the target damping ratio."""
    value_non_negative("zeta_target", zeta_target)
    return max(0.0, 2 * zeta_target * circuit.z0 - circuit.r_loop)
