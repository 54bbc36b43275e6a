from dataclasses import dataclass

from device.mosfet import T_REF
from validators import value_non_negative, value_non_positive, value_positive


@dataclass(frozen=True)
class GanReverseParams:
    """Reverse conduction of an enhancement-mode GaN HEMT.

    The defaults reproduce 2 V at 0.6 A with 0 V on the gate and 3 V with
    -1 V on the gate.
    """
    v_offset0: float = 1.7
    offset_tempco: float = 1e-3
    r_rev0: float = 0.5
    r_rev_tempco: float = 4e-3
    t_ref: float = T_REF

    def __post_init__(self) -> None:
        value_positive("v_offset0", self.v_offset0)
        value_non_negative("offset_tempco", self.offset_tempco)
        value_positive("r_rev0", self.r_rev0)
        value_non_negative("r_rev_tempco", self.r_rev_tempco)
        value_positive("t_ref", self.t_ref)


def reverse_offset(params: GanReverseParams, t: float) -> float:
    """Offset voltage of the reverse channel at temperature t."""
    return params.v_offset0 + params.offset_tempco * (t - params.t_ref)


def reverse_resistance(params: GanReverseParams, t: float) -> float:
    """Resistance of the reverse channel at temperature t."""
    return params.r_rev0 * (1 + params.r_rev_tempco * (t - params.t_ref))


def gan_reverse_vsd(params: GanReverseParams, i_sd: float, v_gs_off: float,
                    t: float) -> float:
    """Source-drain voltage of a turned-off device conducting i_sd.

    A negative gate bias raises the drop by the same amount, since the
    channel is enhanced by the gate-drain voltage.
    """
    value_non_negative("i_sd", i_sd)
    value_non_positive("v_gs_off", v_gs_off)

    resistive = i_sd * reverse_resistance(params, t)
    return reverse_offset(params, t) + resistive - v_gs_off
