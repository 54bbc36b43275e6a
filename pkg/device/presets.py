from dataclasses import replace
from typing import Dict

from device.mosfet import DeviceParams
from validators import value_in_list

# Named parameter sets. "si" is the reference set; "sic" has a strong
# threshold shift and a weak mobility law, so it stays thermally unstable
# over a wide V_GS range; "gan" reaches its TCP close to threshold.
PRESETS: Dict[str, DeviceParams] = {
    "si": DeviceParams(),
    "sic": DeviceParams(
        c_ox=0.01, w_cell=0.2, l_ch=1e-6, mu0=0.002,
        mobility_exp=1.2, vth0=3.0, vth_tempco=0.012),
    "gan": DeviceParams(
        c_ox=0.05, w_cell=0.05, l_ch=1e-6, mu0=0.15,
        mobility_exp=1.8, vth0=1.6, vth_tempco=0.002),
}


def preset(name: str, **overrides) -> DeviceParams:
    """Named parameter set with the given fields replaced."""
    value_in_list("preset", name, sorted(PRESETS))
    return replace(PRESETS[name], **overrides)
