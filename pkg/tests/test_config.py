import numpy as np
import pytest

from config import format_config, load_config, parse_config
from device.gan import GanReverseParams
from device.gate_loop import GateLoopCircuit
from device.mosfet import DeviceParams
from device.presets import PRESETS
from errors import ParseError, UnknownNodeError, ValidationError
from simulation import CurrentMode, VoltageMode
from thermal.network import FosterStage

TWO_NODES = """\
thermal:
  ambient_c: 40
  nodes:
    - name: T_j
      stages:
        - {r: 25, c: 2}
        - {r: 5, c: 40}
    - name: T_case
      stages:
        - {r: 5, c: 100}
  static_r:
    - [30, 1.5]
    - [5, 0.5]
sim:
  junction_node: T_j
  ambient_c: 35
"""


def assert_same_run(first, second):
    assert first.device == second.device
    assert first.drive == second.drive
    assert first.sim == second.sim
    assert first.gate_loop == second.gate_loop
    assert first.gan == second.gan
    assert first.preset == second.preset
    assert first.thermal.nodes == second.thermal.nodes
    assert first.thermal.stages == second.thermal.stages
    assert first.thermal.t_ambient == second.thermal.t_ambient
    np.testing.assert_array_equal(first.thermal.static_r,
                                  second.thermal.static_r)


def test_defaults():
    run = parse_config("")
    assert run.device == DeviceParams()
    assert run.preset == "si"
    assert run.drive == CurrentMode(3.55, 1.0, 5.0)
    assert (run.sim.dt, run.sim.t_end) == (0.5, 1200.0)
    assert run.sim.runaway_temp == pytest.approx(448.15)
    assert run.sim.junction_node == "T_j"
    assert run.sim.t_ambient is None
    assert run.thermal.nodes == ("T_j",)
    assert run.thermal.stages == ((FosterStage(30.0, 2.0),),)
    assert run.thermal.t_ambient == pytest.approx(298.15)
    assert run.gate_loop == GateLoopCircuit()
    assert run.gan == GanReverseParams()


def test_empty_sections():
    assert_same_run(parse_config("device:\nsim:\n"), parse_config(""))


def test_reference_config(reference_config):
    assert_same_run(load_config(reference_config), parse_config(""))


def test_presets_and_overrides():
    run = parse_config("device:\n  preset: sic\n  vth0: 2.9\n  lambda: 0.01\n")
    assert run.preset == "sic"
    assert run.device.vth0 == 2.9
    assert run.device.lambda_ == 0.01
    assert run.device.c_ox == PRESETS["sic"].c_ox
    assert run.device.vth_tempco == PRESETS["sic"].vth_tempco


def test_reference_temperature_in_celsius():
    run = parse_config("device:\n  t_ref_c: 50\ngan:\n  t_ref_c: 100\n")
    assert run.device.t_ref == pytest.approx(323.15)
    assert run.gan.t_ref == pytest.approx(373.15)


def test_unknown_preset():
    with pytest.raises(ValidationError) as error:
        parse_config("device:\n  preset: igbt\n")
    assert error.value.name == "preset"


def test_invalid_value():
    with pytest.raises(ValidationError) as error:
        parse_config("device:\n  c_ox: -0.02\n")
    assert error.value.name == "c_ox"


def test_unknown_key():
    with pytest.raises(ParseError) as error:
        parse_config("device:\n  vth0: 3.4\n  colour: red\n")
    assert error.value.line == 3
    assert error.value.field == "device.colour"


def test_unknown_section():
    with pytest.raises(ParseError) as error:
        parse_config("solver:\n  tol: 1.0e-9\n")
    assert error.value.line == 1
    assert error.value.field == "solver"


def test_unknown_stage_key():
    text = ("thermal:\n  nodes:\n    - name: T_j\n      stages:\n"
            "        - {r: 30, c: 2, l: 1}\n")
    with pytest.raises(ParseError) as error:
        parse_config(text)
    assert error.value.field == "thermal.nodes[0].stages[0].l"
    assert error.value.line == 5


@pytest.mark.parametrize("text, field", [
    ("device:\n  vth0: high\n", "device.vth0"),
    ("sim:\n  dt: true\n", "sim.dt"),
    ("drive:\n  v_gs: [3.5]\n", "drive.v_gs"),
])
def test_not_a_number(text, field):
    with pytest.raises(ParseError) as error:
        parse_config(text)
    assert error.value.field == field


def test_section_not_a_mapping():
    with pytest.raises(ParseError) as error:
        parse_config("sim: 5\n")
    assert error.value.field == "sim"


def test_yaml_syntax_error():
    with pytest.raises(ParseError) as error:
        parse_config("device:\n  vth0: [3.4\nsim:\n  dt: 1\n")
    assert error.value.line is not None


def test_voltage_mode():
    run = parse_config("drive:\n  mode: voltage\n  v_gs: 4.0\n  v_ds: 12\n")
    assert run.drive == VoltageMode(4.0, 12.0)


def test_key_of_other_mode():
    with pytest.raises(ParseError) as error:
        parse_config("drive:\n  mode: voltage\n  i_set: 1.0\n")
    assert error.value.field == "drive.i_set"
    with pytest.raises(ParseError):
        parse_config("drive:\n  v_ds: 5.0\n")


def test_unknown_mode():
    with pytest.raises(ValidationError):
        parse_config("drive:\n  mode: pulsed\n")


def test_unknown_junction_node():
    with pytest.raises(UnknownNodeError):
        parse_config("sim:\n  junction_node: T_x\n")


def test_two_nodes_with_static_r():
    run = parse_config(TWO_NODES)
    assert run.thermal.nodes == ("T_j", "T_case")
    assert run.thermal.sources == 2
    assert run.thermal.t_ambient == pytest.approx(313.15)
    assert run.sim.t_ambient == pytest.approx(308.15)
    np.testing.assert_array_equal(run.thermal.static_r,
                                  [[30.0, 1.5], [5.0, 0.5]])


def test_static_r_must_match_stages():
    text = TWO_NODES.replace("[30, 1.5]", "[20, 1.5]")
    with pytest.raises(ValidationError):
        parse_config(text)


@pytest.mark.parametrize("text", [
    "",
    TWO_NODES,
    "device:\n  preset: gan\n  lambda: 0.02\n"
    "drive:\n  mode: voltage\n  v_gs: 2.5\n  v_ds: 48\n",
    "gate_loop:\n  r_ext: 4.7\n  l_cable: 2.2e-7\n",
])
def test_format_config_round_trip(text):
    run = parse_config(text)
    assert_same_run(parse_config(format_config(run)), run)


def test_format_config_in_celsius():
    text = format_config(parse_config(""))
    assert "ambient_c: 25.0" in text
    assert "runaway_temp_c: 175.0" in text
    assert "t_ref_c: 25.0" in text
