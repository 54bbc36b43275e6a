"""YAML run configuration.

Every section and field is optional. Temperatures are given in Celsius
(keys ending in ``_c``) and held in kelvin once parsed. Example::

    device:
      preset: si
      vth0: 3.4
    thermal:
      ambient_c: 25
      nodes:
        - name: T_j
          stages:
            - {r: 30, c: 2}
    drive:
      mode: current
      v_gs: 3.55
      i_set: 1.0
      v_compliance: 5.0
    sim:
      dt: 0.5
      t_end: 1200
      runaway_temp_c: 175
"""
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import yaml

from device.gan import GanReverseParams
from device.gate_loop import GateLoopCircuit
from device.mosfet import DeviceParams
from device.presets import preset
from errors import ParseError
from simulation import CurrentMode, DriveMode, SimConfig, VoltageMode
from thermal.network import FosterStage, ThermalModel
from utils import celsius_to_kelvin, format_celsius
from validators import value_in_list

# Allowed keys of every section.
SECTION_KEYS = {
    "device": {"preset", "c_ox", "w_cell", "l_ch", "mu0", "t_ref_c",
               "mobility_exp", "vth0", "vth_tempco", "lambda"},
    "thermal": {"ambient_c", "nodes", "static_r"},
    "drive": {"mode", "v_gs", "v_ds", "i_set", "v_compliance"},
    "sim": {"dt", "t_end", "runaway_temp_c", "junction_node", "ambient_c"},
    "gate_loop": {"l_cable", "r_ext", "r_loop", "c_eff"},
    "gan": {"v_offset0", "offset_tempco", "r_rev0", "r_rev_tempco",
            "t_ref_c"},
}

# Allowed keys of a thermal node and of one of its Foster stages.
NODE_KEYS = {"name", "stages"}
STAGE_KEYS = {"r", "c"}

# Drive keys that belong to one mode only.
MODE_KEYS = {
    "voltage": {"v_ds"},
    "current": {"i_set", "v_compliance"},
}

DEFAULT_PRESET = "si"
DEFAULT_AMBIENT_C = 25.0
DEFAULT_NODES = [{"name": "T_j", "stages": [{"r": 30.0, "c": 2.0}]}]
DEFAULT_DRIVE = {"mode": "current", "v_gs": 3.55, "v_ds": 5.0,
                 "i_set": 1.0, "v_compliance": 5.0}
DEFAULT_SIM = {"dt": 0.5, "t_end": 1200.0, "runaway_temp_c": 175.0}


@dataclass(frozen=True)
class RunConfig:
    """Validated models and settings of a run."""
    device: DeviceParams
    thermal: ThermalModel
    drive: DriveMode
    sim: SimConfig
    gate_loop: GateLoopCircuit = field(default_factory=GateLoopCircuit)
    gan: GanReverseParams = field(default_factory=GanReverseParams)
    preset: str = DEFAULT_PRESET


def _line(node: yaml.Node) -> int:
    return node.start_mark.line + 1


def _check_mapping(node: yaml.Node, allowed, path: str) -> None:
    """Raise for a non-mapping node or a key outside allowed."""
    if not isinstance(node, yaml.MappingNode):
        raise ParseError("Expected a mapping", _line(node), path or None)
    for key_node, _ in node.value:
        if key_node.value not in allowed:
            name = path + "." + key_node.value if path else key_node.value
            raise ParseError("Unknown key", _line(key_node), name)


def _check_sequence(node: yaml.Node, path: str) -> List[yaml.Node]:
    if not isinstance(node, yaml.SequenceNode):
        raise ParseError("Expected a list", _line(node), path)
    return node.value


def _check_structure(root: yaml.Node) -> None:
    """Check the node tree for unknown keys before reading any value."""
    _check_mapping(root, SECTION_KEYS, "")
    for key_node, section in root.value:
        name = key_node.value
        if section.tag == "tag:yaml.org,2002:null":
            continue
        _check_mapping(section, SECTION_KEYS[name], name)

        if name != "thermal":
            continue
        for sub_key, sub_node in section.value:
            if sub_key.value != "nodes":
                continue
            for i, node in enumerate(_check_sequence(sub_node,
                                                     "thermal.nodes")):
                node_path = "thermal.nodes[{0}]".format(i)
                _check_mapping(node, NODE_KEYS, node_path)
                for stage_key, stages in node.value:
                    if stage_key.value != "stages":
                        continue
                    for j, stage in enumerate(_check_sequence(
                            stages, node_path + ".stages")):
                        _check_mapping(stage, STAGE_KEYS,
                                       "{0}.stages[{1}]".format(node_path, j))


def _number(section: Dict[str, Any], key: str, path: str,
            default: Optional[float] = None) -> float:
    """Numeric field of a section, or the default when omitted."""
    value = section.get(key, default)
    if value is None:
        raise ParseError("Missing value", field=path + "." + key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError("Expected a number, got {0!r}".format(value),
                         field=path + "." + key)
    return float(value)


def _text(section: Dict[str, Any], key: str, path: str,
          default: Optional[str] = None) -> str:
    value = section.get(key, default)
    if not isinstance(value, str):
        raise ParseError("Expected a name, got {0!r}".format(value),
                         field=path + "." + key)
    return value


def _section(data: Dict[str, Any], name: str) -> Dict[str, Any]:
    return data.get(name) or {}


def _device(section: Dict[str, Any]) -> DeviceParams:
    overrides = {}
    for key in ("c_ox", "w_cell", "l_ch", "mu0", "mobility_exp", "vth0",
                "vth_tempco"):
        if key in section:
            overrides[key] = _number(section, key, "device")
    if "lambda" in section:
        overrides["lambda_"] = _number(section, "lambda", "device")
    if "t_ref_c" in section:
        overrides["t_ref"] = celsius_to_kelvin(
            _number(section, "t_ref_c", "device"))

    return preset(_text(section, "preset", "device", DEFAULT_PRESET),
                  **overrides)


def _thermal(section: Dict[str, Any]) -> ThermalModel:
    ambient = celsius_to_kelvin(
        _number(section, "ambient_c", "thermal", DEFAULT_AMBIENT_C))

    names, stages = [], []
    nodes = section.get("nodes")
    if nodes is None:
        nodes = DEFAULT_NODES

    for i, node in enumerate(nodes):
        path = "thermal.nodes[{0}]".format(i)
        names.append(_text(node, "name", path))
        stages.append(tuple(
            FosterStage(_number(stage, "r", path + ".stages"),
                        _number(stage, "c", path + ".stages"))
            for stage in node.get("stages") or []))

    static_r = section.get("static_r")
    if static_r is not None:
        try:
            static_r = [[float(value) for value in row] for row in static_r]
        except (TypeError, ValueError):
            raise ParseError("Expected a matrix of numbers",
                             field="thermal.static_r")

    return ThermalModel(tuple(names), tuple(stages), ambient, static_r)


def _drive(section: Dict[str, Any]) -> DriveMode:
    mode = _text(section, "mode", "drive", DEFAULT_DRIVE["mode"])
    value_in_list("drive.mode", mode, sorted(MODE_KEYS))

    for other, keys in MODE_KEYS.items():
        misplaced = sorted(keys & set(section)) if other != mode else []
        if misplaced:
            raise ParseError("Not used in {0} mode".format(mode),
                             field="drive." + misplaced[0])

    def number(key: str) -> float:
        return _number(section, key, "drive", DEFAULT_DRIVE[key])

    if mode == "voltage":
        return VoltageMode(number("v_gs"), number("v_ds"))
    return CurrentMode(number("v_gs"), number("i_set"),
                       number("v_compliance"))


def _sim(section: Dict[str, Any], thermal: ThermalModel) -> SimConfig:
    def number(key: str) -> float:
        return _number(section, key, "sim", DEFAULT_SIM[key])

    t_ambient = None
    if "ambient_c" in section:
        t_ambient = celsius_to_kelvin(_number(section, "ambient_c", "sim"))

    return SimConfig(
        dt=number("dt"), t_end=number("t_end"),
        runaway_temp=celsius_to_kelvin(number("runaway_temp_c")),
        junction_node=_text(section, "junction_node", "sim",
                            thermal.nodes[0]),
        t_ambient=t_ambient)


def _keyword_section(section: Dict[str, Any], path: str, cls,
                     celsius=("t_ref_c",)):
    kwargs = {}
    for key in section:
        value = _number(section, key, path)
        if key in celsius:
            kwargs[key[:-len("_c")]] = celsius_to_kelvin(value)
        else:
            kwargs[key] = value
    return cls(**kwargs)


def parse_config(text: str) -> RunConfig:
    """Parse and validate a YAML run configuration."""
    try:
        root = yaml.compose(text)
        if root is not None:
            _check_structure(root)
        data = yaml.safe_load(text) if root is not None else {}
    except yaml.MarkedYAMLError as e:
        mark = e.problem_mark or e.context_mark
        raise ParseError(e.problem or str(e),
                         mark.line + 1 if mark else None)
    except yaml.YAMLError as e:
        raise ParseError(str(e))

    device = _device(_section(data, "device"))
    thermal = _thermal(_section(data, "thermal"))
    sim = _sim(_section(data, "sim"), thermal)
    thermal.index(sim.junction_node)

    return RunConfig(
        device=device,
        thermal=thermal,
        drive=_drive(_section(data, "drive")),
        sim=sim,
        gate_loop=_keyword_section(_section(data, "gate_loop"),
                                   "gate_loop", GateLoopCircuit),
        gan=_keyword_section(_section(data, "gan"), "gan", GanReverseParams),
        preset=_section(data, "device").get("preset", DEFAULT_PRESET))


def load_config(filename: str) -> RunConfig:
    """Load a run configuration from the file."""
    with open(filename, 'r', encoding='utf-8') as config_file:
        return parse_config(config_file.read())


def _celsius(t_k: float) -> float:
    return float(format_celsius(t_k))


def format_config(run: RunConfig) -> str:
    """Effective configuration, defaults included, as YAML."""
    device = asdict(run.device)
    device["lambda"] = device.pop("lambda_")
    device["t_ref_c"] = _celsius(device.pop("t_ref"))

    thermal = run.thermal
    nodes = [{"name": name,
              "stages": [{"r": s.r, "c": s.c} for s in stages]}
             for name, stages in zip(thermal.nodes, thermal.stages)]

    if isinstance(run.drive, VoltageMode):
        drive = {"mode": "voltage", "v_gs": run.drive.v_gs,
                 "v_ds": run.drive.v_ds}
    else:
        drive = {"mode": "current", "v_gs": run.drive.v_gs,
                 "i_set": run.drive.i_set,
                 "v_compliance": run.drive.v_compliance}

    sim = {"dt": run.sim.dt, "t_end": run.sim.t_end,
           "runaway_temp_c": _celsius(run.sim.runaway_temp),
           "junction_node": run.sim.junction_node}
    if run.sim.t_ambient is not None:
        sim["ambient_c"] = _celsius(run.sim.t_ambient)

    gan = asdict(run.gan)
    gan["t_ref_c"] = _celsius(gan.pop("t_ref"))

    effective = {
        "device": dict(preset=run.preset, **device),
        "thermal": {"ambient_c": _celsius(thermal.t_ambient),
                    "nodes": nodes,
                    "static_r": thermal.static_r.tolist()},
        "drive": drive,
        "sim": sim,
        "gate_loop": asdict(run.gate_loop),
        "gan": gan,
    }
    return yaml.safe_dump(effective, sort_keys=False)

