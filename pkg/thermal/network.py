import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from errors import DimensionMismatchError, UnknownNodeError, ValidationError
from validators import value_non_negative, value_positive, values_finite

# Relative tolerance between the summed Foster resistances of a node and
# its static resistance entry.
STATIC_MATCH_RTOL = 1e-9


@dataclass(frozen=True)
class FosterStage:
    """Parallel RC pair of a Foster network."""
    r: float
    c: float

    def __post_init__(self) -> None:
        value_positive("r", self.r)
        value_positive("c", self.c)

    @property
    def tau(self) -> float:
        """Time constant r * c (s)."""
        return self.r * self.c


@dataclass(frozen=True, eq=False)
class ThermalModel:
    """Linear thermal model of the monitored nodes.

    Every node has a Foster network driven by the power of the device
    under test (source 0). The static matrix static_r[node][source] may
    add coupling to further heat sources; when omitted it is derived from
    the summed stage resistances.
    """
    nodes: Tuple[str, ...]
    stages: Tuple[Tuple[FosterStage, ...], ...]
    t_ambient: float
    static_r: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "stages",
                           tuple(tuple(s) for s in self.stages))
        self.__validate()

        if self.static_r is None:
            static_r = np.array([[sum(s.r for s in node_stages)]
                                 for node_stages in self.stages])
        else:
            static_r = np.array(self.static_r, dtype=float, ndmin=2)
        static_r.setflags(write=False)
        object.__setattr__(self, "static_r", static_r)

        self.__validate_static_r()

    def __validate(self) -> None:
        """Validate node names, stage lists and ambient temperature."""
        if len(self.nodes) == 0:
            raise ValidationError("nodes", [], "at least one node")
        if len(set(self.nodes)) != len(self.nodes):
            raise ValidationError("nodes", list(self.nodes), "unique names")
        if len(self.stages) != len(self.nodes):
            raise DimensionMismatchError(
                "stages", len(self.nodes), len(self.stages))
        value_positive("t_ambient", self.t_ambient)

        if self.static_r is None:
            for node, node_stages in zip(self.nodes, self.stages):
                if len(node_stages) == 0:
                    raise ValidationError(
                        "stages." + node, [],
                        "at least one stage when static_r is omitted")

    def __validate_static_r(self) -> None:
        """Validate the static matrix against the Foster networks."""
        static_r = self.static_r
        if static_r.ndim != 2 or static_r.shape[1] == 0:
            raise ValidationError("static_r", static_r.tolist(),
                                  "a matrix with one row per node")
        if static_r.shape[0] != len(self.nodes):
            raise DimensionMismatchError(
                "static_r", len(self.nodes), static_r.shape[0])

        for i, node in enumerate(self.nodes):
            values_finite("static_r", static_r[i])
            for value in static_r[i]:
                value_non_negative("static_r." + node, value)

            if len(self.stages[i]) == 0:
                continue
            r_sum = sum(s.r for s in self.stages[i])
            if not math.isclose(r_sum, static_r[i][0],
                                rel_tol=STATIC_MATCH_RTOL):
                raise ValidationError(
                    "static_r." + node, static_r[i][0],
                    "equal to the summed stage resistance {0}".format(r_sum))

    @property
    def sources(self) -> int:
        """Number of heat sources in the static matrix."""
        return self.static_r.shape[1]

    def index(self, node: str) -> int:
        """Position of the node in the model."""
        try:
            return self.nodes.index(node)
        except ValueError:
            raise UnknownNodeError(node, list(self.nodes))


@dataclass(frozen=True, eq=False)
class ThermalState:
    """Temperature rise of every Foster stage, per node (K)."""
    rises: Tuple[np.ndarray, ...] = field(default_factory=tuple)


def single_node_model(name: str, stages: Sequence[FosterStage],
                      t_ambient: float) -> ThermalModel:
    """Model with one node driven by the device under test."""
    return ThermalModel((name,), (tuple(stages),), t_ambient)


def initial_state(model: ThermalModel) -> ThermalState:
    """State at ambient temperature."""
    return ThermalState(tuple(np.zeros(len(node_stages))
                              for node_stages in model.stages))


def total_resistance(model: ThermalModel, node: str) -> float:
    """Steady-state resistance from the device under test to the node."""
    return float(model.static_r[model.index(node)][0])


def steady_state_temp(model: ThermalModel, p) -> np.ndarray:
    """Steady-state temperature of every node for the source powers p."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if p.shape != (model.sources,):
        raise DimensionMismatchError("p", model.sources, p.size)
    for value in p:
        value_non_negative("p", value)

    return model.t_ambient + model.static_r @ p


def step(model: ThermalModel, state: ThermalState, p: float,
         dt: float) -> ThermalState:
    """Advance the Foster networks by dt under constant power p.

    The update is the exact solution for piecewise constant power.
    """
    value_positive("dt", dt)
    value_non_negative("p", p)

    rises = []
    for node_stages, node_rises in zip(model.stages, state.rises):
        if len(node_stages) == 0:
            rises.append(node_rises)
            continue
        r = np.array([s.r for s in node_stages])
        tau = np.array([s.tau for s in node_stages])
        decay = np.exp(-dt / tau)
        charge = -np.expm1(-dt / tau)
        rises.append(node_rises * decay + p * r * charge)

    return ThermalState(tuple(rises))


def foster_response(stages: Sequence[FosterStage], t):
    """Unit step response of a Foster network (K/W)."""
    t = np.asarray(t, dtype=float)
    response = np.zeros_like(t)
    for stage in stages:
        response = response + stage.r * -np.expm1(-t / stage.tau)
    return response if response.ndim else float(response)


def zth(model: ThermalModel, node: str, t):
    """Step response of the node's Foster network (K/W)."""
    return foster_response(model.stages[model.index(node)], t)


def node_temperature(model: ThermalModel, state: ThermalState,
                     node: str) -> float:
    """Temperature of the node (K)."""
    i = model.index(node)
    if len(model.stages[i]) == 0:
        return model.t_ambient
    return model.t_ambient + float(np.sum(state.rises[i]))


def node_temperatures(model: ThermalModel, state: ThermalState) -> List[float]:
    """Temperatures of all nodes in model order (K)."""
    return [node_temperature(model, state, node) for node in model.nodes]
