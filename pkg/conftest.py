import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from device.mosfet import DeviceParams  # noqa: E402
from thermal.network import FosterStage, single_node_model  # noqa: E402

REFERENCE_CONFIG = os.path.join(os.path.dirname(os.path.abspath(__file__)),
                                "configs", "reference.yaml")


@pytest.fixture
def device() -> DeviceParams:
    """Reference parameter set: 1 A at 3.55 V and 25 °C."""
    return DeviceParams()


@pytest.fixture
def thermal():
    """Single junction node of 30 K/W with a 60 s time constant."""
    return single_node_model("T_j", [FosterStage(30.0, 2.0)], 298.15)


@pytest.fixture
def reference_config() -> str:
    return REFERENCE_CONFIG


@pytest.fixture
def reference_config_text() -> str:
    with open(REFERENCE_CONFIG, 'r', encoding='utf-8') as config_file:
        return config_file.read()
