"""LoRa controlled-flooding mesh simulator with an SDN control plane."""

from .wire import (
    BROADCAST_ID,
    ControlFrame,
    PackedResponse,
    baseline_verbose_size,
    decode_frame,
    encode_frame,
    pack_response,
    unpack_response,
)
from .node import ACTIONS, ACTION_IDS, MessageCounters, NodeState, UnknownAction
from .radio import Link, RadioConfig, Topology, airtime, current_channel
from .sim import Simulator
from .scenario import Scenario, default_scenario, load_scenario, save_scenario
from .controller import Controller, DeviceRecord
from .harness import (
    MetricsReport,
    build_world,
    compute_rates,
    export_report,
    run_field_workload,
    verify_determinism,
)

__version__ = "0.1.0"
