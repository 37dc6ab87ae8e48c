"""Energy-aware planning and resource allocation for a UGV-mounted backscatter reader.

Typical use::

    from ugv_backscatter import ScenarioConfig, plan, sample_channels, allocate_fd

    config = ScenarioConfig()
    hp = plan(config)
    channels = sample_channels(seed=0, plan=hp, config=config, mode="fd")
    allocation, energy = allocate_fd(hp, channels, config, "jo-sca")
"""

from .channels import sample_channels
from .fd import allocate_fd
from .harness import run_experiment, run_trial
from .hd import allocate_hd
from .model import Allocation, ChannelSet, ConfigError, EnergyReport, HexPlan, ScenarioConfig, load_config, validate
from .planner import PlanningError, plan

__all__ = [
    "Allocation",
    "ChannelSet",
    "ConfigError",
    "EnergyReport",
    "HexPlan",
    "PlanningError",
    "ScenarioConfig",
    "allocate_fd",
    "allocate_hd",
    "load_config",
    "plan",
    "run_experiment",
    "run_trial",
    "sample_channels",
    "validate",
]

__version__ = "0.1.0"
