"""uavsim: compares UAV charging strategies for IoT data collection missions.

Deterministic, time-stepped simulation of four drone types (non-charged,
station-charged, tethered with dock/undock, laser-powered) over randomly
scattered IoT clusters, with a paired-seed Monte Carlo harness.
"""

from .energy import BatteryState, LaserLink, PowerModel
from .engine import SimConfig, Trace, run_episode, run_paired_trial
from .metrics import WorldConfig, run_monte_carlo
from .policy import DroneMode, DroneParams, DroneState, Policy
from .world import Position, Scenario, generate_scenario

__version__ = "0.1.0"

__all__ = [
    "BatteryState", "LaserLink", "PowerModel", "SimConfig", "Trace",
    "run_episode", "run_paired_trial", "WorldConfig", "run_monte_carlo",
    "DroneMode", "DroneParams", "DroneState", "Policy", "Position",
    "Scenario", "generate_scenario", "__version__",
]
