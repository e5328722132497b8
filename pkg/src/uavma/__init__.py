"""Simulator and learning engine for a UAV that collects data from backscatter
devices with a mechanically steered directional (movable) antenna.

Modules, bottom up: ``world`` (geometry and scenarios), ``link`` (channel and
link budget), ``energy`` (propulsion and antenna actuation), ``env`` (the
episodic decision process), ``neural`` (numpy networks and Adam), ``sac``
(soft actor-critic and a plain actor-critic) and ``harness`` (configuration,
scripted baselines, sweeps, export and the command line).
"""

from .energy import EnergyLedger, MaParams, PropulsionParams, hover_power, ma_move, propulsion_power
from .env import CollectionEnv, EnvAction, EnvConfig, EpisodeSummary, map_action, serve_hover_point
from .errors import ConfigError, InfeasibleLinkError, ParameterError, TrainingError, UsageError
from .link import BackscatterCoeff, ChannelParams, data_rate, link_budget, los_probability, path_loss
from .world import BdSpec, Scenario, generate_scenario

__version__ = "0.1.0"

__all__ = [
    "EnergyLedger", "MaParams", "PropulsionParams", "hover_power", "ma_move", "propulsion_power",
    "CollectionEnv", "EnvAction", "EnvConfig", "EpisodeSummary", "map_action", "serve_hover_point",
    "ConfigError", "InfeasibleLinkError", "ParameterError", "TrainingError", "UsageError",
    "BackscatterCoeff", "ChannelParams", "data_rate", "link_budget", "los_probability", "path_loss",
    "BdSpec", "Scenario", "generate_scenario",
]
