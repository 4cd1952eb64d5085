"""Secrecy-rate maximization for an active-RIS-assisted MISO wiretap channel.

Joint transmit-beamformer / reflection-matrix optimization via alternating
optimization, with passive-RIS and no-RIS baselines and a seeded Monte-Carlo
experiment harness.
"""

from risec.channel import ChannelSet, ScenarioGeometry, generate_channels
from risec.system import SystemParams, secrecy_rate
from risec.driver import AoConfig, alternating_optimize, no_ris_baseline, passive_baseline

__all__ = [
    "ChannelSet",
    "ScenarioGeometry",
    "generate_channels",
    "SystemParams",
    "secrecy_rate",
    "AoConfig",
    "alternating_optimize",
    "passive_baseline",
    "no_ris_baseline",
]

__version__ = "0.1.0"
