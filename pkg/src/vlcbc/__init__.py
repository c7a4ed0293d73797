"""Link-level Monte Carlo simulator for a dual-hop VLC-to-backscatter relay.

A visible-light downlink illuminates a backscatter device (BD) that harvests
the DC component of the optical signal and remodulates an ambient 2.45 GHz
carrier toward an RF user. Both hops are assessed with finite-blocklength
achievable rates and the end-to-end outage is the union of the per-hop
outage events.
"""

__version__ = "0.1.0"

from .geometry import Point3, DevicePose, LedAp, Scenario
from .vlc_link import VlcParams, VlcLinkState
from .energy_harvest import EnergyParams
from .rf_link import RfParams, BcLinkState
from .fbl import FblParams, FblAssessment
from .config import SimulationConfig, load_config, parse_config, ConfigError
from .montecarlo import (
    CampaignConfig,
    CampaignStats,
    HeatmapGrid,
    run_drop,
    run_campaign,
    run_sweep,
    compute_heatmap,
)

__all__ = [
    "__version__",
    "Point3", "DevicePose", "LedAp", "Scenario",
    "VlcParams", "VlcLinkState",
    "EnergyParams",
    "RfParams", "BcLinkState",
    "FblParams", "FblAssessment",
    "SimulationConfig", "load_config", "parse_config", "ConfigError",
    "CampaignConfig", "CampaignStats", "HeatmapGrid",
    "run_drop", "run_campaign", "run_sweep", "compute_heatmap",
]
