from .utils import CustomPair, IntervalSpec, SimConfig, TestParams, load_sim_config, parse_sim_config

__all__ = [
    "CustomPair",
    "IntervalSpec",
    "SimConfig",
    "TestParams",
    "load_sim_config",
    "parse_sim_config",
]
