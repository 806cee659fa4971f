from .bl_metric import (
    BlProblem,
    bernoulli_distance,
    d_bl,
    d_bl_bruteforce,
    d_bl_to_set,
    d_tv,
    default_resolution,
    region_separation,
)

__all__ = [
    "BlProblem",
    "bernoulli_distance",
    "d_bl",
    "d_bl_bruteforce",
    "d_bl_to_set",
    "d_tv",
    "default_resolution",
    "region_separation",
]
