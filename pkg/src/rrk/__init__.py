"""Rate-region toolkit for discrete memoryless interference networks."""

from .probability import (
    InputEnsemble,
    JointDistribution,
    NetworkSpec,
    build_joint,
    compose_virtual_channel,
    load_ensemble,
    load_network_spec,
    uniform_ensemble,
)
from .regions import (
    Intersection,
    LinearRateInequality,
    Polytope,
    Union,
    Verdict,
    boundary_2d,
    mac_region,
    member,
    min_form_member,
    optimal_region,
    receiver_region,
)

__all__ = [
    "InputEnsemble",
    "Intersection",
    "JointDistribution",
    "LinearRateInequality",
    "NetworkSpec",
    "Polytope",
    "Union",
    "Verdict",
    "boundary_2d",
    "build_joint",
    "compose_virtual_channel",
    "load_ensemble",
    "load_network_spec",
    "mac_region",
    "member",
    "min_form_member",
    "optimal_region",
    "receiver_region",
    "uniform_ensemble",
]
