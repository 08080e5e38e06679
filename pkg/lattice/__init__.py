# lattice/__init__.py
from .geometry import (
    STEPS,
    Domain,
    DomainKind,
    LatticePoint,
    build_domain,
    custom_domain,
    linf_norm,
    nearest_axis_point,
    parse_descriptor,
    segment,
)
from .loops import (
    Loop,
    canonical_from_indices,
    canonicalize_loop,
    enumerate_loops,
    loop_nu_mass,
    parse_loop,
)

__all__ = [
    "STEPS",
    "Domain",
    "DomainKind",
    "LatticePoint",
    "build_domain",
    "custom_domain",
    "linf_norm",
    "nearest_axis_point",
    "parse_descriptor",
    "segment",
    "Loop",
    "canonical_from_indices",
    "canonicalize_loop",
    "enumerate_loops",
    "loop_nu_mass",
    "parse_loop",
]
