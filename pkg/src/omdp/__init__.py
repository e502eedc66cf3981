"""SAT-based certification of monotone-diameter bounds for oriented matroid programs."""

from omdp.core import (
    Chirotope,
    GroundSet,
    OmpDigraph,
    SignVector,
    check_gp3,
    chi_of,
    circuit_on_support,
    cocircuit_on_zeroset,
    program_digraph,
    program_vertices,
    sort_with_parity,
)

__all__ = [
    "Chirotope",
    "GroundSet",
    "OmpDigraph",
    "SignVector",
    "check_gp3",
    "chi_of",
    "circuit_on_support",
    "cocircuit_on_zeroset",
    "program_digraph",
    "program_vertices",
    "sort_with_parity",
]
