"""Exact twisted-conjugacy computations for unitriangular groups UT_n(R)."""

from .automorphism import HeisenbergAuto, NormalFormAuto
from .engine import (
    CentralSubgroupH,
    NotConjugate,
    ReidemeisterValue,
    central_conjugator,
    central_subgroup_H,
    r_infinity_sweep,
    reidemeister_number,
    spectrum_sample,
)
from .lattice import INF
from .rings import Q, Z, gaussian, parse_ring, quadratic
from .unitriangular import UniTriMatrix, transvection

__version__ = "0.1.0"

__all__ = [
    "CentralSubgroupH",
    "HeisenbergAuto",
    "INF",
    "NormalFormAuto",
    "NotConjugate",
    "Q",
    "ReidemeisterValue",
    "UniTriMatrix",
    "Z",
    "central_conjugator",
    "central_subgroup_H",
    "gaussian",
    "parse_ring",
    "quadratic",
    "r_infinity_sweep",
    "reidemeister_number",
    "spectrum_sample",
    "transvection",
]
