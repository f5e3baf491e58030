"""Photon polarization entanglement extracted from two Pauli-correlated electron-hole pairs.

Submodules:

- ``momentum_overlaps``: momentum profiles and the direct/exchange overlaps L, M
- ``photon_state``: two-pair spin density matrix and selection-rule mapping
- ``entanglement_measures``: concurrence (general and X-state) and negativity
- ``wick_engine``: vacuum expectation values by Wick contraction
- ``fock_oracle``: brute-force Fock-space simulator used as an oracle
- ``sweep_cli``: parameter sweeps and the ``pauliphoton`` command
"""
from .entanglement_measures import (
    EntanglementReport,
    concurrence,
    concurrence_x_state,
    entanglement_report,
    negativity,
)
from .momentum_overlaps import (
    MomentumProfile,
    OverlapQuad,
    compute_L,
    compute_M,
    overlap_quad,
)
from .photon_state import (
    SelectionRuleTable,
    TwoQubitDM,
    assemble_density_matrix,
    map_to_polarization,
    normalize,
)

__all__ = [
    "EntanglementReport",
    "MomentumProfile",
    "OverlapQuad",
    "SelectionRuleTable",
    "TwoQubitDM",
    "assemble_density_matrix",
    "compute_L",
    "compute_M",
    "concurrence",
    "concurrence_x_state",
    "entanglement_report",
    "map_to_polarization",
    "negativity",
    "normalize",
    "overlap_quad",
]

__version__ = "0.1.0"
