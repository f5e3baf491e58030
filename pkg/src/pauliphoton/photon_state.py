"""Two-pair spin density matrix and its image in the photon polarization basis."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from .momentum_overlaps import OverlapQuad

__all__ = [
    "BASIS_LABELS",
    "ELECTRON_SPIN",
    "HOLE_JZ",
    "SIGMA_MINUS",
    "SIGMA_PLUS",
    "DegenerateStateError",
    "SelectionRuleViolation",
    "TwoQubitDM",
    "SelectionRuleTable",
    "DEFAULT_RULES",
    "assemble_density_matrix",
    "normalize",
    "map_to_polarization",
    "bell_state",
    "dumps",
    "loads",
    "as_dict",
]

BASIS_LABELS = ("00", "01", "10", "11")

# logical bit -> physical spin projection
ELECTRON_SPIN = {0: -0.5, 1: 0.5}
HOLE_JZ = {0: -1.5, 1: 1.5}

SIGMA_MINUS = "sigma-"
SIGMA_PLUS = "sigma+"
POLARIZATION_BIT = {SIGMA_MINUS: 0, SIGMA_PLUS: 1}

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
TRACE_TOL = 1e-14


class DegenerateStateError(ValueError):
    """Density matrix with (numerically) zero trace."""


class SelectionRuleViolation(ValueError):
    """State populates a spin combination with no allowed transition."""


@dataclass(frozen=True)
class TwoQubitDM:
    """4x4 density matrix in the product basis |00>, |01>, |10>, |11>.

    ``basis`` is ``"spin"`` (bits are the logical spins of pair 1 and pair 2)
    or ``"photon"`` (bits are photon polarizations, 0 = sigma-, 1 = sigma+).
    """

    entries: np.ndarray
    basis: str = "spin"
    normalized: bool = False

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
        if self.basis not in ("spin", "photon"):
            raise ValueError(f"unknown basis {self.basis!r}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def trace(self):
        return float(np.trace(self.entries).real)

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.entries)

    def check(self, hermitian_tol=HERMITIAN_TOL, psd_tol=PSD_TOL):
        """Raise ValueError unless Hermitian, PSD and (if flagged) unit trace."""
        m = self.entries
        scale = max(1.0, float(np.max(np.abs(m))))
        if np.max(np.abs(m - m.conj().T)) > hermitian_tol * scale:
            raise ValueError("density matrix is not Hermitian")
        if self.eigenvalues().min() < -psd_tol * scale:
            raise ValueError("density matrix is not positive semidefinite")
        if self.normalized and abs(self.trace - 1) > 1e-12:
            raise ValueError(f"normalized density matrix has trace {self.trace}")
        return self


def assemble_density_matrix(q: OverlapQuad) -> TwoQubitDM:
    """Unnormalized X-shaped spin density matrix built from the overlaps."""
    q.validate()
    outer = (q.L - q.M) * (q.Ltilde - q.Mtilde)
    direct = q.L * q.Ltilde
    exchange = q.M * q.Mtilde
    m = np.diag([outer, direct, direct, outer]).astype(complex)
    m[1, 2] = m[2, 1] = exchange
    return TwoQubitDM(m, "spin", False)


def normalize(dm: TwoQubitDM) -> TwoQubitDM:
    tr = np.trace(dm.entries)
    if tr.real <= TRACE_TOL:
        raise DegenerateStateError(f"cannot normalize a state with trace {tr.real:.3e}")
    return TwoQubitDM(dm.entries / tr.real, dm.basis, True)


def bell_state(basis="photon"):
    """(|01> + |10>)/sqrt(2) as a normalized density matrix."""
    psi = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)
    return TwoQubitDM(np.outer(psi, psi.conj()), basis, True)


@dataclass(frozen=True)
class SelectionRuleTable:
    """Photon polarization emitted by each (electron spin, hole spin) pair.

    Keys are logical bits; values are ``"sigma-"``, ``"sigma+"`` or None
    (forbidden). Missing pairs are forbidden.
    """

    rules: Mapping[Tuple[int, int], Optional[str]] = field(
        default_factory=lambda: {(0, 0): SIGMA_MINUS, (1, 1): SIGMA_PLUS}
    )

    @classmethod
    def from_physical(cls, rules):
        """Build from physical labels, e.g. {(-0.5, -1.5): "sigma-", ...}."""
        e_bit = {v: k for k, v in ELECTRON_SPIN.items()}
        h_bit = {v: k for k, v in HOLE_JZ.items()}
        return cls({(e_bit[e], h_bit[h]): pol for (e, h), pol in rules.items()})

    def polarization(self, e_spin, h_spin):
        return self.rules.get((e_spin, h_spin))

    def swapped(self):
        """Same table with sigma+ and sigma- exchanged."""
        flip = {SIGMA_MINUS: SIGMA_PLUS, SIGMA_PLUS: SIGMA_MINUS, None: None}
        return SelectionRuleTable({k: flip[v] for k, v in self.rules.items()})


DEFAULT_RULES = SelectionRuleTable()


def map_to_polarization(dm: TwoQubitDM, rules: SelectionRuleTable = DEFAULT_RULES) -> TwoQubitDM:
    """Relabel a spin-basis matrix into the photon polarization basis.

    Each pair recombines with electron and hole sharing the logical spin s,
    so photon bit = polarization bit of rules[(s, s)].
    """
    if dm.basis != "spin":
        raise ValueError("map_to_polarization expects a spin-basis matrix")
    bit_map: Dict[int, int] = {}
    for s in (0, 1):
        pol = rules.polarization(s, s)
        if pol is not None:
            bit_map[s] = POLARIZATION_BIT[pol]
    # basis index i = 2*s1 + s2
    support = np.flatnonzero(np.any(dm.entries != 0, axis=0) | np.any(dm.entries != 0, axis=1))
    for i in support:
        for s in divmod(int(i), 2):
            if s not in bit_map:
                raise SelectionRuleViolation(
                    f"spin state |{BASIS_LABELS[i]}> needs a transition for spin {s}, "
                    "which the selection rules forbid"
                )
    if len(set(bit_map.values())) != len(bit_map):
        raise SelectionRuleViolation("selection rules map both spins to one polarization")
    # complete to a permutation of {0, 1} so unpopulated states stay in place
    free = [b for b in (0, 1) if b not in bit_map.values()]
    for s in (0, 1):
        if s not in bit_map:
            bit_map[s] = free.pop(0)
    perm = [2 * bit_map[s1] + bit_map[s2] for s1, s2 in (divmod(i, 2) for i in range(4))]
    out = np.zeros((4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            out[perm[i], perm[j]] = dm.entries[i, j]
    return TwoQubitDM(out, "photon", dm.normalized)


def as_dict(dm):
    flat = dm.entries.reshape(-1)
    return {
        "basis": dm.basis,
        "labels": list(BASIS_LABELS),
        "normalized": dm.normalized,
        "entries": [[float(z.real), float(z.imag)] for z in flat],
    }


def dumps(dm: TwoQubitDM, **kwargs) -> str:
    """Serialize as JSON: basis tag plus 16 row-major [re, im] pairs."""
    return json.dumps(as_dict(dm), **kwargs)


def loads(text) -> TwoQubitDM:
    data = json.loads(text) if isinstance(text, str) else text
    pairs = data["entries"]
    if len(pairs) != 16:
        raise ValueError(f"expected 16 entries, got {len(pairs)}")
    m = np.array([complex(re, im) for re, im in pairs]).reshape(4, 4)
    return TwoQubitDM(m, data["basis"], bool(data.get("normalized", False)))
