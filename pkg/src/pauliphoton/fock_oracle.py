"""Brute-force fermionic Fock-space simulator.

States are sparse maps from occupation bitstrings to amplitudes. Modes are
ordered by (species, spin, k index); bit ``i`` of a key is the occupation of
the ``i``-th mode in that order, and creation/annihilation pick up the sign
(-1)**(number of occupied modes before the target mode).

The discretized pair operators use continuum-normalized grid operators,
e(k_j) = b_j / sqrt(h), so that sums over the grid with weights h converge
to the momentum integrals of the broadened pair operator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .momentum_overlaps import MomentumProfile, profile_eval

__all__ = [
    "ELECTRON",
    "HOLE",
    "SPECIES",
    "GridError",
    "DegenerateProfileError",
    "Mode",
    "MomentumGrid",
    "FockState",
    "vacuum",
    "zero_state",
    "apply_creation",
    "apply_annihilation",
    "apply_operator_string",
    "inner",
    "expectation",
    "grid_weights",
    "discretized_pair_creation",
    "oracle_density_matrix",
    "SectorState",
    "sector_inner",
]

ELECTRON = "electron"
HOLE = "hole"
SPECIES = (ELECTRON, HOLE)
SPIN_BASIS = ((0, 0), (0, 1), (1, 0), (1, 1))
MAX_SECTOR_TERMS = 20_000_000


class GridError(IndexError):
    """Mode outside the configured momentum grid."""


class DegenerateProfileError(ValueError):
    """Profile has no weight on the grid."""


@dataclass(frozen=True)
class Mode:
    species: str
    spin: int
    k_index: int

    def __post_init__(self):
        if self.species not in SPECIES:
            raise ValueError(f"unknown species {self.species!r}")
        if self.spin not in (0, 1):
            raise ValueError(f"spin must be 0 or 1, got {self.spin!r}")

    def sort_key(self):
        return (SPECIES.index(self.species), self.spin, self.k_index)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def position(self, n_k):
        """Bit position of this mode in a space with ``n_k`` momenta per (species, spin)."""
        if not 0 <= self.k_index < n_k:
            raise GridError(f"k index {self.k_index} outside grid of {n_k} points")
        return (SPECIES.index(self.species) * 2 + self.spin) * n_k + self.k_index


@dataclass(frozen=True)
class MomentumGrid:
    """Uniform grid of momenta."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 1:
            raise ValueError("grid needs at least one point")
        if pts.size > 1:
            steps = np.diff(pts)
            if np.any(steps <= 0):
                raise ValueError("grid points must be strictly increasing")
            if not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
                raise ValueError("grid points must be uniformly spaced")
        object.__setattr__(self, "points", pts)

    @classmethod
    def symmetric(cls, span, n_points):
        """``n_points`` points evenly covering [-span, span]."""
        if n_points < 2 or span <= 0:
            raise ValueError("symmetric grid needs span > 0 and at least 2 points")
        return cls(np.linspace(-span, span, int(n_points)))

    @classmethod
    def default_for(cls, widths, centers=(0.0,), min_points=1001):
        """Symmetric grid reaching 20 widths beyond the outermost center."""
        span = max(abs(c) for c in centers) + 20 * max(widths)
        n = max(min_points, 1001)
        return cls.symmetric(span, n if n % 2 else n + 1)

    @property
    def spacing(self):
        if self.points.size == 1:
            return 1.0
        return float(self.points[1] - self.points[0])

    def __len__(self):
        return int(self.points.size)

    def index_of(self, k, atol=1e-9):
        """Index of the grid point equal to ``k``."""
        i = int(np.argmin(np.abs(self.points - k)))
        if abs(self.points[i] - k) > atol * max(1.0, abs(k)):
            raise GridError(f"momentum {k} is not a grid point")
        return i


@dataclass(frozen=True)
class FockState:
    """Sparse superposition over occupation bitstrings.

    ``n_k`` is the number of momentum points per (species, spin) block.
    ``terms`` is not copied and must not be mutated after construction.
    """

    n_k: int
    terms: Dict[int, complex] = field(default_factory=dict)

    def norm2(self):
        return float(sum(abs(a) ** 2 for a in self.terms.values()))

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        _same_space(self, other)
        out = dict(self.terms)
        for key, amp in other.terms.items():
            out[key] = out.get(key, 0) + amp
        return FockState(self.n_k, _prune(out))

    def __mul__(self, c):
        if c == 0:
            return FockState(self.n_k, {})
        return FockState(self.n_k, {k: c * a for k, a in self.terms.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def occupied_modes(self, bits):
        """Modes occupied in bitstring ``bits``, in mode order."""
        out = []
        for pos in range(4 * self.n_k):
            if bits >> pos & 1:
                block, k = divmod(pos, self.n_k)
                out.append(Mode(SPECIES[block // 2], block % 2, k))
        return out


def _same_space(a, b):
    if a.n_k != b.n_k:
        raise GridError(f"states live on different grids ({a.n_k} vs {b.n_k} points)")


def _prune(terms):
    return {k: a for k, a in terms.items() if a != 0}


def vacuum(n_k):
    return FockState(int(n_k), {0: 1.0 + 0.0j})


def zero_state(n_k):
    return FockState(int(n_k), {})


def _parity_sign(bits, bit):
    return -1 if (bits & (bit - 1)).bit_count() & 1 else 1


def apply_creation(state, mode):
    """a†_mode |state>; terms with the mode already occupied vanish."""
    bit = 1 << mode.position(state.n_k)
    out = {}
    for bits, amp in state.terms.items():
        if bits & bit:
            continue
        out[bits | bit] = _parity_sign(bits, bit) * amp
    return FockState(state.n_k, out)


def apply_annihilation(state, mode):
    """a_mode |state>; terms with the mode empty vanish."""
    bit = 1 << mode.position(state.n_k)
    out = {}
    for bits, amp in state.terms.items():
        if not bits & bit:
            continue
        out[bits ^ bit] = _parity_sign(bits, bit) * amp
    return FockState(state.n_k, out)


def _apply_creation_sum(state, positions, weights):
    """sum_i weights[i] a†_{positions[i]} |state>, in one pass."""
    masks = [(1 << p, (1 << p) - 1, w) for p, w in zip(positions, weights)]
    out = {}
    get = out.get
    for bits, amp in state.terms.items():
        for bit, below, w in masks:
            if bits & bit:
                continue
            key = bits | bit
            if (bits & below).bit_count() & 1:
                out[key] = get(key, 0) - w * amp
            else:
                out[key] = get(key, 0) + w * amp
    return FockState(state.n_k, _prune(out))


def apply_operator_string(state, ops):
    """Apply ``ops`` = [(kind, Mode), ...] to ``state``, rightmost first.

    ``kind`` is ``"create"`` or ``"annihilate"``.
    """
    for kind, mode in reversed(list(ops)):
        if kind == "create":
            state = apply_creation(state, mode)
        elif kind == "annihilate":
            state = apply_annihilation(state, mode)
        else:
            raise ValueError(f"unknown operator kind {kind!r}")
        if state.is_zero():
            break
    return state


def inner(a, b):
    """<a|b>, conjugate-linear in ``a``."""
    _same_space(a, b)
    small, large, flip = (a, b, False) if len(a.terms) <= len(b.terms) else (b, a, True)
    total = 0j
    get = large.terms.get
    for key, amp in small.terms.items():
        other = get(key)
        if other is None:
            continue
        total += amp * np.conj(other) if flip else np.conj(amp) * other
    return complex(total)


def expectation(ops, n_k):
    """Vacuum expectation <0| ops |0> on a space of ``n_k`` momenta."""
    state = apply_operator_string(vacuum(n_k), ops)
    return state.terms.get(0, 0j) + 0j


def grid_weights(profile, grid):
    """Profile sampled on the grid; zero where a tabulated profile is undefined."""
    pts = grid.points
    if profile.family == "tabulated":
        lo, hi = profile.support
        vals = np.zeros_like(pts)
        inside = (pts >= lo) & (pts <= hi)
        vals[inside] = profile_eval(profile, pts[inside])
        return vals
    return np.asarray(profile_eval(profile, pts), dtype=float)


def _single_particle_operator(profile, species, spin, grid):
    """Positions and weights of sum_j f(k_j - k) h e†(k_j) with e† = b†/sqrt(h)."""
    w = grid_weights(profile, grid) * math.sqrt(grid.spacing)
    nz = np.flatnonzero(w)
    if nz.size == 0:
        raise DegenerateProfileError(
            f"{profile} has no weight on the grid [{grid.points[0]}, {grid.points[-1]}]"
        )
    n_k = len(grid)
    positions = [Mode(species, spin, int(j)).position(n_k) for j in nz]
    return positions, [float(x) for x in w[nz]]


def discretized_pair_creation(profile_e, profile_h, spin, grid):
    """Grid version of the broadened pair creation operator Ψ†_ss.

    Returns a function applying
    sum_{j,l} f_e(k_j - k) f_h(k~_l - k~) h^2 e†_s(k_j) h†_s(k~_l)
    to a :class:`FockState` or :class:`SectorState`. ``profile_h`` should
    already be centered at the hole momentum k~ = -k.
    """
    e_pos, e_w = _single_particle_operator(profile_e, ELECTRON, spin, grid)
    h_pos, h_w = _single_particle_operator(profile_h, HOLE, spin, grid)

    def apply(state):
        if state.n_k != len(grid):
            raise GridError(f"state has {state.n_k} momenta, grid has {len(grid)}")
        if isinstance(state, SectorState):
            return state.create_sum(h_pos, h_w).create_sum(e_pos, e_w)
        return _apply_creation_sum(_apply_creation_sum(state, h_pos, h_w), e_pos, e_w)

    return apply


def _species_operator(profile, species, spin, grid, backend="sector"):
    pos, w = _single_particle_operator(profile, species, spin, grid)
    if backend == "sector":
        return lambda state: state.create_sum(pos, w)
    return lambda state: _apply_creation_sum(state, pos, w)


@dataclass(frozen=True)
class SectorState:
    """Fixed-particle-number state with vectorized storage.

    Row ``t`` of ``occ`` lists the occupied bit positions of term ``t`` in
    ascending order, which is the same information as the bitstring key of
    :class:`FockState`. Used for the large-grid oracle where the dict
    representation is too slow.
    """

    n_k: int
    occ: np.ndarray
    amp: np.ndarray

    @classmethod
    def vacuum(cls, n_k):
        return cls(int(n_k), np.zeros((1, 0), dtype=np.int64), np.ones(1, dtype=complex))

    @classmethod
    def from_fock(cls, state):
        rows = [_positions(bits) for bits in state.terms]
        n = {len(r) for r in rows}
        if len(n) > 1:
            raise ValueError("state mixes particle numbers")
        width = n.pop() if n else 0
        occ = np.array(rows, dtype=np.int64).reshape(len(rows), width)
        amp = np.array(list(state.terms.values()), dtype=complex)
        return cls(state.n_k, occ, amp)

    def to_fock(self):
        terms = {}
        for row, a in zip(self.occ, self.amp):
            terms[sum(1 << int(p) for p in row)] = complex(a)
        return FockState(self.n_k, terms)

    def norm2(self):
        return float(np.sum(np.abs(self.amp) ** 2))

    def keys(self):
        """One int64 per term, unique per occupation pattern."""
        base = 4 * self.n_k
        if self.occ.shape[1] and base ** self.occ.shape[1] >= 2**63:
            raise OverflowError("too many particles for int64 keys")
        key = np.zeros(len(self.amp), dtype=np.int64)
        for col in range(self.occ.shape[1]):
            key = key * base + self.occ[:, col]
        return key

    def create_sum(self, positions, weights, max_terms=MAX_SECTOR_TERMS):
        """sum_i weights[i] a†_{positions[i]} applied to this state."""
        pos = np.asarray(positions, dtype=np.int64)
        w = np.asarray(weights, dtype=complex)
        occ = self.occ
        if len(self.amp) * len(pos) > max_terms:
            raise MemoryError(
                f"{len(self.amp)} terms x {len(pos)} modes exceeds {max_terms} candidate terms"
            )
        # (terms, candidates, particles)
        below = occ[:, None, :] < pos[None, :, None]
        taken = (occ[:, None, :] == pos[None, :, None]).any(axis=2)
        sign = np.where(below.sum(axis=2) % 2, -1.0, 1.0)
        amp = sign * w[None, :] * self.amp[:, None]
        t_idx, c_idx = np.nonzero(~taken)
        new = np.concatenate([occ[t_idx], pos[c_idx, None]], axis=1)
        new.sort(axis=1)
        out = SectorState(self.n_k, new, amp[t_idx, c_idx])
        return out._merged()

    def _merged(self):
        if self.amp.size == 0:
            return self
        keys = self.keys()
        uniq, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
        re = np.bincount(inverse, weights=self.amp.real, minlength=uniq.size)
        im = np.bincount(inverse, weights=self.amp.imag, minlength=uniq.size)
        amp = re + 1j * im
        keep = amp != 0
        return SectorState(self.n_k, self.occ[first][keep], amp[keep])


def _positions(bits):
    out = []
    pos = 0
    while bits:
        if bits & 1:
            out.append(pos)
        bits >>= 1
        pos += 1
    return out


def sector_inner(a, b):
    """<a|b> for two :class:`SectorState` objects."""
    if a.n_k != b.n_k:
        raise GridError(f"states live on different grids ({a.n_k} vs {b.n_k} points)")
    if a.occ.shape[1] != b.occ.shape[1] or a.amp.size == 0 or b.amp.size == 0:
        return 0j
    _, ia, ib = np.intersect1d(a.keys(), b.keys(), assume_unique=True, return_indices=True)
    return complex(np.sum(np.conj(a.amp[ia]) * b.amp[ib]))


def _gram(make_op, spec_k, spec_kp, n_k, backend):
    """4x4 matrix <0| X_r(k) X_r'(k') X†_s(k) X†_s'(k') |0>.

    ``make_op(spec, spin)`` builds the creation operator X† for the mode
    described by ``spec``. Rows are (r, r') and columns (s, s') in the order
    00, 01, 10, 11.
    """
    vac, dot = (SectorState.vacuum(n_k), sector_inner) if backend == "sector" else (vacuum(n_k), inner)
    ops_k = {s: make_op(spec_k, s) for s in (0, 1)}
    ops_kp = {s: make_op(spec_kp, s) for s in (0, 1)}
    one_k = {s: ops_k[s](vac) for s in (0, 1)}
    one_kp = {s: ops_kp[s](vac) for s in (0, 1)}
    kets = {(s, sp): ops_k[s](one_kp[sp]) for s, sp in SPIN_BASIS}
    # bra for (r, r') is the adjoint of X†_r'(k') X†_r(k) |0>
    bras = {(r, rp): ops_kp[rp](one_k[r]) for r, rp in SPIN_BASIS}
    out = np.zeros((4, 4), dtype=complex)
    for i, rr in enumerate(SPIN_BASIS):
        for j, ss in enumerate(SPIN_BASIS):
            out[i, j] = dot(bras[rr], kets[ss])
    return out


def oracle_density_matrix(
    profile_k: MomentumProfile,
    profile_kp: MomentumProfile,
    grid: MomentumGrid,
    hole_k: Optional[MomentumProfile] = None,
    hole_kp: Optional[MomentumProfile] = None,
    factorize: bool = True,
    backend: str = "sector",
) -> np.ndarray:
    """Unnormalized two-pair spin density matrix from explicit Fock states.

    Entry [(r, r'), (s, s')] is <0| Ψ_r(k) Ψ_r'(k') Ψ†_s(k) Ψ†_s'(k') |0>
    with the grid pair operators of :func:`discretized_pair_creation`.

    With ``factorize=True`` the electron and hole correlators are computed in
    their own Fock spaces and multiplied, which keeps the term count at
    O(n_k^2). ``factorize=False`` builds the four-particle states directly;
    only use it on small grids (O(n_k^4) terms).

    ``backend`` selects the vectorized ``"sector"`` storage or the
    bitstring-keyed ``"dict"`` storage of :class:`FockState`.
    """
    if backend not in ("sector", "dict"):
        raise ValueError(f"unknown backend {backend!r}")
    hole_k = profile_k.mirrored() if hole_k is None else hole_k
    hole_kp = profile_kp.mirrored() if hole_kp is None else hole_kp
    n_k = len(grid)
    if factorize:
        ge = _gram(
            lambda p, s: _species_operator(p, ELECTRON, s, grid, backend),
            profile_k, profile_kp, n_k, backend,
        )
        gh = _gram(
            lambda p, s: _species_operator(p, HOLE, s, grid, backend),
            hole_k, hole_kp, n_k, backend,
        )
        return ge * gh
    return _gram(
        lambda pair, s: discretized_pair_creation(pair[0], pair[1], s, grid),
        (profile_k, hole_k),
        (profile_kp, hole_kp),
        n_k,
        backend,
    )
