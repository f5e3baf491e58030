"""Vacuum expectation values of fermionic operator strings by Wick contraction.

A string's vacuum expectation is the signed sum over perfect matchings in
which every annihilator is paired with a creator somewhere to its right.
The sign of a matching is (-1)**(number of crossing chords). Contraction
values come from a kernel, so the same enumeration serves discrete modes
(Kronecker kernel) and smeared momentum modes (overlap kernel).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Iterator, List, Sequence, Tuple

from .momentum_overlaps import OverlapQuad

__all__ = [
    "CREATE",
    "ANNIHILATE",
    "OpSymbol",
    "create",
    "annihilate",
    "kronecker_kernel",
    "overlap_kernel",
    "matchings",
    "crossing_sign",
    "permutation_sign",
    "vacuum_expectation",
    "smeared_matrix_element",
    "pair_correlator",
]

CREATE = "create"
ANNIHILATE = "annihilate"


@dataclass(frozen=True)
class OpSymbol:
    kind: str
    species: str
    spin: int
    label: Hashable

    def __post_init__(self):
        if self.kind not in (CREATE, ANNIHILATE):
            raise ValueError(f"unknown operator kind {self.kind!r}")

    def dagger(self):
        kind = ANNIHILATE if self.kind == CREATE else CREATE
        return OpSymbol(kind, self.species, self.spin, self.label)


def create(species, spin, label):
    return OpSymbol(CREATE, species, spin, label)


def annihilate(species, spin, label):
    return OpSymbol(ANNIHILATE, species, spin, label)


Kernel = Callable[[OpSymbol, OpSymbol], object]


def kronecker_kernel(a, c):
    """{a, c†} for discrete modes: 1 when species, spin and label all match."""
    return int(a.species == c.species and a.spin == c.spin and a.label == c.label)


def overlap_kernel(amplitude):
    """Kernel for smeared modes.

    ``amplitude(a_label, c_label)`` returns int conj(f_a) f_c for the two
    momentum profiles named by the labels; species and spin must match.
    """

    def kernel(a, c):
        if a.species != c.species or a.spin != c.spin:
            return 0
        return amplitude(a.label, c.label)

    return kernel


def matchings(ops: Sequence[OpSymbol]) -> Iterator[List[Tuple[int, int]]]:
    """Yield every pairing of annihilators with creators to their right.

    Each matching is a list of (annihilator index, creator index).
    """
    n = len(ops)
    if n % 2:
        return

    def rec(free):
        if not free:
            yield []
            return
        i = free[0]
        if ops[i].kind != ANNIHILATE:
            return
        for pos in range(1, len(free)):
            j = free[pos]
            if ops[j].kind != CREATE:
                continue
            rest = free[1:pos] + free[pos + 1:]
            for m in rec(rest):
                yield [(i, j)] + m

    yield from rec(list(range(n)))


def crossing_sign(matching):
    """(-1)**(number of crossing chord pairs)."""
    crossings = 0
    for x, (a, b) in enumerate(matching):
        for c, d in matching[x + 1:]:
            if a < c < b < d or c < a < d < b:
                crossings += 1
    return -1 if crossings % 2 else 1


def permutation_sign(matching):
    """Parity of the permutation that lists each pair's indices adjacently."""
    perm = [idx for pair in matching for idx in pair]
    sign = 1
    seen = [False] * len(perm)
    rank = {v: i for i, v in enumerate(sorted(perm))}
    p = [rank[v] for v in perm]
    for start in range(len(p)):
        if seen[start]:
            continue
        length = 0
        k = start
        while not seen[k]:
            seen[k] = True
            k = p[k]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def vacuum_expectation(ops: Sequence[OpSymbol], kernel: Kernel = kronecker_kernel):
    """<0| ops[0] ops[1] ... ops[-1] |0> as a signed sum over contractions.

    Works with any kernel values supporting ``*`` and ``+`` (floats,
    complex numbers, sympy expressions). Strings with no valid matching
    evaluate to 0.
    """
    ops = list(ops)
    n_create = sum(op.kind == CREATE for op in ops)
    if len(ops) % 2 or 2 * n_create != len(ops):
        return 0
    total = 0
    for m in matchings(ops):
        term = crossing_sign(m)
        for i, j in m:
            term = term * kernel(ops[i], ops[j])
            if term == 0:
                break
        total = total + term
    return total


def pair_correlator(species, r, rp, s, sp, kernel, labels=("k", "k'")):
    """<0| x_r(k) x_r'(k') x†_s(k) x†_s'(k') |0> for one species."""
    k, kp = labels
    ops = [
        annihilate(species, r, k),
        annihilate(species, rp, kp),
        create(species, s, k),
        create(species, sp, kp),
    ]
    return vacuum_expectation(ops, kernel)


def smeared_matrix_element(r, rp, s, sp, q: OverlapQuad):
    """Two-pair spin matrix element for broadened modes.

    Nonzero only for r = r' = s = s' ((L-M)(L~-M~)), r = s != r' = s'
    (L L~) and r = s' != r' = s (M M~).
    """
    if r == rp == s == sp:
        return (q.L - q.M) * (q.Ltilde - q.Mtilde)
    if r == s and rp == sp and r != rp:
        return q.L * q.Ltilde
    if r == sp and rp == s and r != rp:
        return q.M * q.Mtilde
    return 0.0
