"""Simple cubic lattice sites, compact site keys, and the 48-element
octahedral symmetry group.

The symmetry group consists of all signed permutations of the coordinate
axes.  Its element order is fixed and is part of the public contract:
canonical representatives (and therefore the extension vectors accumulated
under a chosen canonicalizing element) are only reproducible if every
implementation enumerates the group identically.  The order used here is

    index = (permutation index) * 8 + (sign index)

where permutations of (x, y, z) are listed lexicographically and the sign
index runs 0..7 in binary order with bit 2 flipping x, bit 1 flipping y and
bit 0 flipping z (0 meaning +1).  Index 0 is the identity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, NamedTuple

__all__ = [
    "Point",
    "SymOp",
    "CanonicalSubset",
    "ORIGIN",
    "octahedral_group",
    "apply_op",
    "compose",
    "invert",
    "encode",
    "decode",
    "canonicalize",
]


class Point(NamedTuple):
    """A site of the simple cubic lattice (integer coordinates)."""

    x: int
    y: int
    z: int

    def norm_sq(self) -> int:
        return self.x * self.x + self.y * self.y + self.z * self.z


ORIGIN = Point(0, 0, 0)


class SymOp(NamedTuple):
    """A signed axis permutation: output axis i takes sign[i] * input[perm[i]]."""

    perm: tuple[int, int, int]
    signs: tuple[int, int, int]


def apply_op(op: SymOp, p: Point) -> Point:
    """Apply a symmetry to a point.  Preserves the squared norm exactly."""
    c = (p.x, p.y, p.z)
    return Point(
        op.signs[0] * c[op.perm[0]],
        op.signs[1] * c[op.perm[1]],
        op.signs[2] * c[op.perm[2]],
    )


def compose(g: SymOp, h: SymOp) -> SymOp:
    """Return g∘h, the operation applying h first and then g."""
    perm = tuple(h.perm[g.perm[i]] for i in range(3))
    signs = tuple(g.signs[i] * h.signs[g.perm[i]] for i in range(3))
    return SymOp(perm, signs)  # type: ignore[arg-type]


def invert(g: SymOp) -> SymOp:
    """Return the inverse operation."""
    perm = [0, 0, 0]
    signs = [0, 0, 0]
    for i in range(3):
        perm[g.perm[i]] = i
        signs[g.perm[i]] = g.signs[i]
    return SymOp(tuple(perm), tuple(signs))  # type: ignore[arg-type]


def _build_group() -> tuple[SymOp, ...]:
    ops = []
    for perm in itertools.permutations((0, 1, 2)):
        for s in range(8):
            signs = tuple(-1 if (s >> (2 - axis)) & 1 else 1 for axis in range(3))
            ops.append(SymOp(perm, signs))  # type: ignore[arg-type]
    return tuple(ops)


_GROUP = _build_group()


def octahedral_group() -> tuple[SymOp, ...]:
    """All 48 signed axis permutations, in the fixed documented order."""
    return _GROUP


def encode(p: Point, bound: int) -> int:
    """Bijective key for a point of [-bound, bound]^3.

    Keys are strictly increasing in (x, y, z) lexicographic point order, so
    sorting keys sorts points deterministically.
    """
    if bound < 0:
        raise ValueError("bound must be >= 0")
    if abs(p.x) > bound or abs(p.y) > bound or abs(p.z) > bound:
        raise ValueError(f"point {p} outside [-{bound}, {bound}]^3")
    side = 2 * bound + 1
    return ((p.x + bound) * side + (p.y + bound)) * side + (p.z + bound)


def decode(key: int, bound: int) -> Point:
    """Inverse of :func:`encode`."""
    side = 2 * bound + 1
    if not 0 <= key < side**3:
        raise ValueError(f"key {key} outside [0, {side ** 3})")
    key, z = divmod(key, side)
    x, y = divmod(key, side)
    return Point(x - bound, y - bound, z - bound)


@dataclass(frozen=True)
class CanonicalSubset:
    """The canonical representative of a set of sites.

    ``sites`` is the strictly increasing key sequence of the
    lexicographically smallest image of the set under the 48 symmetries;
    ``orbit_size`` is the number of distinct images (divides 48).
    """

    sites: tuple[int, ...]
    orbit_size: int


def canonicalize(
    points: Iterable[Point], bound: int | None = None
) -> tuple[CanonicalSubset, SymOp]:
    """Canonical form of a nonempty set of lattice sites.

    Returns the canonical subset together with the first group element (in
    the fixed group order) that maps the input onto it.  The orbit size is
    computed from the stabilizer of the *input* set; conjugate stabilizers
    have equal size, so this matches the stabilizer of the representative.

    The choice of representative does not depend on ``bound`` (keys are
    monotone in point order for every bound); only the numeric key values
    do.  When ``bound`` is omitted, the smallest bound covering the input
    is used.
    """
    pts = frozenset(points)
    if not pts:
        raise ValueError("cannot canonicalize an empty set of points")
    if bound is None:
        bound = max(1, max(max(abs(p.x), abs(p.y), abs(p.z)) for p in pts))

    original = tuple(sorted(encode(p, bound) for p in pts))
    best: tuple[int, ...] | None = None
    best_op: SymOp | None = None
    stabilizer = 0
    for op in _GROUP:
        image = tuple(sorted(encode(apply_op(op, p), bound) for p in pts))
        if image == original:
            stabilizer += 1
        if best is None or image < best:
            best = image
            best_op = op
    assert best is not None and best_op is not None
    if 48 % stabilizer != 0:
        raise AssertionError(f"stabilizer size {stabilizer} does not divide 48")
    return CanonicalSubset(sites=best, orbit_size=48 // stabilizer), best_op
