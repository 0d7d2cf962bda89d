"""Depth-first generation of self-avoiding walks and the direct-counting
oracle for walk counts and squared end-to-end distances.

Walks start at the origin and take unit steps; a walk never revisits a
site.  The step order is fixed (+x, -x, +y, -y, +z, -z) so that visit
order, and hence any partitioning by walk prefix, is deterministic.

Two implementations coexist on purpose: a plain Python generator
(:func:`iter_walks`) that materializes walks for inspection, and a compiled
counting pass (:func:`direct_count`) that only tallies.  The slow path is
the readable ground truth; the fast path is what the length-doubling
pipeline uses as its oracle.  Tests assert they agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

from .errors import SawError
from .lattice import ORIGIN, Point

__all__ = [
    "STEP_ORDER",
    "Walk",
    "DirectResult",
    "iter_walks",
    "enumerate_walks",
    "end_to_end_sq",
    "direct_count",
]

# Fixed step order; index 0..5 also labels the first-step prefix classes
# used for parallel partitioning.
STEP_ORDER: tuple[Point, ...] = (
    Point(1, 0, 0),
    Point(-1, 0, 0),
    Point(0, 1, 0),
    Point(0, -1, 0),
    Point(0, 0, 1),
    Point(0, 0, -1),
)


@dataclass(frozen=True)
class Walk:
    """An origin-rooted self-avoiding path of unit steps."""

    vertices: tuple[Point, ...]

    @property
    def n(self) -> int:
        return len(self.vertices) - 1

    @property
    def endpoint(self) -> Point:
        return self.vertices[-1]

    def validate(self) -> None:
        """Raise if this is not a well-formed self-avoiding walk."""
        if not self.vertices or self.vertices[0] != ORIGIN:
            raise SawError("walk must start at the origin")
        if len(set(self.vertices)) != len(self.vertices):
            raise SawError("walk revisits a site")
        for a, b in zip(self.vertices, self.vertices[1:]):
            if abs(a.x - b.x) + abs(a.y - b.y) + abs(a.z - b.z) != 1:
                raise SawError(f"non-unit step {a} -> {b}")


@dataclass(frozen=True)
class DirectResult:
    """Exact walk count z and squared end-to-end distance sum p at length n."""

    n: int
    z: int
    p: int


def end_to_end_sq(walk: Walk) -> int:
    """Squared Euclidean distance of the walk's endpoint from the origin."""
    return walk.endpoint.norm_sq()


def iter_walks(n: int, first_step: int | None = None) -> Iterator[Walk]:
    """Yield every self-avoiding walk of length ``n`` in depth-first order.

    ``first_step`` restricts the walk's first step to one prefix class
    (an index into :data:`STEP_ORDER`); the six classes partition the full
    walk set.  Occupancy is tracked in a flat array over [-n, n]^3 so the
    self-avoidance test is O(1) per step.
    """
    if n < 1:
        raise ValueError("walk length must be >= 1")
    side = 2 * n + 1

    def key(x: int, y: int, z: int) -> int:
        return ((x + n) * side + (y + n)) * side + (z + n)

    occupied = bytearray(side**3)
    occupied[key(0, 0, 0)] = 1
    path: list[Point] = [ORIGIN]

    def extend(depth: int) -> Iterator[Walk]:
        px, py, pz = path[-1]
        steps = (
            STEP_ORDER
            if depth > 0 or first_step is None
            else (STEP_ORDER[first_step],)
        )
        for step in steps:
            qx, qy, qz = px + step.x, py + step.y, pz + step.z
            k = key(qx, qy, qz)
            if occupied[k]:
                continue
            q = Point(qx, qy, qz)
            path.append(q)
            occupied[k] = 1
            if depth + 1 == n:
                yield Walk(tuple(path))
            else:
                yield from extend(depth + 1)
            occupied[k] = 0
            path.pop()

    yield from extend(0)


def enumerate_walks(n: int, visit: Callable[[Walk], None]) -> int:
    """Invoke ``visit`` once per length-``n`` walk; return the count Z_n."""
    count = 0
    for walk in iter_walks(n):
        visit(walk)
        count += 1
    return count


def direct_count(n: int, workers: int = 1) -> DirectResult:
    """Exact Z_n and P_n by direct depth-first enumeration.

    Splits the work over the six first-step prefix classes when
    ``workers`` > 1.  All arithmetic is exact: the compiled pass uses
    64-bit tallies (safe through n=18, far beyond what is enumerable
    directly) and the final sums are Python integers.

    As a structural check of the walk ensemble's inversion symmetry (the
    property that makes endpoint cross terms cancel in the doubling
    distance formula), the summed endpoint vector over all walks is
    asserted to vanish.
    """
    if n < 1:
        raise ValueError("walk length must be >= 1")
    from . import _kernels
    from .errors import ExactnessError

    results = _kernels.direct_prefixes(n, workers=workers)
    z = sum(r[0] for r in results)
    p = sum(r[1] for r in results)
    esum = tuple(sum(r[i] for r in results) for i in (2, 3, 4))
    if esum != (0, 0, 0):
        raise ExactnessError(f"summed endpoint vector does not vanish at n={n}: {esum}")
    return DirectResult(n=n, z=z, p=p)
