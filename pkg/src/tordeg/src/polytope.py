"""Exact rational polytopes.

Hulls are computed by enumerating candidate facets through affinely
independent point tuples, which is exact and fast enough for the small
dimensions and point counts met here. Lower dimensional inputs are handled
by projecting onto coordinates that parametrize their affine hull.
"""

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from tordeg.src.consts import MAX_EXACT_DIM
from tordeg.src.errors import NotContainedError, PreconditionError
from tordeg.src.exact import (
    RatPoint,
    Rational,
    UnimodularAffineMap,
    as_point,
    determinant,
    dot,
    left_null_space,
    primitive_integer,
    rank,
    row_echelon,
    subtract,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HalfSpace:
    """The set of points x with normal . x <= offset."""

    normal: tuple[int, ...]
    offset: Fraction

    @classmethod
    def through(cls, normal: Sequence[Rational], offset: Rational) -> "HalfSpace":
        """Normalize a rational inequality to a primitive integer normal."""
        ints, factor = primitive_integer(normal)
        return cls(ints, Fraction(offset) * factor)

    def value(self, point: Sequence[Rational]) -> Fraction:
        """Evaluate the normal at a point."""
        return dot(self.normal, point)

    def slack(self, point: Sequence[Rational]) -> Fraction:
        """Offset minus normal value, nonnegative inside."""
        return self.offset - self.value(point)

    def contains(self, point: Sequence[Rational], *, strict: bool = False) -> bool:
        """Check membership, optionally in the open half space."""
        slack = self.slack(point)
        return slack > 0 if strict else slack >= 0


@dataclass(frozen=True)
class QPolytope:
    """Convex hull of finitely many rational points.

    Attributes:
        vertices: The vertices in increasing lexicographic order.
        half_spaces: Facet inequalities, relative to the affine hull.
        equations: Affine equations normal . x == offset cutting out the
            affine hull, empty for full dimensional polytopes.
        dim: Dimension of the polytope.
        ambient: Dimension of the surrounding space.
    """

    vertices: tuple[RatPoint, ...]
    half_spaces: tuple[HalfSpace, ...]
    equations: tuple[HalfSpace, ...]
    dim: int
    ambient: int

    @property
    def full_dimensional(self) -> bool:
        """Whether the polytope has nonempty interior."""
        return self.dim == self.ambient

    def contains_point(
        self, point: Sequence[Rational], *, strict: bool = False
    ) -> bool:
        """Check membership of a point.

        Args:
            point: Rational point.
            strict: Require the point to lie in the relative interior.

        Returns:
            True if the point lies in the (relative interior of the) polytope.
        """
        if len(point) != self.ambient:
            msg = f"point of dimension {len(point)} in ambient dimension {self.ambient}"
            raise PreconditionError(msg)
        if any(eq.slack(point) != 0 for eq in self.equations):
            return False
        return all(h.contains(point, strict=strict) for h in self.half_spaces)

    def centroid(self) -> RatPoint:
        """Average of the vertices, a relative interior point."""
        count = len(self.vertices)
        columns = zip(*self.vertices, strict=True)
        return tuple(sum(coords, Fraction(0)) / count for coords in columns)

    def image(self, transform: UnimodularAffineMap) -> "QPolytope":
        """Image under a unimodular affine map."""
        return convex_hull(transform.apply(v) for v in self.vertices)

    def scaled(self, factor: Rational) -> "QPolytope":
        """Dilation about the origin."""
        return convex_hull(tuple(factor * x for x in v) for v in self.vertices)

    def lattice_points(self, *, strict: bool = False) -> tuple[tuple[int, ...], ...]:
        """Integer points of the polytope by bounding box enumeration."""
        axes = range(self.ambient)
        lows = [math.floor(min(v[i] for v in self.vertices)) for i in axes]
        highs = [math.ceil(max(v[i] for v in self.vertices)) for i in axes]
        ranges = [range(lo, hi + 1) for lo, hi in zip(lows, highs, strict=True)]
        points = product(*ranges)
        return tuple(p for p in points if self.contains_point(p, strict=strict))


def convex_hull(points: Iterable[Sequence[Rational]]) -> QPolytope:
    """Compute the exact convex hull of rational points.

    Args:
        points: Nonempty collection of points of one dimension, at most
            MAX_EXACT_DIM.

    Returns:
        The hull with vertices and facet inequalities.

    Raises:
        PreconditionError: For empty input, mixed dimensions or ambient
            dimension above MAX_EXACT_DIM.
    """
    pts = sorted({as_point(p) for p in points})
    if not pts:
        msg = "cannot take the hull of an empty point set"
        raise PreconditionError(msg)
    ambient = len(pts[0])
    if any(len(p) != ambient for p in pts):
        msg = "points have different dimensions"
        raise PreconditionError(msg)
    if ambient > MAX_EXACT_DIM:
        msg = f"exact hulls are limited to dimension {MAX_EXACT_DIM}, got {ambient}"
        raise PreconditionError(msg)

    base = pts[0]
    differences = [subtract(p, base) for p in pts[1:]]
    echelon, pivots = row_echelon(differences) if differences else ([], [])
    dim = len(pivots)
    equations = tuple(
        HalfSpace.through(normal, dot(normal, base))
        for normal in left_null_space(echelon, ambient)
    )
    if dim == 0:
        return QPolytope((base,), (), equations, 0, ambient)

    projected = [tuple(p[c] for c in pivots) for p in pts]
    vertex_flags, facets = _full_hull(projected)
    vertices = tuple(p for p, flag in zip(pts, vertex_flags, strict=True) if flag)
    half_spaces = tuple(
        sorted(
            {HalfSpace(_lift(h.normal, pivots, ambient), h.offset) for h in facets},
            key=lambda h: (h.normal, h.offset),
        )
    )
    return QPolytope(vertices, half_spaces, equations, dim, ambient)


def _lift(
    normal: Sequence[int], columns: Sequence[int], ambient: int
) -> tuple[int, ...]:
    lifted = [0] * ambient
    for value, column in zip(normal, columns, strict=True):
        lifted[column] = value
    return tuple(lifted)


def _full_hull(points: Sequence[RatPoint]) -> tuple[list[bool], set[HalfSpace]]:
    """Vertex flags and facets of a full dimensional point set."""
    n = len(points[0])
    if n == 1:
        low = min(p[0] for p in points)
        high = max(p[0] for p in points)
        ends = {HalfSpace((-1,), -low), HalfSpace((1,), high)}
        return [p[0] in {low, high} for p in points], ends

    facets: set[HalfSpace] = set()
    for subset in combinations(points, n):
        rows = [subtract(q, subset[0]) for q in subset[1:]]
        normal = _cofactor_normal(rows)
        if not any(normal):
            continue
        offset = dot(normal, subset[0])
        values = [dot(normal, p) for p in points]
        if all(v <= offset for v in values):
            facets.add(HalfSpace.through(normal, offset))
        elif all(v >= offset for v in values):
            facets.add(HalfSpace.through([-x for x in normal], -offset))

    flags = []
    for p in points:
        tight = [h.normal for h in facets if h.slack(p) == 0]
        flags.append(len(tight) >= n and rank(tight) == n)
    return flags, facets


def _cofactor_normal(rows: Sequence[Sequence[Fraction]]) -> list[Fraction]:
    """Vector orthogonal to n-1 rows of length n, zero if they are dependent."""
    n = len(rows) + 1
    return [
        (-1) ** i * determinant([[row[c] for c in range(n) if c != i] for row in rows])
        for i in range(n)
    ]


def triangulate(polytope: QPolytope) -> tuple[tuple[RatPoint, ...], ...]:
    """Fan triangulation from the lexicographically smallest vertex.

    The cone over every facet avoiding the apex is triangulated recursively,
    so the simplices only use vertices of the polytope.

    Args:
        polytope: Any polytope.

    Returns:
        Simplices, each given by dim + 1 vertices.
    """
    if polytope.dim == 0:
        return ((polytope.vertices[0],),)
    apex = polytope.vertices[0]
    simplices: list[tuple[RatPoint, ...]] = []
    for facet in polytope.half_spaces:
        on_facet = [v for v in polytope.vertices if facet.slack(v) == 0]
        if apex in on_facet:
            continue
        for simplex in triangulate(convex_hull(on_facet)):
            simplices.append((apex, *simplex))
    return tuple(simplices)


def normalized_volume(polytope: QPolytope) -> Fraction:
    """Lattice normalized volume, n! times the Euclidean volume.

    Args:
        polytope: A full dimensional polytope.

    Returns:
        The normalized volume, a positive rational.

    Raises:
        PreconditionError: If the polytope is not full dimensional.
    """
    if not polytope.full_dimensional:
        msg = (
            f"degenerate polytope: dimension {polytope.dim}"
            f" in ambient {polytope.ambient}"
        )
        raise PreconditionError(msg)
    total = Fraction(0)
    for simplex in triangulate(polytope):
        edges = [subtract(v, simplex[0]) for v in simplex[1:]]
        total += abs(determinant(edges))
    return total


def euclidean_volume(polytope: QPolytope) -> Fraction:
    """Euclidean volume of a full dimensional polytope."""
    return normalized_volume(polytope) / math.factorial(polytope.ambient)


def contains_in_interior(outer: QPolytope, inner: QPolytope) -> bool:
    """Check that every vertex of inner lies strictly inside outer.

    Args:
        outer: A full dimensional polytope.
        inner: A polytope of the same ambient dimension.

    Returns:
        True if inner sits in the interior of outer.
    """
    if not outer.full_dimensional:
        msg = "the outer polytope must be full dimensional"
        raise PreconditionError(msg)
    if outer.ambient != inner.ambient:
        msg = "polytopes live in different dimensions"
        raise PreconditionError(msg)
    return all(
        h.contains(v, strict=True)
        for v in inner.vertices
        for h in outer.half_spaces
    )


def contains_polytope(outer: QPolytope, inner: QPolytope) -> bool:
    """Check closed containment of inner in outer."""
    if outer.ambient != inner.ambient:
        msg = "polytopes live in different dimensions"
        raise PreconditionError(msg)
    return all(outer.contains_point(v) for v in inner.vertices)


def delta_k(values: Iterable[Sequence[int]], k: int) -> QPolytope:
    """Hull of a value set scaled by 1/k.

    Args:
        values: The value set of the k-th power of the linear system.
        k: Positive power.

    Returns:
        The polytope conv(A_k / k).
    """
    if k <= 0:
        msg = f"k must be positive, got {k}"
        raise PreconditionError(msg)
    return convex_hull(tuple(Fraction(x, k) for x in alpha) for alpha in values)


def volume_gap(outer: QPolytope, inner: QPolytope) -> Fraction:
    """Euclidean volume of outer minus that of inner.

    Args:
        outer: Containing polytope.
        inner: Contained polytope.

    Returns:
        The nonnegative volume difference.

    Raises:
        NotContainedError: If some vertex of inner lies outside outer.
    """
    for vertex in inner.vertices:
        if not outer.contains_point(vertex):
            shown = tuple(str(x) for x in vertex)
            msg = f"vertex {shown} lies outside the outer polytope"
            raise NotContainedError(msg, vertex)
    return euclidean_volume(outer) - euclidean_volume(inner)


def simplex(vertices: Iterable[Sequence[Rational]]) -> QPolytope:
    """Hull of points that must be affinely independent and spanning."""
    hull = convex_hull(vertices)
    if not hull.full_dimensional or len(hull.vertices) != hull.ambient + 1:
        msg = "points do not span a full dimensional simplex"
        raise PreconditionError(msg)
    return hull
