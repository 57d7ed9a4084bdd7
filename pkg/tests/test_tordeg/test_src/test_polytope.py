"""module."""

from fractions import Fraction

import numpy as np
import pytest

from tordeg.src.errors import NotContainedError, PreconditionError
from tordeg.src.exact import UnimodularAffineMap, dot
from tordeg.src.polytope import (
    HalfSpace,
    _cofactor_normal,
    _full_hull,
    _lift,
    contains_in_interior,
    contains_polytope,
    convex_hull,
    delta_k,
    euclidean_volume,
    normalized_volume,
    simplex,
    triangulate,
    volume_gap,
)

UNIT_TRIANGLE = [(0, 0), (1, 0), (0, 1)]
UNIT_SQUARE = [(0, 0), (1, 0), (0, 1), (1, 1)]


def random_unimodular(rng: np.random.Generator, size: int) -> UnimodularAffineMap:
    """Random integer row operations with an integer translation."""
    w = [[int(i == j) for j in range(size)] for i in range(size)]
    for _ in range(4 if size > 1 else 0):
        target, source = (int(i) for i in rng.choice(size, size=2, replace=False))
        factor = int(rng.integers(-2, 3))
        w[target] = [a + factor * b for a, b in zip(w[target], w[source], strict=True)]
    if rng.integers(2):
        w[0] = [-x for x in w[0]]
    translation = tuple(Fraction(int(x)) for x in rng.integers(-3, 4, size=size))
    return UnimodularAffineMap(tuple(tuple(row) for row in w), translation)


def random_points(rng: np.random.Generator, size: int) -> list[tuple[int, ...]]:
    """A handful of small lattice points."""
    return [tuple(int(x) for x in row) for row in rng.integers(-3, 4, size=(6, size))]


class TestHalfSpace:
    """Test class."""

    def test_through(self) -> None:
        """Test method."""
        half_space = HalfSpace.through([2, 4], 6)
        assert half_space == HalfSpace((1, 2), Fraction(3))
        assert HalfSpace.through([Fraction(1, 3)], 1) == HalfSpace((1,), Fraction(3))

    def test_value(self) -> None:
        """Test method."""
        assert HalfSpace((1, 2), Fraction(3)).value((1, 1)) == 3

    def test_slack(self) -> None:
        """Test method."""
        assert HalfSpace((1, 2), Fraction(3)).slack((0, 1)) == 1

    def test_contains(self) -> None:
        """Test method."""
        half_space = HalfSpace((1, 2), Fraction(3))
        assert half_space.contains((1, 1))
        assert not half_space.contains((1, 1), strict=True)
        assert not half_space.contains((2, 1))


class TestQPolytope:
    """Test class."""

    def test_full_dimensional(self) -> None:
        """Test method."""
        assert convex_hull(UNIT_TRIANGLE).full_dimensional
        assert not convex_hull([(0, 0), (2, 2)]).full_dimensional

    def test_contains_point(self) -> None:
        """Test method."""
        diagonal = convex_hull([(0, 0), (2, 2)])
        assert diagonal.contains_point((1, 1))
        assert diagonal.contains_point((1, 1), strict=True)
        assert not diagonal.contains_point((1, 0))
        assert not diagonal.contains_point((0, 0), strict=True)
        with pytest.raises(PreconditionError, match="ambient"):
            diagonal.contains_point((1,))

    def test_centroid(self) -> None:
        """Test method."""
        assert convex_hull(UNIT_TRIANGLE).centroid() == (Fraction(1, 3), Fraction(1, 3))

    def test_image(self) -> None:
        """Test method."""
        swap = UnimodularAffineMap(((0, 1), (1, 0)), (Fraction(0), Fraction(0)))
        triangle = convex_hull(UNIT_TRIANGLE)
        assert triangle.image(swap).vertices == triangle.vertices

    def test_scaled(self) -> None:
        """Test method."""
        doubled = convex_hull(UNIT_TRIANGLE).scaled(2)
        assert doubled.vertices == ((0, 0), (0, 2), (2, 0))
        assert normalized_volume(doubled) == 4

    def test_lattice_points(self) -> None:
        """Test method."""
        tall = convex_hull([(0, 0), (1, 0), (0, 3)])
        assert tall.lattice_points() == ((0, 0), (0, 1), (0, 2), (0, 3), (1, 0))
        assert tall.lattice_points(strict=True) == ()
        triangle = convex_hull([(0, 0), (3, 0), (0, 3)])
        assert triangle.lattice_points(strict=True) == ((1, 1),)


def test_convex_hull() -> None:
    """Test function."""
    square = convex_hull([*UNIT_SQUARE, (Fraction(1, 2), Fraction(1, 2))])
    assert square.vertices == ((0, 0), (0, 1), (1, 0), (1, 1))
    assert len(square.half_spaces) == 4
    assert square.dim == 2
    assert square.equations == ()

    segment = convex_hull([(0,), (3,), (1,)])
    assert segment.vertices == ((0,), (3,))

    diagonal = convex_hull([(0, 0, 0), (1, 1, 1), (2, 2, 2)])
    assert diagonal.dim == 1
    assert len(diagonal.equations) == 2
    assert diagonal.vertices == ((0, 0, 0), (2, 2, 2))

    point = convex_hull([(1, 2)])
    assert point.dim == 0

    with pytest.raises(PreconditionError, match="empty"):
        convex_hull([])
    with pytest.raises(PreconditionError, match="different dimensions"):
        convex_hull([(0,), (0, 1)])
    with pytest.raises(PreconditionError, match="limited"):
        convex_hull([(0, 0, 0, 0, 0)])


def test_convex_hull_is_idempotent() -> None:
    """Test function."""
    rng = np.random.default_rng(3)
    for size in (1, 2, 3):
        for _ in range(15):
            polytope = convex_hull(random_points(rng, size))
            again = convex_hull(polytope.vertices)
            assert again.vertices == polytope.vertices
            assert set(again.half_spaces) == set(polytope.half_spaces)
            assert again.dim == polytope.dim


def test__lift() -> None:
    """Test function."""
    assert _lift((1, 2), (0, 2), 3) == (1, 0, 2)


def test__full_hull() -> None:
    """Test function."""
    points = [(Fraction(0),), (Fraction(2),), (Fraction(1),)]
    flags, facets = _full_hull(points)
    assert flags == [True, True, False]
    assert facets == {HalfSpace((-1,), Fraction(0)), HalfSpace((1,), Fraction(2))}


def test__cofactor_normal() -> None:
    """Test function."""
    rows = [
        [Fraction(1), Fraction(0), Fraction(1)],
        [Fraction(0), Fraction(1), Fraction(1)],
    ]
    normal = _cofactor_normal(rows)
    assert any(normal)
    assert all(dot(normal, row) == 0 for row in rows)
    dependent = [
        [Fraction(1), Fraction(1), Fraction(0)],
        [Fraction(2), Fraction(2), Fraction(0)],
    ]
    assert not any(_cofactor_normal(dependent))


def test_triangulate() -> None:
    """Test function."""
    pieces = triangulate(convex_hull(UNIT_SQUARE))
    assert len(pieces) == 2
    assert all(piece[0] == (0, 0) for piece in pieces)
    assert triangulate(convex_hull([(1, 1)])) == (((1, 1),),)


def test_normalized_volume() -> None:
    """Test function."""
    assert normalized_volume(convex_hull([(0,), (3,)])) == 3
    assert normalized_volume(convex_hull(UNIT_TRIANGLE)) == 1
    assert normalized_volume(convex_hull(UNIT_SQUARE)) == 2
    cube = [(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)]
    assert normalized_volume(convex_hull(cube)) == 6
    assert normalized_volume(convex_hull([(0, 0), (1, 0), (0, 5)])) == 5
    with pytest.raises(PreconditionError, match="degenerate polytope"):
        normalized_volume(convex_hull([(0, 0), (1, 1)]))


def test_normalized_volume_is_unimodular_invariant() -> None:
    """Test function."""
    rng = np.random.default_rng(4)
    for size in (1, 2, 3):
        checked = 0
        while checked < 10:
            polytope = convex_hull(random_points(rng, size))
            if not polytope.full_dimensional:
                continue
            image = polytope.image(random_unimodular(rng, size))
            assert normalized_volume(image) == normalized_volume(polytope)
            checked += 1


def test_euclidean_volume() -> None:
    """Test function."""
    assert euclidean_volume(convex_hull(UNIT_SQUARE)) == 1
    assert euclidean_volume(convex_hull(UNIT_TRIANGLE)) == Fraction(1, 2)


def test_contains_in_interior() -> None:
    """Test function."""
    outer = convex_hull([(0,), (3,)])
    assert contains_in_interior(outer, convex_hull([(1,), (2,)]))
    assert not contains_in_interior(outer, convex_hull([(0,), (2,)]))
    wedge = convex_hull([(0, 0), (1, 0), (0, 2)])
    assert not contains_in_interior(wedge, convex_hull(UNIT_TRIANGLE))
    quarter, half = Fraction(1, 4), Fraction(1, 2)
    inner = [(quarter, quarter), (half, quarter), (quarter, half)]
    assert contains_in_interior(wedge, convex_hull(inner))
    triangle = convex_hull(UNIT_TRIANGLE)
    assert not contains_in_interior(triangle, triangle)
    with pytest.raises(PreconditionError, match="full dimensional"):
        contains_in_interior(convex_hull([(0, 0), (1, 1)]), convex_hull([(0, 0)]))


def test_contains_polytope() -> None:
    """Test function."""
    outer = convex_hull([(0,), (3,)])
    assert contains_polytope(outer, convex_hull([(0,), (2,)]))
    assert not contains_polytope(outer, convex_hull([(0,), (4,)]))
    with pytest.raises(PreconditionError, match="different dimensions"):
        contains_polytope(outer, convex_hull(UNIT_TRIANGLE))


def test_delta_k() -> None:
    """Test function."""
    body = delta_k([(0,), (1,), (2,), (3,), (4,), (6,)], 2)
    assert body.vertices == ((0,), (3,))
    with pytest.raises(PreconditionError, match="positive"):
        delta_k([(0,)], 0)


def test_volume_gap() -> None:
    """Test function."""
    outer = convex_hull([(0,), (3,)])
    assert volume_gap(outer, outer) == 0
    assert volume_gap(outer, convex_hull([(0,), (2,)])) == 1
    tall = convex_hull([(0, 0), (1, 0), (0, 3)])
    assert volume_gap(tall, convex_hull([(0, 0), (1, 0), (0, 2)])) == Fraction(1, 2)
    with pytest.raises(NotContainedError) as info:
        volume_gap(outer, convex_hull([(0,), (4,)]))
    assert info.value.vertex == (Fraction(4),)


def test_simplex() -> None:
    """Test function."""
    assert len(simplex(UNIT_TRIANGLE).vertices) == 3
    with pytest.raises(PreconditionError, match="simplex"):
        simplex([(0, 0), (1, 0), (2, 0)])
    with pytest.raises(PreconditionError, match="simplex"):
        simplex(UNIT_SQUARE)
