"""module."""

from fractions import Fraction

import numpy as np
import pytest

from tordeg.src.errors import PreconditionError, TruncationError
from tordeg.src.series import (
    TruncSeries,
    _common_arity,
    _newton_schulz,
    _row_dot,
    compose,
    implicit_solve,
    implicit_solve_system,
    poly_derivative,
    poly_evaluate,
    series_arith,
    series_invert,
    substitute_weighted,
    weighted_order,
)

# y**2 - x**3 - 1 in the variables (x, y)
ELLIPTIC = {(0, 2): Fraction(1), (3, 0): Fraction(-1), (0, 0): Fraction(-1)}


def one_variable(trunc: int, **terms: Fraction | int) -> TruncSeries:
    """Series in u from keyword terms like e3=1/2."""
    return TruncSeries(1, trunc, {(int(k[1:]),): Fraction(v) for k, v in terms.items()})


def random_series(rng: np.random.Generator, trunc: int = 5) -> TruncSeries:
    """Series in two variables with a few random rational terms."""
    terms: dict[tuple[int, ...], Fraction] = {}
    for _ in range(5):
        exponent = (int(rng.integers(0, 4)), int(rng.integers(0, 4)))
        terms[exponent] = Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4)))
    return TruncSeries(2, trunc, terms)


class TestTruncSeries:
    """Test class."""

    def test___post_init__(self) -> None:
        """Test method."""
        terms = {(0,): Fraction(1), (1,): Fraction(0), (3,): Fraction(5)}
        series = TruncSeries(1, 2, terms)
        assert dict(series.terms) == {(0,): Fraction(1)}
        with pytest.raises(PreconditionError, match="nonnegative"):
            TruncSeries(1, -1, {})
        with pytest.raises(PreconditionError, match="arity"):
            TruncSeries(2, 3, {(1,): Fraction(1)})

    def test_zero(self) -> None:
        """Test method."""
        assert TruncSeries.zero(2, 4).is_zero

    def test_constant(self) -> None:
        """Test method."""
        assert TruncSeries.constant(3, 2, 4).constant_term == 3

    def test_variable(self) -> None:
        """Test method."""
        assert TruncSeries.variable(1, 2, 4).support == ((0, 1),)

    def test___eq__(self) -> None:
        """Test method."""
        assert one_variable(3, e1=1) == one_variable(3, e1=1)
        assert one_variable(3, e1=1) != one_variable(4, e1=1)
        assert one_variable(3, e0=1) != 1

    def test___hash__(self) -> None:
        """Test method."""
        assert hash(one_variable(3, e1=2)) == hash(one_variable(3, e1=2))

    def test___iter__(self) -> None:
        """Test method."""
        expected = [((0,), Fraction(4)), ((2,), Fraction(1))]
        assert list(one_variable(3, e2=1, e0=4)) == expected

    def test___len__(self) -> None:
        """Test method."""
        assert len(one_variable(3, e0=1, e1=1)) == 2

    def test_is_zero(self) -> None:
        """Test method."""
        assert one_variable(2, e3=1).is_zero
        assert not one_variable(2, e0=1).is_zero

    def test_constant_term(self) -> None:
        """Test method."""
        assert one_variable(2, e1=1).constant_term == 0

    def test_support(self) -> None:
        """Test method."""
        assert one_variable(4, e3=1, e1=2).support == ((1,), (3,))

    def test_coefficient(self) -> None:
        """Test method."""
        series = one_variable(4, e3=Fraction(1, 2))
        assert series.coefficient((3,)) == Fraction(1, 2)
        assert series.coefficient((2,)) == 0

    def test__check(self) -> None:
        """Test method."""
        assert one_variable(3)._check(one_variable(5)) == 3
        with pytest.raises(PreconditionError, match="arity mismatch"):
            one_variable(3)._check(TruncSeries.zero(2, 3))

    def test___add__(self) -> None:
        """Test method."""
        total = one_variable(2, e1=1) + one_variable(4, e1=1, e3=1)
        assert total == one_variable(2, e1=2)
        assert one_variable(2, e1=1) + 1 == one_variable(2, e0=1, e1=1)
        assert 1 + one_variable(2, e1=1) == one_variable(2, e0=1, e1=1)

    def test___neg__(self) -> None:
        """Test method."""
        assert -one_variable(2, e1=1) == one_variable(2, e1=-1)

    def test___sub__(self) -> None:
        """Test method."""
        assert one_variable(2, e1=1) - one_variable(2, e1=1) == TruncSeries.zero(1, 2)

    def test___rsub__(self) -> None:
        """Test method."""
        assert 2 - one_variable(2, e1=1) == one_variable(2, e0=2, e1=-1)

    def test_scale(self) -> None:
        """Test method."""
        assert one_variable(2, e1=2).scale(Fraction(1, 2)) == one_variable(2, e1=1)

    def test___mul__(self) -> None:
        """Test method."""
        left = one_variable(3, e0=1, e1=1)
        right = one_variable(3, e0=1, e1=-1)
        assert left * right == one_variable(3, e0=1, e2=-1)
        assert left * 3 == one_variable(3, e0=3, e1=3)
        assert 3 * left == left * 3

    def test___pow__(self) -> None:
        """Test method."""
        base = one_variable(2, e0=1, e1=1)
        assert base**3 == one_variable(2, e0=1, e1=3, e2=3)
        assert base**0 == one_variable(2, e0=1)
        inverse = one_variable(3, e0=1, e1=1) ** -1
        assert inverse == one_variable(3, e0=1, e1=-1, e2=1, e3=-1)

    def test_truncate(self) -> None:
        """Test method."""
        assert one_variable(4, e1=1, e3=1).truncate(2) == one_variable(2, e1=1)
        with pytest.raises(TruncationError, match="cannot raise"):
            one_variable(2).truncate(3)

    def test_derivative(self) -> None:
        """Test method."""
        assert one_variable(3, e3=1).derivative(0) == one_variable(2, e2=3)
        with pytest.raises(TruncationError, match="order 0"):
            one_variable(0, e0=1).derivative(0)

    def test_t_slice(self) -> None:
        """Test method."""
        terms = {(1, 0): Fraction(1), (0, 1): Fraction(2), (2, 1): Fraction(3)}
        series = TruncSeries(2, 3, terms)
        assert series.t_slice(1) == one_variable(2, e0=2, e2=3)
        assert series.t_slice(0) == one_variable(3, e1=1)
        with pytest.raises(TruncationError, match="above the truncation order"):
            series.t_slice(4)

    def test_evaluate(self) -> None:
        """Test method."""
        series = one_variable(3, e0=1, e2=1)
        assert series.evaluate([1j]) == pytest.approx(0)
        assert series.evaluate([2.0]) == pytest.approx(5)

    def test_format(self) -> None:
        """Test method."""
        series = one_variable(4, e0=1, e1=1, e3=Fraction(1, 2))
        assert series.format() == "1 + u1 + 1/2*u1^3 + O(deg 5)"
        assert series.format(["x"]) == "1 + x + 1/2*x^3 + O(deg 5)"
        assert TruncSeries.zero(2, 1).format() == "0 + O(deg 2)"
        product = TruncSeries(2, 2, {(1, 1): Fraction(-1)})
        assert product.format() == "-1*u1*u2 + O(deg 3)"


def test_series_arith() -> None:
    """Test function."""
    a = one_variable(3, e0=1, e1=1)
    b = one_variable(3, e1=1)
    assert series_arith(a, b, "add") == one_variable(3, e0=1, e1=2)
    assert series_arith(a, b, "mul") == one_variable(3, e1=1, e2=1)
    with pytest.raises(PreconditionError, match="unknown series operation"):
        series_arith(a, b, "div")


def test_series_invert() -> None:
    """Test function."""
    geometric = series_invert(one_variable(5, e0=1, e1=-1))
    assert geometric == one_variable(5, e0=1, e1=1, e2=1, e3=1, e4=1, e5=1)
    assert series_invert(one_variable(0, e0=4)) == one_variable(0, e0=Fraction(1, 4))
    with pytest.raises(PreconditionError, match="not a unit"):
        series_invert(one_variable(3, e1=1))


def test_poly_derivative() -> None:
    """Test function."""
    assert poly_derivative(ELLIPTIC, 0) == {(2, 0): Fraction(-3)}
    assert poly_derivative(ELLIPTIC, 1) == {(0, 1): Fraction(2)}


def test_poly_evaluate() -> None:
    """Test function."""
    assert poly_evaluate(ELLIPTIC, (0, 1)) == 0
    assert poly_evaluate(ELLIPTIC, (2, 3)) == 0
    assert poly_evaluate(ELLIPTIC, (1, 1)) == -1


def test_compose() -> None:
    """Test function."""
    u = TruncSeries.variable(0, 1, 3)
    assert compose({(1, 1): Fraction(1)}, [1 + u, u]) == one_variable(3, e1=1, e2=1)
    assert compose({(0, 3): Fraction(2)}, [u, u]) == one_variable(3, e3=2)
    with pytest.raises(PreconditionError, match="at least one"):
        compose({(1,): Fraction(1)}, [])
    with pytest.raises(PreconditionError, match="arguments"):
        compose({(1, 0): Fraction(1)}, [u])


def test_implicit_solve() -> None:
    """Test function."""
    y = implicit_solve(ELLIPTIC, 1, 12)
    expected = one_variable(
        12,
        e0=1,
        e3=Fraction(1, 2),
        e6=Fraction(-1, 8),
        e9=Fraction(1, 16),
        e12=Fraction(-5, 128),
    )
    assert y == expected
    x = TruncSeries.variable(0, 1, 12)
    assert (y * y - x**3 - 1).is_zero

    negative = implicit_solve(ELLIPTIC, -1, 6)
    assert negative == one_variable(6, e0=-1, e3=Fraction(-1, 2), e6=Fraction(1, 8))

    with pytest.raises(PreconditionError, match="point not on variety"):
        implicit_solve(ELLIPTIC, 2, 6)
    with pytest.raises(PreconditionError, match="not transverse"):
        implicit_solve({(0, 2): Fraction(1), (3, 0): Fraction(-1)}, 0, 6)


def test_implicit_solve_system() -> None:
    """Test function."""
    # y1 = u + y2, y2 = u**2 as a coupled system in (u, y1, y2)
    equations = [
        {(0, 1, 0): Fraction(1), (1, 0, 0): Fraction(-1), (0, 0, 1): Fraction(-1)},
        {(0, 0, 1): Fraction(1), (2, 0, 0): Fraction(-1)},
    ]
    y1, y2 = implicit_solve_system(equations, [0, 0], 5)
    assert y1 == one_variable(5, e1=1, e2=1)
    assert y2 == one_variable(5, e2=1)
    with pytest.raises(PreconditionError, match="dependent variables"):
        implicit_solve_system(equations, [0], 5)
    with pytest.raises(PreconditionError, match="more dependent variables"):
        implicit_solve_system([{(1,): Fraction(1)}, {(1,): Fraction(1)}], [0, 0], 5)


def test__common_arity() -> None:
    """Test function."""
    assert _common_arity([ELLIPTIC]) == 2
    with pytest.raises(PreconditionError, match="share one set"):
        _common_arity([ELLIPTIC, {(1,): Fraction(1)}])
    with pytest.raises(PreconditionError, match="share one set"):
        _common_arity([{}])


def test__row_dot() -> None:
    """Test function."""
    u = TruncSeries.variable(0, 1, 3)
    one = TruncSeries.constant(1, 1, 3)
    assert _row_dot([u, one], [u, u]) == one_variable(3, e1=1, e2=1)


def test__newton_schulz() -> None:
    """Test function."""
    two = TruncSeries.constant(2, 1, 3)
    half = TruncSeries.constant(Fraction(1, 2), 1, 3)
    assert _newton_schulz([[two]], [[half]]) == [[half]]
    # a rough start moves toward 1/2
    refined = _newton_schulz([[two]], [[TruncSeries.constant(Fraction(1, 4), 1, 3)]])
    assert refined[0][0].constant_term == Fraction(3, 8)


def test_weighted_order() -> None:
    """Test function."""
    assert weighted_order((1, 2), (3, 1)) == 5


def test_substitute_weighted() -> None:
    """Test function."""
    f = one_variable(6, e0=1, e3=Fraction(1, 2))
    lifted = substitute_weighted(f, (1,), (0,))
    assert lifted == TruncSeries(2, 13, {(0, 0): Fraction(1), (3, 3): Fraction(1, 2)})

    shifted = substitute_weighted(one_variable(6, e1=1, e3=1), (2,), (1,))
    assert shifted == TruncSeries(2, 18, {(1, 0): Fraction(1), (3, 4): Fraction(1)})

    with pytest.raises(PreconditionError, match="not gamma-minimal"):
        substitute_weighted(one_variable(3, e0=1, e1=1), (1,), (1,))
    with pytest.raises(PreconditionError, match="strictly positive"):
        substitute_weighted(one_variable(3, e0=1), (0,), (0,))
    with pytest.raises(PreconditionError, match="arity differ"):
        substitute_weighted(one_variable(3, e0=1), (1, 1), (0,))
    with pytest.raises(TruncationError, match="too low"):
        substitute_weighted(TruncSeries.zero(1, 0), (1,), (5,))


def test_series_ring_axioms() -> None:
    """Test function."""
    rng = np.random.default_rng(7)
    zero = TruncSeries.zero(2, 5)
    one = TruncSeries.constant(1, 2, 5)
    for _ in range(30):
        f, g, h = (random_series(rng) for _ in range(3))
        assert f + g == g + f
        assert (f + g) + h == f + (g + h)
        assert f + zero == f
        assert f - f == zero
        assert f * g == g * f
        assert (f * g) * h == f * (g * h)
        assert f * one == f
        assert f * (g + h) == f * g + f * h
