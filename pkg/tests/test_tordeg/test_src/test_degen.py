"""module."""

from fractions import Fraction

import numpy as np
import pytest

from tordeg.src.degen import (
    DegenerationFamily,
    ImmersionCertificate,
    JacobianCertificate,
    NumericFamily,
    _normalize,
    _power_derivatives,
    _powers,
    build_family,
    evaluate_embedding,
    immersion_certificate,
    jacobian_at_zero_fiber,
    sample_torus_points,
)
from tordeg.src.errors import PreconditionError
from tordeg.src.linsys import ValuedSection
from tordeg.src.series import TruncSeries


def section(label: str, terms: dict[tuple[int, ...], int]) -> ValuedSection:
    """Valued section of a polynomial in two variables."""
    series = TruncSeries(2, 4, {e: Fraction(c) for e, c in terms.items()})
    return ValuedSection.of(label, series)


class TestDegenerationFamily:
    """Test class."""

    def test_n(self, cubic_family: DegenerationFamily) -> None:
        """Test method."""
        assert cubic_family.n == 1

    def test_size(self, cubic_family: DegenerationFamily) -> None:
        """Test method."""
        assert cubic_family.size == 3

    def test_default_chart(
        self, cubic_family: DegenerationFamily, elliptic_family: DegenerationFamily
    ) -> None:
        """Test method."""
        assert cubic_family.default_chart == 2
        assert elliptic_family.default_chart == 2

    def test_special_fiber(self, cubic_family: DegenerationFamily) -> None:
        """Test method."""
        assert cubic_family.special_fiber == (
            (Fraction(1), (1,)),
            (Fraction(1, 2), (3,)),
            (Fraction(1), (0,)),
        )

    def test_numeric(self, cubic_family: DegenerationFamily) -> None:
        """Test method."""
        numeric = cubic_family.numeric
        assert isinstance(numeric, NumericFamily)
        assert cubic_family.numeric is numeric


def test_build_family(cubic_family: DegenerationFamily) -> None:
    """Test function."""
    assert cubic_family.gamma == (1,)
    assert cubic_family.labels == ("x/z", "w/z", "z/z")
    w_tilde = cubic_family.tilde[1]
    expected = TruncSeries(1, w_tilde.trunc_order, {(3,): Fraction(1, 2)})
    assert w_tilde.t_slice(0) == expected
    assert w_tilde.coefficient((6, 3)) == Fraction(-1, 8)

    one = section("1", {(0, 0): 1})
    x = section("x", {(1, 0): 1})
    y = section("y", {(0, 1): 1})
    plane = build_family([one, x, y], (1, 1))
    assert plane.betas == ((0, 0), (1, 0), (0, 1))

    x_plus_y = section("x+y", {(1, 0): 1, (0, 1): 1})
    with pytest.raises(PreconditionError, match="not a single monomial"):
        build_family([one, x, x_plus_y], (1, 1))
    with pytest.raises(PreconditionError, match="not separating at this truncation"):
        build_family([one, x, x_plus_y], (1, 2))
    with pytest.raises(PreconditionError, match="valuations repeat"):
        build_family([one, x, x], (1, 1))
    with pytest.raises(PreconditionError, match="torus not full"):
        build_family([one, section("xx", {(2, 0): 1}), y], (1, 1))
    with pytest.raises(PreconditionError, match="no sections"):
        build_family([], (1,))


class TestJacobianCertificate:
    """Test class."""

    def test_full_rank(self) -> None:
        """Test method."""
        point = (Fraction(1),)
        assert JacobianCertificate(2, point, ((1, 0, 0), (0, 0, 1)), 2).full_rank
        assert not JacobianCertificate(2, point, ((0, 0, 0), (0, 0, 1)), 1).full_rank


def test_jacobian_at_zero_fiber(
    cubic_family: DegenerationFamily, elliptic_family: DegenerationFamily
) -> None:
    """Test function."""
    certificate = jacobian_at_zero_fiber(cubic_family, [Fraction(2)])
    assert certificate.chart == 2
    assert certificate.matrix == ((1, 6, 0), (0, 0, 1))
    assert certificate.full_rank

    elliptic = jacobian_at_zero_fiber(elliptic_family, [Fraction(1, 3)])
    assert elliptic.matrix == ((1, 0, 0), (0, 0, 1))
    assert elliptic.rank == 2

    with pytest.raises(PreconditionError, match="not on the torus"):
        jacobian_at_zero_fiber(cubic_family, [0])
    with pytest.raises(PreconditionError, match="not on the torus"):
        jacobian_at_zero_fiber(cubic_family, [1, 1])
    with pytest.raises(PreconditionError, match="out of range"):
        jacobian_at_zero_fiber(cubic_family, [1], chart=5)


class TestImmersionCertificate:
    """Test class."""

    def test_holds(self, cubic_family: DegenerationFamily) -> None:
        """Test method."""
        good = jacobian_at_zero_fiber(cubic_family, [1])
        bad = JacobianCertificate(2, (Fraction(1),), ((0, 0, 0), (0, 0, 1)), 1)
        assert ImmersionCertificate((1,), 2, (good,)).holds
        assert not ImmersionCertificate((1,), 2, (good, bad)).holds


def test_sample_torus_points() -> None:
    """Test function."""
    points = sample_torus_points(2, 5, np.random.default_rng(3))
    assert len(points) == 5
    assert all(len(p) == 2 and all(x != 0 for x in p) for p in points)


def test_immersion_certificate(cubic_family: DegenerationFamily) -> None:
    """Test function."""
    certificate = immersion_certificate(cubic_family, np.random.default_rng(0), count=4)
    assert certificate.gamma == (1,)
    assert certificate.chart == 2
    assert len(certificate.samples) == 4
    assert certificate.holds

    wide = immersion_certificate(cubic_family, np.random.default_rng(1), count=100)
    assert len(wide.samples) == 100
    assert all(sample.rank == 2 for sample in wide.samples)


def test__powers() -> None:
    """Test function."""
    base = np.array([2, 3], dtype=np.complex128)
    exponents = np.array([[1, 0], [2, 1]], dtype=np.int64)
    assert np.allclose(_powers(base, exponents), [2, 12])


def test__power_derivatives() -> None:
    """Test function."""
    base = np.array([2, 3], dtype=np.complex128)
    exponents = np.array([[1, 0], [2, 1], [0, 4]], dtype=np.int64)
    assert np.allclose(_power_derivatives(base, exponents, 0), [1, 12, 0])


class TestNumericFamily:
    """Test class."""

    def test_from_family(self, cubic_family: DegenerationFamily) -> None:
        """Test method."""
        numeric = NumericFamily.from_family(cubic_family)
        assert numeric.shifts.tolist() == [1, 3, 0]
        assert numeric.exponents[0].tolist() == [[1]]
        assert numeric.coefficients[1][0] == 0.5

    def test_n(self, cubic_family: DegenerationFamily) -> None:
        """Test method."""
        assert cubic_family.numeric.n == 1

    def test_size(self, cubic_family: DegenerationFamily) -> None:
        """Test method."""
        assert cubic_family.numeric.size == 3

    def test_sections(self, cubic_family: DegenerationFamily) -> None:
        """Test method."""
        point = np.array([0.5], dtype=np.complex128)
        values, gradients = cubic_family.numeric.sections(point)
        assert values[0] == pytest.approx(0.5)
        assert values[1] == pytest.approx(np.sqrt(1.125) - 1, abs=1e-6)
        assert values[2] == pytest.approx(1)
        assert gradients[0, 0] == pytest.approx(1)
        assert gradients[2, 0] == pytest.approx(0)

    def test_tilde(self, cubic_family: DegenerationFamily) -> None:
        """Test method."""
        numeric = cubic_family.numeric
        u_tilde = np.array([0.7], dtype=np.complex128)
        values, jacobian = numeric.tilde(u_tilde, 0.0)
        assert np.allclose(values, [0.7, 0.7**3 / 2, 1])
        assert np.allclose(jacobian[:, 0], [1, 3 * 0.7**2 / 2, 0])
        assert np.allclose(jacobian[:, 1], [0, 0, 0])

        t = 0.5 + 0.1j
        values, _ = numeric.tilde(u_tilde, t)
        trivial_values, _ = numeric.trivial(t * u_tilde, t)
        assert np.allclose(values, trivial_values)

    def test_trivial(self, cubic_family: DegenerationFamily) -> None:
        """Test method."""
        numeric = cubic_family.numeric
        u = np.array([0.3], dtype=np.complex128)
        t = 0.8
        values, jacobian = numeric.trivial(u, t)
        raw, _ = numeric.sections(u)
        assert np.allclose(values, raw * t ** np.array([-1.0, -3.0, 0.0]))
        step = 1e-6
        shifted, _ = numeric.trivial(u, t + step)
        assert np.allclose((shifted - values) / step, jacobian[:, 1], atol=1e-4)


def test__normalize() -> None:
    """Test function."""
    assert np.allclose(_normalize(np.array([3, 4j], dtype=np.complex128)), [0.6, 0.8j])
    with pytest.raises(PreconditionError, match="all sections vanish"):
        _normalize(np.zeros(2, dtype=np.complex128))


def test_evaluate_embedding(cubic_family: DegenerationFamily) -> None:
    """Test function."""
    image = evaluate_embedding(cubic_family, [0.7], 0.25)
    assert np.linalg.norm(image) == pytest.approx(1)
    special = evaluate_embedding(cubic_family, [1.0], 0)
    assert np.allclose(special, np.array([1, 0.5, 1]) / 1.5)
