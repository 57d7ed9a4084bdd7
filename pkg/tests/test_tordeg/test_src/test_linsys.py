"""module."""

from fractions import Fraction

import numpy as np
import pytest

from tordeg.src.errors import DependentAtOrderError, PreconditionError, TruncationError
from tordeg.src.linsys import (
    GammaCertificate,
    ValuedBasis,
    ValuedSection,
    _eliminate,
    _reduced_label,
    certify_gamma,
    check_lattice_condition,
    choose_gamma,
    is_gamma_minimal,
    lex_valuation,
    power_value_set,
    triangularize,
    valued_sections,
)
from tordeg.src.series import TruncSeries
from tordeg.src.utils import fixture_path
from tordeg.src.variety import SeriesBundle, VarietySpec, cmd_expand


def monomial(power: int, trunc: int = 6) -> TruncSeries:
    """The series u**power."""
    return TruncSeries(1, trunc, {(power,): Fraction(1)})


def random_series(rng: np.random.Generator, arity: int = 2) -> TruncSeries:
    """Nonzero polynomial with small exponents, exact at order 8."""
    terms: dict[tuple[int, ...], Fraction] = {}
    while not terms:
        for _ in range(4):
            exponent = tuple(int(e) for e in rng.integers(0, 3, size=arity))
            coefficient = int(rng.integers(-3, 4))
            if coefficient:
                terms[exponent] = Fraction(coefficient)
    return TruncSeries(arity, 8, terms)


def test_lex_valuation() -> None:
    """Test function."""
    series = TruncSeries(2, 4, {(1, 0): Fraction(1), (0, 3): Fraction(2)})
    assert lex_valuation(series) == (0, 3)
    with pytest.raises(TruncationError, match="undetermined at this truncation"):
        lex_valuation(TruncSeries.zero(1, 3))


def test_lex_valuation_axioms() -> None:
    """Test function."""
    rng = np.random.default_rng(11)
    for _ in range(50):
        f, g = random_series(rng), random_series(rng)
        pairs = zip(lex_valuation(f), lex_valuation(g), strict=True)
        assert lex_valuation(f * g) == tuple(a + b for a, b in pairs)
        total = f + g
        if not total.is_zero:
            assert lex_valuation(total) >= min(lex_valuation(f), lex_valuation(g))


class TestValuedSection:
    """Test class."""

    def test_of(self) -> None:
        """Test method."""
        series = TruncSeries(1, 6, {(3,): Fraction(1, 2), (6,): Fraction(-1, 8)})
        section = ValuedSection.of("w", series)
        assert section.beta == (3,)
        assert section.lead == Fraction(1, 2)


def test_valued_sections(elliptic_bundle: SeriesBundle) -> None:
    """Test function."""
    sections = valued_sections(elliptic_bundle.series, elliptic_bundle.labels)
    assert [s.beta for s in sections] == [(1,), (0,), (0,)]


class TestValuedBasis:
    """Test class."""

    def test___post_init__(self) -> None:
        """Test method."""
        with pytest.raises(PreconditionError, match="pairwise distinct"):
            ValuedBasis(
                (ValuedSection.of("a", monomial(1)), ValuedSection.of("b", monomial(1)))
            )

    def test_value_set(self, cubic_basis: ValuedBasis) -> None:
        """Test method."""
        assert cubic_basis.value_set == frozenset({(0,), (1,), (3,)})

    def test_trunc_order(self, cubic_basis: ValuedBasis) -> None:
        """Test method."""
        assert cubic_basis.trunc_order == 12

    def test_arity(self, cubic_basis: ValuedBasis) -> None:
        """Test method."""
        assert cubic_basis.arity == 1


def test_triangularize(elliptic_bundle: SeriesBundle, cubic_basis: ValuedBasis) -> None:
    """Test function."""
    assert [s.beta for s in cubic_basis.sections] == [(1,), (3,), (0,)]
    assert [s.lead for s in cubic_basis.sections] == [1, Fraction(1, 2), 1]

    basis = triangularize(elliptic_bundle.series, elliptic_bundle.labels)
    assert [s.label for s in basis.sections] == ["x/z", "z/z", "y/z - z/z"]
    assert [s.beta for s in basis.sections] == [(1,), (0,), (3,)]

    labels = [s.label for s in triangularize([monomial(2), monomial(0)]).sections]
    assert labels == ["s1", "s2"]

    with pytest.raises(DependentAtOrderError) as info:
        triangularize([monomial(1), monomial(1)], ["a", "b"])
    assert info.value.order == 6
    with pytest.raises(DependentAtOrderError):
        triangularize([TruncSeries.zero(1, 6)])

    spanning = [monomial(1), monomial(1), TruncSeries.zero(1, 6)]
    kept = triangularize(spanning, drop_dependent=True)
    assert len(kept.sections) == 1


def test_triangularize_is_order_independent(elliptic_bundle: SeriesBundle) -> None:
    """Test function."""
    rng = np.random.default_rng(5)
    series = list(elliptic_bundle.series)
    for _ in range(6):
        order = rng.permutation(len(series))
        shuffled = [series[i] for i in order]
        assert triangularize(shuffled).value_set == frozenset({(0,), (1,), (3,)})

    for _ in range(20):
        spanning = [random_series(rng) for _ in range(5)]
        expected = triangularize(spanning, drop_dependent=True).value_set
        for _ in range(3):
            order = rng.permutation(len(spanning))
            shuffled = [spanning[i] for i in order]
            kept = triangularize(shuffled, drop_dependent=True)
            assert kept.value_set == expected


def test__eliminate() -> None:
    """Test function."""
    spanning = [monomial(1), monomial(1), monomial(2)]
    basis, dropped = _eliminate(spanning, None, drop_dependent=True)
    assert dropped == 1
    assert basis.value_set == frozenset({(1,), (2,)})
    with pytest.raises(PreconditionError, match="one label"):
        _eliminate([monomial(1)], ["a", "b"], drop_dependent=False)


def test__reduced_label() -> None:
    """Test function."""
    assert _reduced_label("a", Fraction(1), "b") == "a - b"
    assert _reduced_label("a", Fraction(2, 3), "b") == "a - (2/3)*b"


def test_power_value_set(cubic_basis: ValuedBasis) -> None:
    """Test function."""
    assert power_value_set(cubic_basis, 1) == frozenset({(0,), (1,), (3,)})
    expected = frozenset({(0,), (1,), (2,), (3,), (4,), (6,)})
    assert power_value_set(cubic_basis, 2) == expected
    with pytest.raises(TruncationError, match="truncation insufficient"):
        power_value_set(cubic_basis, 5)
    with pytest.raises(TruncationError, match="vanish through order 12 < 18"):
        power_value_set(cubic_basis, 3)
    with pytest.raises(PreconditionError, match="positive"):
        power_value_set(cubic_basis, 0)

    conic = cmd_expand(VarietySpec.from_json(fixture_path("conic.json")))
    conic_basis = triangularize(conic.series, conic.labels)
    conic_values = power_value_set(conic_basis, 2)
    assert conic_values == frozenset({(0,), (1,), (2,), (3,), (4,)})

    cubic = cmd_expand(VarietySpec.from_json(fixture_path("cubic.json")), 24)
    wider = triangularize(cubic.series, cubic.labels)
    cubed = power_value_set(wider, 3)
    assert cubed == frozenset((v,) for v in (0, 1, 2, 3, 4, 5, 6, 7, 9))


def test_check_lattice_condition(cubic_basis: ValuedBasis) -> None:
    """Test function."""
    assert check_lattice_condition(cubic_basis)
    even = triangularize([monomial(0), monomial(2)])
    assert not check_lattice_condition(even)


def test_is_gamma_minimal() -> None:
    """Test function."""
    support = [(0, 2), (1, 0)]
    assert is_gamma_minimal(support, (0, 2), (3, 1))
    assert not is_gamma_minimal(support, (0, 2), (2, 1))


def test_choose_gamma(cubic_basis: ValuedBasis) -> None:
    """Test function."""
    supports = [(s.series.support, s.beta) for s in cubic_basis.sections]
    assert choose_gamma(supports) == (1,)
    assert choose_gamma([([(0, 2), (1, 0)], (0, 2))], bound=3) == (3, 1)
    with pytest.raises(PreconditionError, match="no separating weight"):
        choose_gamma([([(0, 2), (1, 0)], (0, 2))], bound=1)
    with pytest.raises(PreconditionError, match="no sections"):
        choose_gamma([])


class TestGammaCertificate:
    """Test class."""

    def test_verify(self) -> None:
        """Test method."""
        supports = ((((0, 2), (1, 0)), (0, 2)),)
        assert GammaCertificate((3, 1), 6, supports).verify()
        assert not GammaCertificate((1, 1), 6, supports).verify()


def test_certify_gamma(cubic_basis: ValuedBasis) -> None:
    """Test function."""
    certificate = certify_gamma(cubic_basis)
    assert certificate.gamma == (1,)
    assert certificate.verified_on_trunc == 12
    assert certificate.assumes_full_support
    assert certificate.verify()
