"""Valued sections of a linear system and the value sets of its powers.

Valuations are the lexicographically smallest exponent of a local series.
They can only be read off the truncated support, so every result here is
valid under the assumption that truncation does not hide a smaller exponent.
"""

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, product

from tordeg.src.consts import DEFAULT_GAMMA_BOUND, RELATION_MARGIN
from tordeg.src.errors import DependentAtOrderError, PreconditionError, TruncationError
from tordeg.src.exact import differences_generate_lattice
from tordeg.src.series import Exponent, TruncSeries, weighted_order

logger = logging.getLogger(__name__)


def lex_valuation(f: TruncSeries) -> Exponent:
    """Lexicographically smallest exponent of the support.

    Args:
        f: A nonzero truncated series.

    Returns:
        The valuation of f.

    Raises:
        TruncationError: If f has no known nonzero term.
    """
    if f.is_zero:
        msg = (
            "valuation undetermined at this truncation order:"
            f" series vanishes through order {f.trunc_order}"
        )
        raise TruncationError(msg)
    return f.support[0]


@dataclass(frozen=True)
class ValuedSection:
    """A section, its series at p and its valuation data."""

    label: str
    series: TruncSeries
    beta: Exponent
    lead: Fraction

    @classmethod
    def of(cls, label: str, series: TruncSeries) -> "ValuedSection":
        """Compute valuation and leading coefficient of a series."""
        beta = lex_valuation(series)
        return cls(label, series, beta, series.coefficient(beta))


def valued_sections(
    series: Sequence[TruncSeries], labels: Sequence[str]
) -> tuple[ValuedSection, ...]:
    """Attach valuations to labelled series."""
    pairs = zip(labels, series, strict=True)
    return tuple(ValuedSection.of(label, s) for label, s in pairs)


@dataclass(frozen=True)
class ValuedBasis:
    """Basis of a linear system with pairwise distinct valuations."""

    sections: tuple[ValuedSection, ...]

    def __post_init__(self) -> None:
        """Check that valuations are pairwise distinct."""
        betas = [s.beta for s in self.sections]
        if len(set(betas)) != len(betas):
            msg = "valuations of a valued basis must be pairwise distinct"
            raise PreconditionError(msg)

    @property
    def value_set(self) -> frozenset[Exponent]:
        """The set A of valuations."""
        return frozenset(s.beta for s in self.sections)

    @property
    def trunc_order(self) -> int:
        """Smallest truncation order among the sections."""
        return min(s.series.trunc_order for s in self.sections)

    @property
    def arity(self) -> int:
        """Number of local coordinates."""
        return self.sections[0].series.arity


def triangularize(
    series: Sequence[TruncSeries],
    labels: Sequence[str] | None = None,
    *,
    drop_dependent: bool = False,
) -> ValuedBasis:
    """Gaussian elimination on leading terms.

    Sections are taken in order. A section whose valuation is already held
    by a pivot is reduced by that pivot until its valuation is new. On a
    collision the sparser of the two stays the pivot, so monomial sections
    are kept as they are.

    Args:
        series: Series of the spanning sections.
        labels: Names of the sections, s1, s2, ... by default.
        drop_dependent: Discard sections that reduce to zero instead of
            raising.

    Returns:
        A basis of the span with pairwise distinct valuations.

    Raises:
        DependentAtOrderError: If a section reduces to zero at the current
            truncation and drop_dependent is False.
    """
    basis, _dropped = _eliminate(series, labels, drop_dependent=drop_dependent)
    return basis


def _eliminate(
    series: Sequence[TruncSeries],
    labels: Sequence[str] | None,
    *,
    drop_dependent: bool,
) -> tuple[ValuedBasis, int]:
    if labels is None:
        labels = [f"s{i + 1}" for i in range(len(series))]
    names = list(labels)
    if len(names) != len(series):
        msg = "one label is needed per section"
        raise PreconditionError(msg)
    members: list[ValuedSection] = []
    pivots: dict[Exponent, int] = {}
    dropped = 0
    for label, current_series in zip(names, series, strict=True):
        if current_series.is_zero:
            if not drop_dependent:
                raise DependentAtOrderError(current_series.trunc_order, label)
            dropped += 1
            continue
        current = ValuedSection.of(label, current_series)
        while current.beta in pivots:
            index = pivots[current.beta]
            pivot = members[index]
            if len(current.series) < len(pivot.series):
                members[index], current, pivot = current, pivot, current
            factor = current.lead / pivot.lead
            reduced = current.series - pivot.series.scale(factor)
            if reduced.is_zero:
                if not drop_dependent:
                    raise DependentAtOrderError(reduced.trunc_order, current.label)
                dropped += 1
                break
            label = _reduced_label(current.label, factor, pivot.label)
            current = ValuedSection.of(label, reduced)
        else:
            pivots[current.beta] = len(members)
            members.append(current)
    return ValuedBasis(tuple(members)), dropped


def _reduced_label(label: str, factor: Fraction, pivot: str) -> str:
    if factor == 1:
        return f"{label} - {pivot}"
    return f"{label} - ({factor})*{pivot}"


def power_value_set(basis: ValuedBasis, k: int) -> frozenset[Exponent]:
    """Value set A_k of the k-th power of the linear system.

    Every product of k basis sections is formed, then triangularized with
    dependent products dropped. A product that cancels to zero is only
    accepted as a relation when the truncation reaches RELATION_MARGIN
    times the order the valuations need.

    Args:
        basis: A valued basis.
        k: Positive power.

    Returns:
        The value set of the span of all k-fold products.

    Raises:
        TruncationError: If the truncation cannot see k times the largest
            valuation, or if products cancel below the relation margin.
    """
    if k <= 0:
        msg = f"k must be positive, got {k}"
        raise PreconditionError(msg)
    needed = k * max(sum(beta) for beta in basis.value_set)
    if basis.trunc_order < needed:
        msg = (
            f"truncation insufficient: order {basis.trunc_order} < {needed}"
            f" needed for k={k}"
        )
        raise TruncationError(msg)
    products: list[TruncSeries] = []
    labels: list[str] = []
    for combo in combinations_with_replacement(basis.sections, k):
        value = combo[0].series
        for section in combo[1:]:
            value = value * section.series
        products.append(value)
        labels.append("*".join(s.label for s in combo))
    reduced, dropped = _eliminate(products, labels, drop_dependent=True)
    if dropped and basis.trunc_order < RELATION_MARGIN * needed:
        msg = (
            f"truncation insufficient: {dropped} products of k={k} vanish through"
            f" order {basis.trunc_order} < {RELATION_MARGIN * needed}"
        )
        raise TruncationError(msg)
    logger.info(
        "Power k=%d: %d products, %d dependent dropped, |A_k|=%d",
        k,
        len(products),
        dropped,
        len(reduced.sections),
    )
    return reduced.value_set


def check_lattice_condition(basis: ValuedBasis) -> bool:
    """Check that differences of the value set generate Z^n."""
    return differences_generate_lattice(basis.value_set)


def is_gamma_minimal(
    support: Iterable[Exponent], beta: Exponent, gamma: Sequence[int]
) -> bool:
    """Check gamma.beta < gamma.alpha for every other support exponent."""
    weight = weighted_order(beta, gamma)
    return all(
        weighted_order(alpha, gamma) > weight for alpha in support if alpha != beta
    )


def choose_gamma(
    supports: Sequence[tuple[Iterable[Exponent], Exponent]],
    bound: int = DEFAULT_GAMMA_BOUND,
) -> tuple[int, ...]:
    """Find a positive weight making every valuation strictly minimal.

    Candidates are enumerated by increasing max norm and lexicographically
    within one norm, so the answer is deterministic.

    Args:
        supports: Pairs of (truncated support, valuation), one per section.
        bound: Largest max norm tried.

    Returns:
        The first separating weight.

    Raises:
        PreconditionError: If no weight up to the bound separates.
    """
    frozen = [(tuple(support), beta) for support, beta in supports]
    if not frozen:
        msg = "no sections given"
        raise PreconditionError(msg)
    n = len(frozen[0][1])
    for norm in range(1, bound + 1):
        for gamma in product(range(1, norm + 1), repeat=n):
            if max(gamma) != norm:
                continue
            if all(is_gamma_minimal(support, beta, gamma) for support, beta in frozen):
                logger.info("Separating weight gamma=%s", gamma)
                return gamma
    msg = (
        f"no separating weight found up to max norm {bound},"
        " raise the bound or the truncation"
    )
    raise PreconditionError(msg)


@dataclass(frozen=True)
class GammaCertificate:
    """A separating weight with the truncation it was verified on.

    Attributes:
        gamma: The weight.
        verified_on_trunc: Truncation order of the supports checked.
        supports: Pairs of (truncated support, valuation) that were checked.
        assumes_full_support: Minimality beyond the truncation is assumed.
    """

    gamma: tuple[int, ...]
    verified_on_trunc: int
    supports: tuple[tuple[tuple[Exponent, ...], Exponent], ...]
    assumes_full_support: bool = True

    def verify(self) -> bool:
        """Recheck strict minimality on the stored supports."""
        return all(
            is_gamma_minimal(support, beta, self.gamma)
            for support, beta in self.supports
        )


def certify_gamma(
    basis: ValuedBasis, bound: int = DEFAULT_GAMMA_BOUND
) -> GammaCertificate:
    """Choose a separating weight for a basis and record what was checked."""
    supports = tuple((s.series.support, s.beta) for s in basis.sections)
    gamma = choose_gamma(supports, bound)
    return GammaCertificate(gamma, basis.trunc_order, supports)
