"""Independent root count for curves.

The number of zeros in C* of a generic Laurent polynomial with exponents A
equals the length of conv(A). Counting the distinct roots of random members
gives a check on the normalized volume computed from the polytope.
"""

import logging
from collections import Counter
from collections.abc import Iterable, Sequence
from fractions import Fraction

import numpy as np
import sympy

from tordeg.src.consts import ORACLE_DENOMINATOR, ORACLE_TRIALS
from tordeg.src.errors import PreconditionError

logger = logging.getLogger(__name__)


def _random_rational(rng: np.random.Generator) -> Fraction:
    numerator = int(rng.integers(1, ORACLE_DENOMINATOR)) * int(rng.choice([-1, 1]))
    return Fraction(numerator, int(rng.integers(1, ORACLE_DENOMINATOR)))


def count_torus_roots(values: Sequence[int], coefficients: Sequence[Fraction]) -> int:
    """Number of distinct roots in C* of sum_j a_j u**beta_j.

    Args:
        values: Exponents beta_j.
        coefficients: Rational coefficients a_j.

    Returns:
        The count of distinct nonzero roots.
    """
    u = sympy.Symbol("u")
    low = min(values)
    poly = sympy.Poly(
        sum(
            sympy.Rational(c.numerator, c.denominator) * u ** (b - low)
            for b, c in zip(values, coefficients, strict=True)
        ),
        u,
    )
    if poly.is_zero or poly.eval(0) == 0:
        return 0
    return int(poly.sqf_part().degree())


def bk_oracle_curve(
    values: Iterable[Sequence[int] | int],
    rng: np.random.Generator,
    trials: int = ORACLE_TRIALS,
    coefficients: Sequence[Fraction] | None = None,
) -> int:
    """Majority root count of random systems supported on a value set.

    Args:
        values: One dimensional value set, as ints or 1-tuples.
        rng: Random generator for the coefficients.
        trials: Number of random systems.
        coefficients: Fixed toric coefficients c_j in increasing exponent
            order; the random coefficients multiply them.

    Returns:
        The most frequent root count.
    """
    exponents = sorted({v if isinstance(v, int) else _single(v) for v in values})
    if len(exponents) < 2:  # noqa: PLR2004
        msg = "a value set with fewer than two points has no root count"
        raise PreconditionError(msg)
    if coefficients is None:
        coefficients = [Fraction(1)] * len(exponents)
    scales = list(coefficients)
    if len(scales) != len(exponents):
        msg = "one coefficient is needed per value"
        raise PreconditionError(msg)
    counts = Counter(
        count_torus_roots(exponents, [_random_rational(rng) * s for s in scales])
        for _ in range(trials)
    )
    count, votes = counts.most_common(1)[0]
    logger.info("Root count oracle: %d (%d of %d trials)", count, votes, trials)
    return count


def _single(value: Sequence[int]) -> int:
    if len(value) != 1:
        msg = (
            "the root count oracle is for curves,"
            f" got a value of dimension {len(value)}"
        )
        raise PreconditionError(msg)
    return int(value[0])
