"""Toric degeneration families built from a valued basis and a weight.

For a section f_j with valuation beta_j the family member is

    f~_j(u~, t) = t**(-gamma.beta_j) f_j(t**gamma_1 u~_1, ..., t**gamma_n u~_n)

and the special fiber t = 0 is the monomial map u~ -> (c_j u~**beta_j)_j.
Exact data lives in `DegenerationFamily`, the floating point evaluator used
by the flow in `NumericFamily`.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
import numpy.typing as npt

from tordeg.src.consts import JACOBIAN_SAMPLES
from tordeg.src.errors import PreconditionError
from tordeg.src.exact import (
    RatMatrix,
    RatPoint,
    Rational,
    as_point,
    differences_generate_lattice,
    rank,
)
from tordeg.src.linsys import ValuedBasis, ValuedSection
from tordeg.src.series import (
    Exponent,
    TruncSeries,
    poly_derivative,
    poly_evaluate,
    substitute_weighted,
)

logger = logging.getLogger(__name__)

type ComplexArray = npt.NDArray[np.complex128]


@dataclass(frozen=True)
class DegenerationFamily:
    """Exact data of a toric degeneration.

    Attributes:
        gamma: The separating weight.
        labels: Section labels.
        sections: The series f_j(u) at p.
        tilde: The series f~_j(u~, t), t being the last variable.
        betas: Valuations beta_j.
        leads: Leading coefficients c_j.
    """

    gamma: tuple[int, ...]
    labels: tuple[str, ...]
    sections: tuple[TruncSeries, ...]
    tilde: tuple[TruncSeries, ...]
    betas: tuple[Exponent, ...]
    leads: tuple[Fraction, ...]

    @property
    def n(self) -> int:
        """Dimension of the variety."""
        return len(self.gamma)

    @property
    def size(self) -> int:
        """Number of sections."""
        return len(self.sections)

    @property
    def default_chart(self) -> int:
        """Last index among the sections of lexicographically smallest valuation."""
        smallest = min(self.betas)
        return max(j for j, beta in enumerate(self.betas) if beta == smallest)

    @property
    def special_fiber(self) -> tuple[tuple[Fraction, Exponent], ...]:
        """Coefficient and exponent of every monomial of the special fiber map."""
        return tuple(zip(self.leads, self.betas, strict=True))

    @cached_property
    def numeric(self) -> "NumericFamily":
        """Floating point evaluator of the family."""
        return NumericFamily.from_family(self)


def build_family(
    basis: ValuedBasis | Sequence[ValuedSection],
    gamma: Sequence[int],
    *,
    require_distinct: bool = True,
) -> DegenerationFamily:
    """Build the degeneration family of a basis.

    Args:
        basis: A valued basis, or valued sections that may repeat
            valuations when require_distinct is False.
        gamma: A weight making every valuation strictly minimal.
        require_distinct: Reject repeated valuations.

    Returns:
        The family.

    Raises:
        PreconditionError: If gamma does not separate, if the t**0 part of
            a section is not its leading monomial or if the differences of
            the valuations do not generate the lattice.
    """
    sections = basis.sections if isinstance(basis, ValuedBasis) else tuple(basis)
    if not sections:
        msg = "no sections given"
        raise PreconditionError(msg)
    weight = tuple(int(g) for g in gamma)
    betas = tuple(s.beta for s in sections)
    if require_distinct and len(set(betas)) != len(betas):
        msg = "valuations repeat, triangularize the basis first"
        raise PreconditionError(msg)

    tilde: list[TruncSeries] = []
    for section in sections:
        try:
            member = substitute_weighted(section.series, weight, section.beta)
        except PreconditionError as err:
            msg = f"gamma {weight} is not separating at this truncation: {err}"
            raise PreconditionError(msg) from err
        special = member.t_slice(0)
        if dict(special.terms) != {section.beta: section.lead}:
            msg = (
                f"gamma {weight} is not separating: the t^0 part of {section.label!r} "
                f"is {special.format()}, not a single monomial"
            )
            raise PreconditionError(msg)
        tilde.append(member)

    if not differences_generate_lattice(set(betas)):
        msg = (
            "special fiber torus not full: "
            "differences of the valuations do not generate Z^n"
        )
        raise PreconditionError(msg)

    family = DegenerationFamily(
        gamma=weight,
        labels=tuple(s.label for s in sections),
        sections=tuple(s.series for s in sections),
        tilde=tuple(tilde),
        betas=betas,
        leads=tuple(s.lead for s in sections),
    )
    logger.info("Built family with gamma=%s and %d sections", weight, family.size)
    return family


@dataclass(frozen=True)
class JacobianCertificate:
    """Exact Jacobian of the chart ratios at a point of the zero fiber.

    Rows are d/du~_1, ..., d/du~_n, d/dt; columns are f~_j / f~_r for
    j != chart, then t.
    """

    chart: int
    point: RatPoint
    matrix: RatMatrix
    rank: int

    @property
    def full_rank(self) -> bool:
        """Whether the family is an immersion at the point."""
        return self.rank == len(self.point) + 1


def jacobian_at_zero_fiber(
    family: DegenerationFamily,
    u_tilde: Sequence[Rational],
    chart: int | None = None,
) -> JacobianCertificate:
    """Exact Jacobian of the family at (u~, 0).

    The t-derivatives come from the t**0 and t**1 coefficients by the
    quotient rule, so nothing is approximated.

    Args:
        family: The degeneration family.
        u_tilde: Rational point of the torus.
        chart: Index r of the section used as denominator.

    Returns:
        The matrix and its exact rank.
    """
    point = as_point(u_tilde)
    if len(point) != family.n or any(x == 0 for x in point):
        shown = tuple(str(x) for x in point)
        msg = f"point {shown} is not on the torus of dimension {family.n}"
        raise PreconditionError(msg)
    r = family.default_chart if chart is None else chart
    if not 0 <= r < family.size:
        msg = f"chart index {r} out of range"
        raise PreconditionError(msg)

    values: list[Fraction] = []
    t_rates: list[Fraction] = []
    gradients: list[list[Fraction]] = []
    for member in family.tilde:
        zero = member.t_slice(0).terms
        first = member.t_slice(1).terms
        values.append(poly_evaluate(zero, point))
        t_rates.append(poly_evaluate(first, point) if first else Fraction(0))
        gradients.append(
            [poly_evaluate(poly_derivative(zero, i), point) for i in range(family.n)]
        )

    denominator = values[r]
    others = [j for j in range(family.size) if j != r]
    rows: list[tuple[Fraction, ...]] = []
    for i in range(family.n):
        row = [
            (gradients[j][i] * denominator - values[j] * gradients[r][i])
            / denominator**2
            for j in others
        ]
        rows.append((*row, Fraction(0)))
    t_row = [
        (t_rates[j] * denominator - values[j] * t_rates[r]) / denominator**2
        for j in others
    ]
    rows.append((*t_row, Fraction(1)))
    matrix = tuple(rows)
    return JacobianCertificate(r, point, matrix, rank(matrix))


@dataclass(frozen=True)
class ImmersionCertificate:
    """Jacobian ranks of a family at sampled points of the zero fiber."""

    gamma: tuple[int, ...]
    chart: int
    samples: tuple[JacobianCertificate, ...]

    @property
    def holds(self) -> bool:
        """Whether the Jacobian has full rank at every sample."""
        return all(s.full_rank for s in self.samples)


def sample_torus_points(
    n: int, count: int, rng: np.random.Generator
) -> tuple[RatPoint, ...]:
    """Random rational points with nonzero coordinates."""
    signs = rng.choice([-1, 1], size=(count, n))
    numerators = rng.integers(1, 10, size=(count, n)) * signs
    denominators = rng.integers(1, 6, size=(count, n))
    return tuple(
        tuple(Fraction(int(a), int(b)) for a, b in zip(num_row, den_row, strict=True))
        for num_row, den_row in zip(numerators, denominators, strict=True)
    )


def immersion_certificate(
    family: DegenerationFamily,
    rng: np.random.Generator,
    count: int = JACOBIAN_SAMPLES,
    chart: int | None = None,
) -> ImmersionCertificate:
    """Evaluate the zero fiber Jacobian at random torus points.

    Args:
        family: The degeneration family.
        rng: Random generator for the sample points.
        count: Number of sample points.
        chart: Chart index, the default chart when None.

    Returns:
        The certificate with one Jacobian per sample.
    """
    samples = tuple(
        jacobian_at_zero_fiber(family, point, chart)
        for point in sample_torus_points(family.n, count, rng)
    )
    chart_used = samples[0].chart if samples else 0
    certificate = ImmersionCertificate(family.gamma, chart_used, samples)
    logger.info(
        "Zero fiber Jacobian full rank at %d of %d samples",
        sum(s.full_rank for s in samples),
        len(samples),
    )
    return certificate


def _powers(base: ComplexArray, exponents: npt.NDArray[np.int64]) -> ComplexArray:
    """Monomials base**exponents row by row, exponents nonnegative."""
    result: ComplexArray = np.prod(base[None, :] ** exponents, axis=1)
    return result


def _power_derivatives(
    base: ComplexArray, exponents: npt.NDArray[np.int64], index: int
) -> ComplexArray:
    """Derivative of every monomial with respect to one variable."""
    lowered = exponents.copy()
    lowered[:, index] = np.maximum(lowered[:, index] - 1, 0)
    result: ComplexArray = exponents[:, index] * np.prod(
        base[None, :] ** lowered, axis=1
    )
    return result


@dataclass(frozen=True, eq=False)
class NumericFamily:
    """Floating point evaluation of a family and its holomorphic derivatives.

    The family members are evaluated untruncated, t**(-gamma.beta_j) times
    the known polynomial part of f_j(t**gamma u~), so both charts agree up to
    rounding.
    """

    gamma: npt.NDArray[np.int64]
    shifts: npt.NDArray[np.int64]
    exponents: tuple[npt.NDArray[np.int64], ...]
    coefficients: tuple[npt.NDArray[np.float64], ...]

    @classmethod
    def from_family(cls, family: DegenerationFamily) -> "NumericFamily":
        """Convert the exact family data to arrays."""
        gamma = np.array(family.gamma, dtype=np.int64)
        shifts = np.array(
            [int(np.dot(gamma, beta)) for beta in family.betas], dtype=np.int64
        )
        exponents = tuple(
            np.array(s.support, dtype=np.int64).reshape(-1, family.n)
            for s in family.sections
        )
        coefficients = tuple(
            np.array([float(c) for _, c in s], dtype=np.float64)
            for s in family.sections
        )
        return cls(gamma, shifts, exponents, coefficients)

    @property
    def n(self) -> int:
        """Dimension of the variety."""
        return int(self.gamma.shape[0])

    @property
    def size(self) -> int:
        """Number of sections."""
        return len(self.exponents)

    def sections(self, u: ComplexArray) -> tuple[ComplexArray, ComplexArray]:
        """Values f_j(u) and their u-gradients, shape (r,) and (r, n)."""
        values = np.empty(self.size, dtype=np.complex128)
        gradients = np.empty((self.size, self.n), dtype=np.complex128)
        pairs = zip(self.exponents, self.coefficients, strict=True)
        for j, (exps, coeffs) in enumerate(pairs):
            values[j] = np.sum(coeffs * _powers(u, exps))
            for i in range(self.n):
                gradients[j, i] = np.sum(coeffs * _power_derivatives(u, exps, i))
        return values, gradients

    def tilde(
        self, u_tilde: ComplexArray, t: complex
    ) -> tuple[ComplexArray, ComplexArray]:
        """Values of f~_j and the Jacobian in (u~, t), shape (r,) and (r, n + 1).

        Args:
            u_tilde: Point of the degenerating chart.
            t: Family parameter, zero allowed.

        Returns:
            Values and holomorphic Jacobian.
        """
        values = np.empty(self.size, dtype=np.complex128)
        jacobian = np.empty((self.size, self.n + 1), dtype=np.complex128)
        t_arr = np.array([t], dtype=np.complex128)
        pairs = zip(self.exponents, self.coefficients, strict=True)
        for j, (exps, coeffs) in enumerate(pairs):
            t_exps = (exps @ self.gamma - self.shifts[j]).reshape(-1, 1)
            monomials = _powers(u_tilde, exps)
            t_powers = _powers(t_arr, t_exps)
            values[j] = np.sum(coeffs * monomials * t_powers)
            for i in range(self.n):
                derivative = _power_derivatives(u_tilde, exps, i)
                jacobian[j, i] = np.sum(coeffs * derivative * t_powers)
            t_derivative = _power_derivatives(t_arr, t_exps, 0)
            jacobian[j, self.n] = np.sum(coeffs * monomials * t_derivative)
        return values, jacobian

    def trivial(self, u: ComplexArray, t: complex) -> tuple[ComplexArray, ComplexArray]:
        """Values t**(-gamma.beta_j) f_j(u) and the Jacobian in (u, t)."""
        values, gradients = self.sections(u)
        scale = t ** (-self.shifts.astype(np.float64))
        jacobian = np.empty((self.size, self.n + 1), dtype=np.complex128)
        jacobian[:, : self.n] = gradients * scale[:, None]
        jacobian[:, self.n] = -self.shifts * values * scale / t
        return values * scale, jacobian


def _normalize(values: ComplexArray) -> ComplexArray:
    norm = float(np.linalg.norm(values))
    if norm == 0.0:
        msg = "all sections vanish, the point has no image"
        raise PreconditionError(msg)
    result: ComplexArray = values / norm
    return result


def evaluate_embedding(
    family: DegenerationFamily, u_tilde: Sequence[complex], t: complex
) -> ComplexArray:
    """Unit representative of the image of (u~, t) in projective space.

    Args:
        family: The degeneration family.
        u_tilde: Point of the degenerating chart.
        t: Family parameter.

    Returns:
        The normalized vector (f~_j(u~, t))_j.
    """
    values, _ = family.numeric.tilde(np.asarray(u_tilde, dtype=np.complex128), t)
    return _normalize(values)
