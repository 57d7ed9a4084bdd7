"""Truncated multivariate power series with exact rational coefficients.

A `TruncSeries` knows every coefficient of total degree up to its truncation
order and nothing above. Arithmetic keeps this contract: the result of an
operation is truncated at the smallest order both operands determine.
"""

import logging
import math
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType

from tordeg.src.errors import PreconditionError, TruncationError
from tordeg.src.exact import Rational, determinant, dot, inverse

logger = logging.getLogger(__name__)

type Exponent = tuple[int, ...]
type Polynomial = Mapping[Exponent, Fraction]


@dataclass(frozen=True, eq=False)
class TruncSeries:
    """Power series in `arity` variables known up to total degree trunc_order.

    Attributes:
        arity: Number of variables.
        trunc_order: Largest total degree that is known exactly.
        terms: Nonzero coefficients by exponent, sorted by exponent.
    """

    arity: int
    trunc_order: int
    terms: Mapping[Exponent, Fraction]

    def __post_init__(self) -> None:
        """Validate exponents and drop zero or unknown terms."""
        if self.trunc_order < 0:
            msg = f"truncation order must be nonnegative, got {self.trunc_order}"
            raise PreconditionError(msg)
        clean: dict[Exponent, Fraction] = {}
        for exponent, coefficient in self.terms.items():
            if len(exponent) != self.arity or any(e < 0 for e in exponent):
                msg = f"exponent {exponent} does not fit arity {self.arity}"
                raise PreconditionError(msg)
            value = Fraction(coefficient)
            if value and sum(exponent) <= self.trunc_order:
                clean[tuple(int(e) for e in exponent)] = value
        object.__setattr__(self, "terms", MappingProxyType(dict(sorted(clean.items()))))

    @classmethod
    def zero(cls, arity: int, trunc_order: int) -> "TruncSeries":
        """The zero series."""
        return cls(arity, trunc_order, {})

    @classmethod
    def constant(cls, value: Rational, arity: int, trunc_order: int) -> "TruncSeries":
        """A constant series."""
        return cls(arity, trunc_order, {(0,) * arity: Fraction(value)})

    @classmethod
    def variable(cls, index: int, arity: int, trunc_order: int) -> "TruncSeries":
        """The coordinate series u_index."""
        exponent = tuple(int(i == index) for i in range(arity))
        return cls(arity, trunc_order, {exponent: Fraction(1)})

    def __eq__(self, other: object) -> bool:
        """Series are equal when arity, order and coefficients agree."""
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (self.arity, self.trunc_order, dict(self.terms)) == (
            other.arity,
            other.trunc_order,
            dict(other.terms),
        )

    def __hash__(self) -> int:
        """Hash of arity, order and coefficients."""
        return hash((self.arity, self.trunc_order, tuple(self.terms.items())))

    def __iter__(self) -> Iterator[tuple[Exponent, Fraction]]:
        """Iterate over (exponent, coefficient) pairs."""
        return iter(self.terms.items())

    def __len__(self) -> int:
        """Number of nonzero terms."""
        return len(self.terms)

    @property
    def is_zero(self) -> bool:
        """Whether every known coefficient vanishes."""
        return not self.terms

    @property
    def constant_term(self) -> Fraction:
        """Coefficient of the constant monomial."""
        return self.coefficient((0,) * self.arity)

    @property
    def support(self) -> tuple[Exponent, ...]:
        """Exponents with nonzero coefficient, lexicographically sorted."""
        return tuple(self.terms)

    def coefficient(self, exponent: Exponent) -> Fraction:
        """Coefficient of one monomial, zero when absent."""
        return self.terms.get(exponent, Fraction(0))

    def _check(self, other: "TruncSeries") -> int:
        if self.arity != other.arity:
            msg = f"arity mismatch: {self.arity} != {other.arity}"
            raise PreconditionError(msg)
        return min(self.trunc_order, other.trunc_order)

    def __add__(self, other: "TruncSeries | Rational") -> "TruncSeries":
        """Sum of series, or of a series and a constant."""
        if not isinstance(other, TruncSeries):
            other = TruncSeries.constant(other, self.arity, self.trunc_order)
        order = self._check(other)
        terms = dict(self.terms)
        for exponent, coefficient in other.terms.items():
            terms[exponent] = terms.get(exponent, Fraction(0)) + coefficient
        return TruncSeries(self.arity, order, terms)

    __radd__ = __add__

    def __neg__(self) -> "TruncSeries":
        """Negated series."""
        return self.scale(-1)

    def __sub__(self, other: "TruncSeries | Rational") -> "TruncSeries":
        """Difference of series."""
        return self + (-other)

    def __rsub__(self, other: Rational) -> "TruncSeries":
        """Constant minus series."""
        return (-self) + other

    def scale(self, factor: Rational) -> "TruncSeries":
        """Multiply every coefficient by a rational."""
        return TruncSeries(
            self.arity,
            self.trunc_order,
            {e: c * factor for e, c in self.terms.items()},
        )

    def __mul__(self, other: "TruncSeries | Rational") -> "TruncSeries":
        """Truncated product, or scaling by a constant."""
        if not isinstance(other, TruncSeries):
            return self.scale(other)
        order = self._check(other)
        by_degree: dict[int, list[tuple[Exponent, Fraction]]] = {}
        for exponent, coefficient in other.terms.items():
            by_degree.setdefault(sum(exponent), []).append((exponent, coefficient))
        terms: dict[Exponent, Fraction] = {}
        for left, c_left in self.terms.items():
            room = order - sum(left)
            for degree, group in by_degree.items():
                if degree > room:
                    continue
                for right, c_right in group:
                    key = tuple(a + b for a, b in zip(left, right, strict=True))
                    terms[key] = terms.get(key, Fraction(0)) + c_left * c_right
        return TruncSeries(self.arity, order, terms)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "TruncSeries":
        """Nonnegative integer power by repeated squaring."""
        if power < 0:
            return series_invert(self) ** (-power)
        result = TruncSeries.constant(1, self.arity, self.trunc_order)
        base = self
        while power:
            if power & 1:
                result = result * base
            power >>= 1
            if power:
                base = base * base
        return result

    def truncate(self, order: int) -> "TruncSeries":
        """Forget every coefficient above the given order."""
        if order > self.trunc_order:
            msg = (
                f"cannot raise the truncation order from {self.trunc_order} "
                f"to {order}"
            )
            raise TruncationError(msg)
        return TruncSeries(self.arity, order, self.terms)

    def derivative(self, index: int) -> "TruncSeries":
        """Partial derivative, known one order less."""
        if self.trunc_order == 0:
            msg = "derivative of an order 0 series is unknown"
            raise TruncationError(msg)
        terms: dict[Exponent, Fraction] = {}
        for exponent, coefficient in self.terms.items():
            if exponent[index]:
                lowered = tuple(e - int(i == index) for i, e in enumerate(exponent))
                terms[lowered] = coefficient * exponent[index]
        return TruncSeries(self.arity, self.trunc_order - 1, terms)

    def t_slice(self, power: int) -> "TruncSeries":
        """Coefficient of t**power, t being the last variable.

        Args:
            power: Exponent of the last variable.

        Returns:
            Series in the remaining variables, known up to trunc_order - power.
        """
        if power > self.trunc_order:
            msg = f"t**{power} is above the truncation order {self.trunc_order}"
            raise TruncationError(msg)
        return TruncSeries(
            self.arity - 1,
            self.trunc_order - power,
            {e[:-1]: c for e, c in self.terms.items() if e[-1] == power},
        )

    def evaluate(self, point: Sequence[complex]) -> complex:
        """Evaluate the known part at a complex point."""
        total = 0j
        for exponent, coefficient in self:
            powers = (x**e for x, e in zip(point, exponent, strict=True))
            total += float(coefficient) * math.prod(powers)
        return complex(total)

    def format(self, names: Sequence[str] | None = None) -> str:
        """Readable form with the truncation marker.

        Args:
            names: Variable names, u1, u2, ... by default.

        Returns:
            Text like ``1 + 1/2*u1^3 + O(deg 25)``.
        """
        if names is None:
            names = [f"u{i + 1}" for i in range(self.arity)]
        parts = []
        for exponent, coefficient in self:
            factors = [
                name if e == 1 else f"{name}^{e}"
                for name, e in zip(names, exponent, strict=True)
                if e
            ]
            if not factors:
                parts.append(str(coefficient))
            elif coefficient == 1:
                parts.append("*".join(factors))
            else:
                parts.append("*".join([str(coefficient), *factors]))
        body = " + ".join(parts) if parts else "0"
        return f"{body} + O(deg {self.trunc_order + 1})"


def series_arith(a: TruncSeries, b: TruncSeries, op: str) -> TruncSeries:
    """Add or multiply two series.

    Args:
        a: Left operand.
        b: Right operand of the same arity.
        op: Either "add" or "mul".

    Returns:
        The result, truncated at min of both orders.
    """
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    msg = f"unknown series operation {op!r}"
    raise PreconditionError(msg)


def series_invert(a: TruncSeries) -> TruncSeries:
    """Multiplicative inverse by Newton iteration.

    Each step x <- x (2 - a x) doubles the number of correct orders.

    Args:
        a: A unit, i.e. a series with nonzero constant term.

    Returns:
        The inverse, truncated at the order of a.

    Raises:
        PreconditionError: If the constant term is zero.
    """
    constant = a.constant_term
    if constant == 0:
        msg = "series is not a unit: its constant term is zero"
        raise PreconditionError(msg)
    inverse_series = TruncSeries.constant(1 / constant, a.arity, a.trunc_order)
    precision = 1
    while precision <= a.trunc_order:
        inverse_series = inverse_series * (2 - a * inverse_series)
        precision *= 2
    return inverse_series


def poly_derivative(poly: Polynomial, index: int) -> dict[Exponent, Fraction]:
    """Partial derivative of an exact polynomial."""
    result: dict[Exponent, Fraction] = {}
    for exponent, coefficient in poly.items():
        if exponent[index]:
            lowered = tuple(e - int(i == index) for i, e in enumerate(exponent))
            term = coefficient * exponent[index]
            result[lowered] = result.get(lowered, Fraction(0)) + term
    return result


def poly_evaluate(poly: Polynomial, point: Sequence[Rational]) -> Fraction:
    """Evaluate an exact polynomial at a rational point."""
    return Fraction(
        sum(
            (
                c * math.prod(Fraction(x) ** e for x, e in zip(point, exp, strict=True))
                for exp, c in poly.items()
            ),
            Fraction(0),
        )
    )


def compose(poly: Polynomial, arguments: Sequence[TruncSeries]) -> TruncSeries:
    """Substitute series for the variables of a polynomial.

    Args:
        poly: Exact polynomial, one exponent entry per argument.
        arguments: Series of common arity.

    Returns:
        The truncated composite.
    """
    if not arguments:
        msg = "composition needs at least one argument"
        raise PreconditionError(msg)
    arity = arguments[0].arity
    order = min(s.trunc_order for s in arguments)
    powers: list[dict[int, TruncSeries]] = [
        {0: TruncSeries.constant(1, arity, order), 1: s.truncate(order)}
        for s in arguments
    ]

    def power(index: int, exponent: int) -> TruncSeries:
        cache = powers[index]
        if exponent not in cache:
            cache[exponent] = power(index, exponent - 1) * cache[1]
        return cache[exponent]

    total = TruncSeries.zero(arity, order)
    for exponent, coefficient in poly.items():
        if len(exponent) != len(arguments):
            msg = (
                f"polynomial in {len(exponent)} variables "
                f"given {len(arguments)} arguments"
            )
            raise PreconditionError(msg)
        term = TruncSeries.constant(coefficient, arity, order)
        for index, e in enumerate(exponent):
            if e:
                term = term * power(index, e)
        total = total + term
    return total


def implicit_solve(g: Polynomial, y0: Rational, trunc: int) -> TruncSeries:
    """Solve g(u, y(u)) = 0 with y(0) = y0 as a power series.

    Args:
        g: Polynomial in (u_1, ..., u_n, y), y being the last variable.
        y0: Value of y at the origin, with g(0, y0) = 0.
        trunc: Requested truncation order.

    Returns:
        The series y(u), unique by the implicit function theorem.

    Raises:
        PreconditionError: If g(0, y0) != 0 or dg/dy(0, y0) == 0.
    """
    return implicit_solve_system([g], [y0], trunc)[0]


def implicit_solve_system(
    equations: Sequence[Polynomial],
    y0: Sequence[Rational],
    trunc: int,
) -> tuple[TruncSeries, ...]:
    """Solve G(u, y(u)) = 0 for k dependent variables by series Newton.

    The Jacobian inverse is refined alongside y with a Newton-Schulz step so
    the iteration stays quadratically convergent.

    Args:
        equations: k polynomials in (u_1, ..., u_n, y_1, ..., y_k).
        y0: Values of y at the origin.
        trunc: Requested truncation order.

    Returns:
        The series y_1(u), ..., y_k(u).

    Raises:
        PreconditionError: If the base point is off the variety or the
            dependent Jacobian is singular there.
        TruncationError: If the iteration fails to settle.
    """
    k = len(equations)
    if k != len(y0) or k == 0:
        msg = f"{k} equations for {len(y0)} dependent variables"
        raise PreconditionError(msg)
    arity = _common_arity(equations)
    n = arity - k
    if n < 0:
        msg = "more dependent variables than polynomial variables"
        raise PreconditionError(msg)
    base = (0,) * n + tuple(Fraction(y) for y in y0)
    residual0 = [poly_evaluate(eq, base) for eq in equations]
    if any(residual0):
        msg = f"point not on variety: residuals {[str(r) for r in residual0]}"
        raise PreconditionError(msg)
    jacobian_polys = [
        [poly_derivative(eq, n + j) for j in range(k)] for eq in equations
    ]
    jacobian0 = [[poly_evaluate(p, base) for p in row] for row in jacobian_polys]
    if determinant(jacobian0) == 0:
        msg = (
            "coordinate system is not transverse: "
            "the dependent Jacobian is singular at p"
        )
        raise PreconditionError(msg)

    u = [TruncSeries.variable(i, n, trunc) for i in range(n)]
    y = [TruncSeries.constant(c, n, trunc) for c in base[n:]]
    approx = [
        [TruncSeries.constant(x, n, trunc) for x in row] for row in inverse(jacobian0)
    ]
    max_steps = 2 * math.ceil(math.log2(trunc + 2)) + 4
    for step in range(max_steps):
        residual = [compose(eq, [*u, *y]) for eq in equations]
        if all(r.is_zero for r in residual):
            logger.debug("Implicit solve settled after %d Newton steps", step)
            return tuple(y)
        jacobian = [[compose(p, [*u, *y]) for p in row] for row in jacobian_polys]
        approx = _newton_schulz(jacobian, approx)
        correction = [_row_dot(row, residual) for row in approx]
        y = [yi - ci for yi, ci in zip(y, correction, strict=True)]
    msg = f"series Newton iteration did not settle within {max_steps} steps"
    raise TruncationError(msg)


def _common_arity(polys: Sequence[Polynomial]) -> int:
    arities = {len(e) for p in polys for e in p}
    if len(arities) != 1:
        msg = "polynomials must be nonzero and share one set of variables"
        raise PreconditionError(msg)
    return arities.pop()


def _row_dot(row: Sequence[TruncSeries], column: Sequence[TruncSeries]) -> TruncSeries:
    total = row[0] * column[0]
    for a, b in zip(row[1:], column[1:], strict=True):
        total = total + a * b
    return total


def _newton_schulz(
    matrix: Sequence[Sequence[TruncSeries]],
    approx: Sequence[Sequence[TruncSeries]],
) -> list[list[TruncSeries]]:
    """One step X <- X (2 I - M X) of the matrix inverse iteration."""
    size = len(matrix)
    columns = list(zip(*approx, strict=True))
    product = [
        [_row_dot(matrix[i], columns[j]) for j in range(size)] for i in range(size)
    ]
    correction = [
        [(2 if i == j else 0) - product[i][j] for j in range(size)]
        for i in range(size)
    ]
    correction_columns = list(zip(*correction, strict=True))
    return [
        [_row_dot(approx[i], correction_columns[j]) for j in range(size)]
        for i in range(size)
    ]


def weighted_order(exponent: Exponent, gamma: Sequence[int]) -> int:
    """Weight gamma . alpha of a monomial."""
    return int(dot(gamma, exponent))


def substitute_weighted(
    f: TruncSeries, gamma: Sequence[int], beta: Exponent
) -> TruncSeries:
    """Form t**(-gamma.beta) f(t**gamma_1 u_1, ..., t**gamma_n u_n).

    A term c u**alpha becomes c u**alpha t**(gamma.(alpha - beta)). Terms of f
    beyond its truncation have total degree above trunc_order, so the result
    is known up to (D + 1)(1 + min gamma) - gamma.beta - 1.

    Args:
        f: Series in u_1, ..., u_n truncated at D.
        gamma: Positive integer weight.
        beta: The gamma-minimal exponent of f.

    Returns:
        Series in (u_1, ..., u_n, t).

    Raises:
        PreconditionError: If a known term has smaller weight than beta.
        TruncationError: If nothing is known after the substitution.
    """
    if len(gamma) != f.arity or len(beta) != f.arity:
        msg = "weight, exponent and series arity differ"
        raise PreconditionError(msg)
    if any(g <= 0 for g in gamma):
        msg = f"weight {tuple(gamma)} must be strictly positive"
        raise PreconditionError(msg)
    shift = weighted_order(beta, gamma)
    order = (f.trunc_order + 1) * (1 + min(gamma)) - shift - 1
    if order < 0:
        msg = f"truncation {f.trunc_order} is too low for the weight {tuple(gamma)}"
        raise TruncationError(msg)
    terms: dict[Exponent, Fraction] = {}
    for exponent, coefficient in f:
        t_power = weighted_order(exponent, gamma) - shift
        if t_power < 0:
            msg = f"beta {beta} is not gamma-minimal: {exponent} has smaller weight"
            raise PreconditionError(msg)
        terms[(*exponent, t_power)] = coefficient
    return TruncSeries(f.arity + 1, order, terms)
