"""Variety descriptions and their local expansion at a smooth point.

A variety file names the ambient affine coordinates, the defining
equations, a smooth point p, which coordinates are local parameters and
which are solved for, and the sections sigma_j / tau of the line bundle as
polynomial numerators over a common denominator tau. Local coordinates are
u_i = x_i - p_i for the local variables.
"""

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

import sympy
from sympy.parsing.sympy_parser import parse_expr

from tordeg.src.consts import DEFAULT_TRUNC
from tordeg.src.errors import PreconditionError
from tordeg.src.exact import RatPoint, as_point
from tordeg.src.series import (
    Exponent,
    TruncSeries,
    compose,
    implicit_solve_system,
    series_invert,
)
from tordeg.src.utils import read_json

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VarietySpec:
    """A projective variety near a smooth point, with sections.

    Attributes:
        name: Name used for output directories.
        variables: Affine coordinate names.
        equations: Polynomial equations in the variables.
        point: The smooth point p, one rational per variable.
        local: Variables used as local parameters.
        dependent: Variables solved for as series in the local ones.
        tau_name: Name of the denominator section.
        tau: Polynomial expression of tau.
        sections: Pairs of (label, numerator polynomial).
        trunc: Default truncation order.
    """

    name: str
    variables: tuple[str, ...]
    equations: tuple[str, ...]
    point: RatPoint
    local: tuple[str, ...]
    dependent: tuple[str, ...]
    tau_name: str
    tau: str
    sections: tuple[tuple[str, str], ...]
    trunc: int = DEFAULT_TRUNC

    def __post_init__(self) -> None:
        """Check that the variable roles partition the variables."""
        if len(self.point) != len(self.variables):
            msg = (
                f"point has {len(self.point)} coordinates"
                f" for {len(self.variables)} variables"
            )
            raise PreconditionError(msg)
        if sorted(self.local + self.dependent) != sorted(self.variables):
            msg = "local and dependent variables must partition the variables"
            raise PreconditionError(msg)
        if not self.local:
            msg = "at least one local variable is needed"
            raise PreconditionError(msg)
        if len(self.equations) != len(self.dependent):
            msg = (
                f"{len(self.equations)} equations"
                f" for {len(self.dependent)} dependent variables"
            )
            raise PreconditionError(msg)
        if not self.sections:
            msg = "no sections given"
            raise PreconditionError(msg)
        if self.trunc < 0:
            msg = f"truncation order must be nonnegative, got {self.trunc}"
            raise PreconditionError(msg)

    @property
    def n(self) -> int:
        """Dimension of the variety."""
        return len(self.local)

    @property
    def labels(self) -> tuple[str, ...]:
        """Section labels."""
        return tuple(label for label, _ in self.sections)

    def coordinate(self, name: str) -> Fraction:
        """Coordinate of p for one variable."""
        return self.point[self.variables.index(name)]

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "VarietySpec":
        """Build a spec from its json form."""
        try:
            tau = data.get("tau", {"name": "1", "expr": "1"})
            return cls(
                name=str(data["name"]),
                variables=tuple(data["variables"]),
                equations=tuple(data.get("equations", ())),
                point=as_point(data["point"]),
                local=tuple(data["local"]),
                dependent=tuple(data.get("dependent", ())),
                tau_name=str(tau["name"]),
                tau=str(tau["expr"]),
                sections=tuple((str(k), str(v)) for k, v in data["sections"].items()),
                trunc=int(data.get("trunc", DEFAULT_TRUNC)),
            )
        except (KeyError, TypeError, ValueError) as err:
            if isinstance(err, PreconditionError):
                raise
            msg = f"malformed variety description: {err}"
            raise PreconditionError(msg) from err

    @classmethod
    def from_json(cls, path: Path) -> "VarietySpec":
        """Read a spec from a json file."""
        return cls.from_dict(read_json(path))

    def to_dict(self) -> dict[str, Any]:
        """Json form of the spec."""
        return {
            "name": self.name,
            "variables": list(self.variables),
            "equations": list(self.equations),
            "point": [str(x) for x in self.point],
            "local": list(self.local),
            "dependent": list(self.dependent),
            "tau": {"name": self.tau_name, "expr": self.tau},
            "sections": dict(self.sections),
            "trunc": self.trunc,
        }


def parse_polynomial(
    expression: str,
    variables: Sequence[str],
    shift: Mapping[str, Fraction] | None = None,
) -> dict[Exponent, Fraction]:
    """Parse a polynomial with rational coefficients into a term map.

    Args:
        expression: Polynomial in sympy syntax.
        variables: Variable order of the exponents.
        shift: Substitute x -> x + shift[x] before expanding.

    Returns:
        Exact coefficients by exponent.

    Raises:
        PreconditionError: For unknown symbols or non polynomial input.
    """
    symbols = {name: sympy.Symbol(name) for name in variables}
    try:
        expr = parse_expr(expression, local_dict=symbols)
    except (SyntaxError, TypeError, ValueError) as err:
        msg = f"cannot parse {expression!r}: {err}"
        raise PreconditionError(msg) from err
    unknown = {str(s) for s in expr.free_symbols} - set(variables)
    if unknown:
        msg = f"unknown symbols {sorted(unknown)} in {expression!r}"
        raise PreconditionError(msg)
    if shift:
        offsets = {
            symbols[name]: sympy.Rational(v.numerator, v.denominator)
            for name, v in shift.items()
        }
        expr = expr.subs(
            {symbol: symbol + offset for symbol, offset in offsets.items()},
            simultaneous=True,
        )
    try:
        poly = sympy.Poly(sympy.expand(expr), *symbols.values(), domain="QQ")
    except sympy.PolynomialError as err:
        msg = f"{expression!r} is not a polynomial with rational coefficients"
        raise PreconditionError(msg) from err
    return {
        tuple(int(e) for e in monomial): Fraction(int(coeff.p), int(coeff.q))
        for monomial, coeff in poly.terms()
        if coeff != 0
    }


@dataclass(frozen=True)
class SeriesBundle:
    """Local expansions of the coordinates and sections of a variety.

    Attributes:
        name: Variety name.
        local: Names of the local variables.
        labels: Section labels.
        series: Series of the sections f_j = sigma_j / tau.
        coordinates: Series of every ambient coordinate.
        trunc: Truncation order.
    """

    name: str
    local: tuple[str, ...]
    labels: tuple[str, ...]
    series: tuple[TruncSeries, ...]
    coordinates: tuple[tuple[str, TruncSeries], ...]
    trunc: int


def cmd_expand(spec: VarietySpec, trunc: int | None = None) -> SeriesBundle:
    """Expand coordinates and sections as series in the local coordinates.

    Args:
        spec: The variety description.
        trunc: Truncation order, the spec default when None.

    Returns:
        The series bundle.

    Raises:
        PreconditionError: If p is off the variety, the coordinate choice is
            not transverse or tau vanishes at p.
    """
    order = spec.trunc if trunc is None else trunc
    ordered = (*spec.local, *spec.dependent)
    shift = {name: spec.coordinate(name) for name in spec.local}

    u = [TruncSeries.variable(i, spec.n, order) for i in range(spec.n)]
    local_series = {
        name: TruncSeries.constant(spec.coordinate(name), spec.n, order) + u[i]
        for i, name in enumerate(spec.local)
    }
    if spec.dependent:
        equations = [parse_polynomial(eq, ordered, shift) for eq in spec.equations]
        solved = implicit_solve_system(
            equations,
            [spec.coordinate(name) for name in spec.dependent],
            order,
        )
        dependent_series = dict(zip(spec.dependent, solved, strict=True))
    else:
        dependent_series = {}
    by_name = local_series | dependent_series
    arguments = [by_name[name] for name in spec.variables]

    tau_series = compose(parse_polynomial(spec.tau, spec.variables), arguments)
    if tau_series.constant_term == 0:
        msg = f"the denominator {spec.tau_name} = {spec.tau} vanishes at p"
        raise PreconditionError(msg)
    tau_inverse = series_invert(tau_series)
    series = tuple(
        compose(parse_polynomial(numerator, spec.variables), arguments) * tau_inverse
        for _, numerator in spec.sections
    )
    logger.info("Expanded %s: %d sections to order %d", spec.name, len(series), order)
    return SeriesBundle(
        name=spec.name,
        local=spec.local,
        labels=spec.labels,
        series=series,
        coordinates=tuple((name, by_name[name]) for name in spec.variables),
        trunc=order,
    )
