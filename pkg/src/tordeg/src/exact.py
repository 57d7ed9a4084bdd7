"""Exact rational and integer linear algebra.

Everything here works on `Fraction` and `int`, never on floats. Matrices are
sequences of rows.
"""

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from tordeg.src.errors import PreconditionError

logger = logging.getLogger(__name__)

type Rational = Fraction | int
type RatPoint = tuple[Fraction, ...]
type IntVector = tuple[int, ...]
type IntMatrix = tuple[IntVector, ...]
type RatMatrix = tuple[RatPoint, ...]


def as_point(values: Iterable[Rational | str]) -> RatPoint:
    """Convert an iterable of rationals to a point."""
    return tuple(Fraction(v) for v in values)


def dot(left: Sequence[Rational], right: Sequence[Rational]) -> Fraction:
    """Exact dot product."""
    if len(left) != len(right):
        msg = f"dimension mismatch: {len(left)} != {len(right)}"
        raise PreconditionError(msg)
    return Fraction(sum((Fraction(a) * b for a, b in zip(left, right, strict=True)), 0))


def subtract(left: Sequence[Rational], right: Sequence[Rational]) -> RatPoint:
    """Componentwise difference."""
    return tuple(Fraction(a) - b for a, b in zip(left, right, strict=True))


def identity(size: int) -> IntMatrix:
    """Integer identity matrix."""
    return tuple(tuple(int(i == j) for j in range(size)) for i in range(size))


def transpose[T](matrix: Sequence[Sequence[T]]) -> tuple[tuple[T, ...], ...]:
    """Transpose a rectangular matrix."""
    return tuple(zip(*matrix, strict=True))


def mat_mul(
    left: Sequence[Sequence[Rational]], right: Sequence[Sequence[Rational]]
) -> RatMatrix:
    """Exact matrix product."""
    columns = transpose(right)
    return tuple(tuple(dot(row, col) for col in columns) for row in left)


def mat_vec(
    matrix: Sequence[Sequence[Rational]], vector: Sequence[Rational]
) -> RatPoint:
    """Exact matrix vector product."""
    return tuple(dot(row, vector) for row in matrix)


def row_echelon(
    matrix: Sequence[Sequence[Rational]],
) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form by Gaussian elimination over the rationals.

    Args:
        matrix: The matrix to reduce.

    Returns:
        The nonzero rows of the reduced form and their pivot columns.
    """
    rows = [[Fraction(x) for x in row] for row in matrix]
    if not rows:
        return [], []
    n_cols = len(rows[0])
    pivots: list[int] = []
    pivot_row = 0
    for col in range(n_cols):
        found = next(
            (r for r in range(pivot_row, len(rows)) if rows[r][col] != 0),
            None,
        )
        if found is None:
            continue
        rows[pivot_row], rows[found] = rows[found], rows[pivot_row]
        lead = rows[pivot_row][col]
        rows[pivot_row] = [x / lead for x in rows[pivot_row]]
        for r in range(len(rows)):
            if r != pivot_row and rows[r][col] != 0:
                factor = rows[r][col]
                pairs = zip(rows[r], rows[pivot_row], strict=True)
                rows[r] = [a - factor * b for a, b in pairs]
        pivots.append(col)
        pivot_row += 1
        if pivot_row == len(rows):
            break
    return rows[:pivot_row], pivots


def rank(matrix: Sequence[Sequence[Rational]]) -> int:
    """Exact rank of a rational matrix."""
    return len(row_echelon(matrix)[1])


def determinant(matrix: Sequence[Sequence[Rational]]) -> Fraction:
    """Exact determinant of a square matrix.

    Args:
        matrix: Square rational matrix.

    Returns:
        The determinant, 1 for the empty matrix.
    """
    size = len(matrix)
    rows = [[Fraction(x) for x in row] for row in matrix]
    if any(len(row) != size for row in rows):
        msg = "determinant needs a square matrix"
        raise PreconditionError(msg)
    det = Fraction(1)
    for col in range(size):
        found = next((r for r in range(col, size) if rows[r][col] != 0), None)
        if found is None:
            return Fraction(0)
        if found != col:
            rows[col], rows[found] = rows[found], rows[col]
            det = -det
        lead = rows[col][col]
        det *= lead
        for r in range(col + 1, size):
            if rows[r][col] != 0:
                factor = rows[r][col] / lead
                pairs = zip(rows[r], rows[col], strict=True)
                rows[r] = [a - factor * b for a, b in pairs]
    return det


def inverse(matrix: Sequence[Sequence[Rational]]) -> RatMatrix:
    """Exact inverse of a square rational matrix.

    Args:
        matrix: Square rational matrix.

    Returns:
        The inverse matrix.

    Raises:
        PreconditionError: If the matrix is singular.
    """
    size = len(matrix)
    augmented = [
        [Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(size)]
        for i, row in enumerate(matrix)
    ]
    reduced, pivots = row_echelon(augmented)
    if pivots[:size] != list(range(size)) or len(reduced) < size:
        msg = "matrix is singular"
        raise PreconditionError(msg)
    return tuple(tuple(row[size:]) for row in reduced)


def solve(matrix: Sequence[Sequence[Rational]], rhs: Sequence[Rational]) -> RatPoint:
    """Solve a nonsingular square system exactly."""
    return mat_vec(inverse(matrix), rhs)


def left_null_space(
    rows: Sequence[Sequence[Rational]], n_cols: int
) -> tuple[RatPoint, ...]:
    """Basis of the vectors orthogonal to every given row.

    Args:
        rows: Rows spanning a subspace of Q^n_cols.
        n_cols: Ambient dimension.

    Returns:
        Basis of the orthogonal complement, one vector per free column.
    """
    reduced, pivots = row_echelon(rows)
    free = [c for c in range(n_cols) if c not in pivots]
    basis: list[RatPoint] = []
    for f in free:
        vector = [Fraction(0)] * n_cols
        vector[f] = Fraction(1)
        for row, p in zip(reduced, pivots, strict=True):
            vector[p] = -row[f]
        basis.append(tuple(vector))
    return tuple(basis)


def primitive_integer(vector: Sequence[Rational]) -> tuple[IntVector, Fraction]:
    """Scale a rational vector to a primitive integer vector.

    Args:
        vector: Nonzero rational vector.

    Returns:
        The primitive integer vector and the positive factor it was scaled by.
    """
    fractions = [Fraction(x) for x in vector]
    lcm = math.lcm(*(x.denominator for x in fractions))
    ints = [int(x * lcm) for x in fractions]
    common = math.gcd(*ints)
    if common == 0:
        msg = "cannot normalize the zero vector"
        raise PreconditionError(msg)
    return tuple(x // common for x in ints), Fraction(lcm, common)


class SmithForm(NamedTuple):
    """Smith normal form with its unimodular transforms, u @ m @ v == d."""

    u: IntMatrix
    d: IntMatrix
    v: IntMatrix

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        """Nonzero diagonal entries of d, each dividing the next."""
        size = min(len(self.d), len(self.d[0])) if self.d else 0
        return tuple(self.d[i][i] for i in range(size) if self.d[i][i])


def smith_normal_form(matrix: Sequence[Sequence[int]]) -> SmithForm:
    """Compute the Smith normal form of an integer matrix.

    The pivot is always the entry of smallest absolute value of the remaining
    block, then its row and column are cleared with integer row and column
    operations. If the pivot does not divide the rest of the block, a row is
    added to bring a remainder into the pivot row and the step repeats.

    Args:
        matrix: Integer matrix, rows of equal length.

    Returns:
        The Smith form with transforms u and v.
    """
    n_rows = len(matrix)
    n_cols = len(matrix[0]) if n_rows else 0
    if any(len(row) != n_cols for row in matrix):
        msg = "matrix rows have different lengths"
        raise PreconditionError(msg)
    d = [[int(x) for x in row] for row in matrix]
    u = [list(row) for row in identity(n_rows)]
    v = [list(row) for row in identity(n_cols)]

    for s in range(min(n_rows, n_cols)):
        while True:
            pivot = _smallest_entry(d, s)
            if pivot is None:
                return _freeze_smith(u, d, v)
            i, j = pivot
            d[s], d[i] = d[i], d[s]
            u[s], u[i] = u[i], u[s]
            for row in d:
                row[s], row[j] = row[j], row[s]
            for row in v:
                row[s], row[j] = row[j], row[s]
            if d[s][s] < 0:
                d[s] = [-x for x in d[s]]
                u[s] = [-x for x in u[s]]
            if not _clear_cross(d, u, v, s):
                continue
            bad_row = next(
                (
                    r
                    for r in range(s + 1, n_rows)
                    if any(d[r][c] % d[s][s] for c in range(s + 1, n_cols))
                ),
                None,
            )
            if bad_row is None:
                break
            d[s] = [a + b for a, b in zip(d[s], d[bad_row], strict=True)]
            u[s] = [a + b for a, b in zip(u[s], u[bad_row], strict=True)]
    return _freeze_smith(u, d, v)


def _smallest_entry(d: list[list[int]], s: int) -> tuple[int, int] | None:
    best: tuple[int, int] | None = None
    for i in range(s, len(d)):
        for j in range(s, len(d[0])):
            if d[i][j] and (best is None or abs(d[i][j]) < abs(d[best[0]][best[1]])):
                best = (i, j)
    return best


def _clear_cross(
    d: list[list[int]], u: list[list[int]], v: list[list[int]], s: int
) -> bool:
    """Reduce row s and column s by the pivot, True if both became zero."""
    pivot = d[s][s]
    clean = True
    for r in range(s + 1, len(d)):
        q = d[r][s] // pivot
        if q:
            d[r] = [a - q * b for a, b in zip(d[r], d[s], strict=True)]
            u[r] = [a - q * b for a, b in zip(u[r], u[s], strict=True)]
        clean = clean and d[r][s] == 0
    for c in range(s + 1, len(d[0])):
        q = d[s][c] // pivot
        if q:
            for row in d:
                row[c] -= q * row[s]
            for row in v:
                row[c] -= q * row[s]
        clean = clean and d[s][c] == 0
    return clean


def _freeze_smith(
    u: list[list[int]], d: list[list[int]], v: list[list[int]]
) -> SmithForm:
    return SmithForm(
        u=tuple(tuple(row) for row in u),
        d=tuple(tuple(row) for row in d),
        v=tuple(tuple(row) for row in v),
    )


def differences_generate_lattice(points: Iterable[Sequence[int]]) -> bool:
    """Check that the pairwise differences of a point set generate Z^n.

    Differences to a base point generate the same lattice as all pairwise
    differences, so the check reduces to the Smith form of those.

    Args:
        points: Nonempty collection of integer points of one dimension.

    Returns:
        True if the difference lattice is all of Z^n.
    """
    pts = sorted({tuple(int(x) for x in p) for p in points})
    if not pts:
        msg = "point set is empty"
        raise PreconditionError(msg)
    n = len(pts[0])
    if any(len(p) != n for p in pts):
        msg = "points have different dimensions"
        raise PreconditionError(msg)
    if n == 0:
        return True
    base = pts[0]
    differences = [tuple(a - b for a, b in zip(p, base, strict=True)) for p in pts[1:]]
    if len(differences) < n:
        return False
    factors = smith_normal_form(differences).invariant_factors
    return len(factors) == n and all(f == 1 for f in factors)


@dataclass(frozen=True)
class UnimodularAffineMap:
    """Affine map x -> w x + a with w integral and det w = +-1."""

    w: IntMatrix
    a: RatPoint

    def __post_init__(self) -> None:
        """Validate the matrix."""
        size = len(self.w)
        if any(len(row) != size for row in self.w) or len(self.a) != size:
            msg = "unimodular map needs a square matrix and matching translation"
            raise PreconditionError(msg)
        if any(not isinstance(x, int) for row in self.w for x in row):
            msg = "unimodular map needs an integer matrix"
            raise PreconditionError(msg)
        if abs(determinant(self.w)) != 1:
            msg = f"matrix {self.w} is not unimodular"
            raise PreconditionError(msg)

    @classmethod
    def identity(cls, size: int) -> "UnimodularAffineMap":
        """The identity map of Q^size."""
        return cls(identity(size), tuple(Fraction(0) for _ in range(size)))

    @classmethod
    def from_rational(
        cls,
        w: Sequence[Sequence[Rational]],
        a: Sequence[Rational],
    ) -> "UnimodularAffineMap":
        """Build a map from a rational matrix that is integral."""
        if any(Fraction(x).denominator != 1 for row in w for x in row):
            msg = "matrix has non integer entries"
            raise PreconditionError(msg)
        return cls(
            tuple(tuple(int(x) for x in row) for row in w),
            as_point(a),
        )

    @property
    def dim(self) -> int:
        """Dimension of the space the map acts on."""
        return len(self.w)

    def apply(self, point: Sequence[Rational]) -> RatPoint:
        """Image of a point."""
        return tuple(x + y for x, y in zip(mat_vec(self.w, point), self.a, strict=True))

    def compose(self, inner: "UnimodularAffineMap") -> "UnimodularAffineMap":
        """The map self after inner."""
        w = mat_mul(self.w, inner.w)
        return UnimodularAffineMap.from_rational(w, self.apply(inner.a))

    def inverse(self) -> "UnimodularAffineMap":
        """The inverse map, again unimodular."""
        w_inv = inverse(self.w)
        return UnimodularAffineMap.from_rational(
            w_inv,
            tuple(-x for x in mat_vec(w_inv, self.a)),
        )


def apply_unimodular(
    transform: UnimodularAffineMap, point: Sequence[Rational]
) -> RatPoint:
    """Apply a unimodular affine map to a rational point.

    Args:
        transform: The map.
        point: A point of matching dimension.

    Returns:
        The exact image.
    """
    if len(point) != transform.dim:
        msg = f"point of dimension {len(point)} for a map of dimension {transform.dim}"
        raise PreconditionError(msg)
    return transform.apply(point)
