"""Simplex embeddings and packings of rational polytopes with exact certificates.

A simplex certificate states that T(Delta(R)) lies in the interior of a
target polytope, where Delta(R) = {x >= 0, sum x <= R} and T is unimodular
affine. By the toric ball embedding argument the Gromov width of the
corresponding toric manifold is at least R.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

import numpy as np
from scipy import optimize

from tordeg.src.consts import (
    DEFAULT_SIMPLEX_BOUND,
    LP_DENOMINATOR,
    MAX_SIMPLEX_DIM,
    STRICT_SHRINK,
)
from tordeg.src.errors import CertificateInvalidError, PreconditionError
from tordeg.src.exact import (
    IntMatrix,
    RatPoint,
    Rational,
    UnimodularAffineMap,
    determinant,
    dot,
    inverse,
    mat_vec,
    subtract,
    transpose,
)
from tordeg.src.polytope import (
    HalfSpace,
    QPolytope,
    contains_polytope,
    convex_hull,
    normalized_volume,
    simplex,
)

logger = logging.getLogger(__name__)


def standard_simplex_vertices(n: int, size: Rational = 1) -> tuple[RatPoint, ...]:
    """Vertices 0, size e_1, ..., size e_n of Delta(size)."""
    origin = tuple(Fraction(0) for _ in range(n))
    corners = tuple(
        tuple(Fraction(size) if i == k else Fraction(0) for i in range(n))
        for k in range(n)
    )
    return (origin, *corners)


@dataclass(frozen=True)
class SimplexCertificate:
    """Claim that transform(Delta(size)) lies in the interior of target.

    Attributes:
        transform: The unimodular affine map.
        size: The certified size R.
        target: The target polytope.
        supremum: Size the certified one approaches, when the optimum itself
            only touches the boundary.
        open_supremum: Whether supremum is a limit that is not attained.
    """

    transform: UnimodularAffineMap
    size: Fraction
    target: QPolytope
    supremum: Fraction | None = None
    open_supremum: bool = False

    def simplex_vertices(self) -> tuple[RatPoint, ...]:
        """Vertices of the embedded simplex."""
        vertices = standard_simplex_vertices(self.transform.dim, self.size)
        return tuple(self.transform.apply(v) for v in vertices)


@dataclass(frozen=True)
class Verdict:
    """Outcome of an exact certificate check."""

    valid: bool
    reason: str = ""
    violated: HalfSpace | None = None
    vertex: RatPoint | None = None

    def __bool__(self) -> bool:
        """A verdict is truthy when the certificate is valid."""
        return self.valid


def verify_simplex_certificate(certificate: SimplexCertificate) -> Verdict:
    """Check a simplex certificate with exact arithmetic.

    Args:
        certificate: The certificate.

    Returns:
        A valid verdict, or the first violated facet and vertex.
    """
    target = certificate.target
    if not target.full_dimensional:
        return Verdict(valid=False, reason="target polytope is not full dimensional")
    if certificate.transform.dim != target.ambient:
        return Verdict(valid=False, reason="transform and target dimensions differ")
    if certificate.size <= 0:
        return Verdict(valid=False, reason="size must be positive")
    for vertex in certificate.simplex_vertices():
        for half_space in target.half_spaces:
            if not half_space.contains(vertex, strict=True):
                return Verdict(
                    valid=False,
                    reason="simplex vertex is not in the open half space",
                    violated=half_space,
                    vertex=vertex,
                )
    return Verdict(valid=True)


def _canonical_matrices(n: int, bound: int) -> list[IntMatrix]:
    """Unimodular matrices with entries in [-bound, bound], columns sorted."""
    entries = range(-bound, bound + 1)
    matrices: list[IntMatrix] = []
    for flat in product(entries, repeat=n * n):
        columns = [tuple(flat[k * n : (k + 1) * n]) for k in range(n)]
        if columns != sorted(columns):
            continue
        matrix = transpose(columns)
        if abs(determinant(matrix)) == 1:
            matrices.append(matrix)
    return matrices


def _exact_size(target: QPolytope, w: IntMatrix, a: RatPoint) -> Fraction | None:
    """Largest R with a + R W Delta inside the closed target, None if a is outside."""
    if not all(h.contains(a) for h in target.half_spaces):
        return None
    columns = transpose(w)
    best: Fraction | None = None
    for h in target.half_spaces:
        for column in columns:
            rate = dot(h.normal, column)
            if rate > 0:
                limit = h.slack(a) / rate
                best = limit if best is None else min(best, limit)
    return best


def _axis_aligned_size(target: QPolytope) -> Fraction | None:
    """R* = min a_i when the target is conv{0, a_1 e_1, ..., a_n e_n}."""
    n = target.ambient
    if len(target.vertices) != n + 1:
        return None
    origin = tuple(Fraction(0) for _ in range(n))
    if origin not in target.vertices:
        return None
    lengths: list[Fraction] = []
    for k in range(n):
        corner = next(
            (
                v
                for v in target.vertices
                if v[k] > 0 and all(v[i] == 0 for i in range(n) if i != k)
            ),
            None,
        )
        if corner is None:
            return None
        lengths.append(corner[k])
    return min(lengths)


def _lp_candidate(target: QPolytope, w: IntMatrix) -> tuple[Fraction, RatPoint] | None:
    """Float LP over (a, R), then an exact size for the rationalized a."""
    n = target.ambient
    columns = transpose(w)
    rows: list[list[float]] = []
    bounds: list[float] = []
    for h in target.half_spaces:
        normal = [float(x) for x in h.normal]
        rows.append([*normal, 0.0])
        bounds.append(float(h.offset))
        for column in columns:
            rows.append([*normal, float(dot(h.normal, column))])
            bounds.append(float(h.offset))
    cost = np.zeros(n + 1)
    cost[-1] = -1.0
    result = optimize.linprog(
        cost,
        A_ub=np.array(rows),
        b_ub=np.array(bounds),
        bounds=[(None, None)] * n + [(0, None)],
        method="highs",
    )
    if not result.success:
        return None
    a = tuple(
        Fraction(float(x)).limit_denominator(LP_DENOMINATOR) for x in result.x[:n]
    )
    size = _exact_size(target, w, a)
    if size is None or size <= 0:
        return None
    return size, a


def search_largest_simplex(
    target: QPolytope, bound: int = DEFAULT_SIMPLEX_BOUND
) -> SimplexCertificate:
    """Search the largest unimodular simplex inside a polytope.

    For every unimodular matrix with bounded entries the best translation
    is found by a linear program, rationalized and sized exactly. The best
    candidate touches the boundary, so it is shrunk by STRICT_SHRINK towards
    the vertex centroid; the certified size approaches the reported supremum.

    Args:
        target: A full dimensional polytope of dimension at most 3.
        bound: Entry bound of the matrices enumerated.

    Returns:
        A certificate that verifies, carrying the supremum found.

    Raises:
        PreconditionError: For degenerate or too high dimensional targets.
        CertificateInvalidError: If the shrunken candidate fails to verify.
    """
    if not target.full_dimensional:
        msg = "degenerate polytope: the target must be full dimensional"
        raise PreconditionError(msg)
    n = target.ambient
    if n > MAX_SIMPLEX_DIM:
        msg = f"simplex search is limited to dimension {MAX_SIMPLEX_DIM}, got {n}"
        raise PreconditionError(msg)

    candidates: list[tuple[Fraction, IntMatrix, RatPoint]] = []
    axis = _axis_aligned_size(target)
    if axis is not None:
        identity_map = UnimodularAffineMap.identity(n)
        candidates.append((axis, identity_map.w, identity_map.a))
    matrices = _canonical_matrices(n, bound)
    for w in matrices:
        found = _lp_candidate(target, w)
        if found is not None:
            candidates.append((found[0], w, found[1]))
    if not candidates:
        msg = "no simplex fits the target"
        raise CertificateInvalidError(msg)

    best_size = max(c[0] for c in candidates)
    _, w, a = min(
        (c for c in candidates if c[0] == best_size),
        key=lambda c: (tuple(x for row in c[1] for x in row), c[2]),
    )
    logger.info("Simplex search: %d matrices, best size %s", len(matrices), best_size)

    center = target.centroid()
    shrunk = tuple(
        (1 - STRICT_SHRINK) * x + STRICT_SHRINK * c
        for x, c in zip(a, center, strict=True)
    )
    certificate = SimplexCertificate(
        transform=UnimodularAffineMap(w, shrunk),
        size=(1 - STRICT_SHRINK) * best_size,
        target=target,
        supremum=best_size,
        open_supremum=True,
    )
    verdict = verify_simplex_certificate(certificate)
    if not verdict:
        msg = f"shrunken simplex failed to verify: {verdict.reason}"
        raise CertificateInvalidError(msg)
    return certificate


def simplicial_nobody(n: int, d: int) -> QPolytope:
    """The simplex conv{0, e_1, ..., e_(n-1), d e_n}.

    Args:
        n: Dimension.
        d: Degree, positive.

    Returns:
        The polytope.
    """
    if n <= 0 or d <= 0:
        msg = f"dimension and degree must be positive, got n={n}, d={d}"
        raise PreconditionError(msg)
    origin = tuple(Fraction(0) for _ in range(n))
    return simplex([origin, *(_unit(n, k) for k in range(n - 1)), _unit(n, n - 1, d)])


def _unit(n: int, k: int, scale: Rational = 1) -> RatPoint:
    return tuple(Fraction(scale) if i == k else Fraction(0) for i in range(n))


def packing_piece(n: int, i: Rational, *, low: Rational | None = None) -> QPolytope:
    """The piece conv{e_1, ..., e_(n-1), low e_n, i e_n}, low = i - 1 by default."""
    bottom = Fraction(i) - 1 if low is None else Fraction(low)
    sides = (_unit(n, k) for k in range(n - 1))
    return simplex([*sides, _unit(n, n - 1, bottom), _unit(n, n - 1, i)])


def _piece_map(n: int, i: int) -> UnimodularAffineMap:
    """Unimodular map sending the i-th piece onto the standard simplex."""
    base = _unit(n, n - 1, i - 1)
    others = [*(_unit(n, k) for k in range(n - 1)), _unit(n, n - 1, i)]
    edges = transpose([subtract(v, base) for v in others])
    w = inverse(edges)
    return UnimodularAffineMap.from_rational(w, tuple(-x for x in mat_vec(w, base)))


@dataclass(frozen=True)
class PackingCertificate:
    """Pieces subdividing a simplex, each with its map to the standard simplex."""

    container: QPolytope
    pieces: tuple[QPolytope, ...]
    transforms: tuple[UnimodularAffineMap, ...]


@dataclass(frozen=True)
class PackingVerdict:
    """Outcome of a packing check with every failed condition."""

    failures: tuple[str, ...] = field(default_factory=tuple)

    @property
    def valid(self) -> bool:
        """Whether every condition held."""
        return not self.failures

    def __bool__(self) -> bool:
        """A verdict is truthy when the packing is valid."""
        return self.valid


def _separated(first: QPolytope, second: QPolytope) -> bool:
    """Whether some facet hyperplane of either piece separates them."""
    for piece, other in ((first, second), (second, first)):
        for h in piece.half_spaces:
            if all(h.slack(v) <= 0 for v in other.vertices):
                return True
    return False


def verify_packing_certificate(certificate: PackingCertificate) -> PackingVerdict:
    """Check a packing with exact arithmetic.

    The checks are: each map sends its piece onto the standard simplex, the
    pieces lie in the container, have pairwise disjoint interiors and unit
    volume summing to the container's, and contain no interior lattice point.

    Args:
        certificate: The packing.

    Returns:
        The verdict listing every failed check.
    """
    failures: list[str] = []
    n = certificate.container.ambient
    standard = set(standard_simplex_vertices(n))
    pairs = zip(certificate.pieces, certificate.transforms, strict=True)
    for index, (piece, transform) in enumerate(pairs):
        if {transform.apply(v) for v in piece.vertices} != standard:
            failures.append(f"piece {index} is not mapped onto the standard simplex")
        if normalized_volume(piece) != 1:
            failures.append(f"piece {index} does not have unit normalized volume")
        if not contains_polytope(certificate.container, piece):
            failures.append(f"piece {index} is not contained in the container")
        if piece.lattice_points(strict=True):
            failures.append(f"piece {index} has interior lattice points")
    for (i, first), (j, second) in combinations(enumerate(certificate.pieces), 2):
        if not _separated(first, second):
            failures.append(f"pieces {i} and {j} have overlapping interiors")
    total = sum((normalized_volume(p) for p in certificate.pieces), Fraction(0))
    if total != normalized_volume(certificate.container):
        failures.append("piece volumes do not add up to the container volume")
    return PackingVerdict(tuple(failures))


def packing_subdivision(n: int, d: int) -> PackingCertificate:
    """Subdivide conv{0, e_1, ..., e_(n-1), d e_n} into d unimodular simplices.

    Args:
        n: Dimension.
        d: Degree.

    Returns:
        A verified packing certificate.

    Raises:
        CertificateInvalidError: If verification fails.
    """
    container = simplicial_nobody(n, d)
    pieces = tuple(packing_piece(n, i) for i in range(1, d + 1))
    transforms = tuple(_piece_map(n, i) for i in range(1, d + 1))
    certificate = PackingCertificate(container, pieces, transforms)
    verdict = verify_packing_certificate(certificate)
    if not verdict:
        msg = f"packing failed to verify: {'; '.join(verdict.failures)}"
        raise CertificateInvalidError(msg)
    return certificate


@dataclass(frozen=True)
class SubSimplex:
    """A sub-simplex conv{0, e_1, ..., e_(n-1), d' e_n} and how it sits."""

    polytope: QPolytope
    container: QPolytope
    contained: bool
    apex_contact: tuple[HalfSpace, ...]


def sub_simplex_dprime(n: int, d: int, d_prime: Rational) -> SubSimplex:
    """Compare the simplex of height d' with the one of height d.

    Args:
        n: Dimension.
        d: Container height.
        d_prime: Height with 0 < d' <= d.

    Returns:
        Containment and the container facets avoiding the origin that the
        apex d' e_n touches.
    """
    height = Fraction(d_prime)
    if not 0 < height <= d:
        msg = f"d' must satisfy 0 < d' <= d, got d'={height}, d={d}"
        raise PreconditionError(msg)
    container = simplicial_nobody(n, d)
    origin = tuple(Fraction(0) for _ in range(n))
    apex = _unit(n, n - 1, height)
    inner = simplex([origin, *(_unit(n, k) for k in range(n - 1)), apex])
    contact = tuple(
        h for h in container.half_spaces if h.slack(apex) == 0 and h.slack(origin) != 0
    )
    return SubSimplex(inner, container, contains_polytope(container, inner), contact)


@dataclass(frozen=True)
class ShrunkenPacking:
    """Pieces of the simplex of height d'' with d - 1 < d'' < d."""

    container: QPolytope
    pieces: tuple[QPolytope, ...]
    contained: bool
    disjoint: bool

    @property
    def valid(self) -> bool:
        """Whether all pieces fit with disjoint interiors."""
        return self.contained and self.disjoint


def shrunken_packing(n: int, d: int, d_second: Rational) -> ShrunkenPacking:
    """Pack d - 1 unimodular pieces and one thinner piece into height d''.

    Args:
        n: Dimension.
        d: Degree.
        d_second: Height with d - 1 < d'' < d.

    Returns:
        The pieces and their containment and disjointness.
    """
    height = Fraction(d_second)
    if not d - 1 < height < d:
        msg = f"d'' must satisfy d - 1 < d'' < d, got d''={height}, d={d}"
        raise PreconditionError(msg)
    origin = tuple(Fraction(0) for _ in range(n))
    apex = _unit(n, n - 1, height)
    container = convex_hull([origin, *(_unit(n, k) for k in range(n - 1)), apex])
    pieces = (
        *(packing_piece(n, i) for i in range(1, d)),
        packing_piece(n, height, low=d - 1),
    )
    contained = all(contains_polytope(container, p) for p in pieces)
    disjoint = all(_separated(p, q) for p, q in combinations(pieces, 2))
    return ShrunkenPacking(container, pieces, contained, disjoint)

