"""Json encoding of exact results and certificates.

Rationals are written as ``[numerator, denominator]`` pairs of decimal
strings so nothing is lost to floating point. Every certificate carries a
``kind`` and a ``version`` so `decode_certificate` can dispatch on it.
"""

from collections.abc import Sequence
from fractions import Fraction
from typing import Any

from tordeg.src.consts import CERTIFICATE_VERSION
from tordeg.src.degen import (
    DegenerationFamily,
    ImmersionCertificate,
    JacobianCertificate,
)
from tordeg.src.errors import PreconditionError
from tordeg.src.exact import RatPoint, UnimodularAffineMap
from tordeg.src.gromov import PackingCertificate, SimplexCertificate
from tordeg.src.linsys import GammaCertificate, ValuedBasis
from tordeg.src.polytope import QPolytope, convex_hull
from tordeg.src.series import Exponent, TruncSeries
from tordeg.src.variety import SeriesBundle

type Json = dict[str, Any]
type Certificate = (
    SimplexCertificate | PackingCertificate | GammaCertificate | ImmersionCertificate
)


def rational_to_json(value: Fraction | int) -> list[str]:
    """Encode a rational as [numerator, denominator]."""
    value = Fraction(value)
    return [str(value.numerator), str(value.denominator)]


def rational_from_json(data: Sequence[str | int] | str | int) -> Fraction:
    """Decode a rational from a pair or a single number string."""
    if isinstance(data, str | int):
        return Fraction(data)
    numerator, denominator = data
    return Fraction(int(numerator), int(denominator))


def point_to_json(point: Sequence[Fraction]) -> list[list[str]]:
    """Encode a rational point."""
    return [rational_to_json(x) for x in point]


def point_from_json(data: Sequence[Any]) -> RatPoint:
    """Decode a rational point."""
    return tuple(rational_from_json(x) for x in data)


def polytope_to_json(polytope: QPolytope) -> Json:
    """Encode a polytope by its vertices."""
    return {
        "vertices": [point_to_json(v) for v in polytope.vertices],
        "dim": polytope.dim,
        "ambient": polytope.ambient,
    }


def polytope_from_json(data: Json) -> QPolytope:
    """Decode a polytope, recomputing its facets."""
    polytope = convex_hull(point_from_json(v) for v in data["vertices"])
    if "dim" in data and polytope.dim != data["dim"]:
        msg = (
            f"polytope dimension {polytope.dim} does not match"
            f" the recorded {data['dim']}"
        )
        raise PreconditionError(msg)
    return polytope


def series_to_json(series: TruncSeries) -> Json:
    """Encode a series."""
    return {
        "arity": series.arity,
        "trunc": series.trunc_order,
        "terms": [[list(e), rational_to_json(c)] for e, c in series],
    }


def series_from_json(data: Json) -> TruncSeries:
    """Decode a series."""
    return TruncSeries(
        int(data["arity"]),
        int(data["trunc"]),
        {tuple(int(x) for x in e): rational_from_json(c) for e, c in data["terms"]},
    )


def bundle_to_json(bundle: SeriesBundle) -> Json:
    """Encode the expansions of a variety."""
    return {
        "kind": "series",
        "name": bundle.name,
        "local": list(bundle.local),
        "trunc": bundle.trunc,
        "sections": [
            {"label": label, "series": series_to_json(s)}
            for label, s in zip(bundle.labels, bundle.series, strict=True)
        ],
        "coordinates": [
            {"name": name, "series": series_to_json(s)}
            for name, s in bundle.coordinates
        ],
    }


def basis_to_json(basis: ValuedBasis) -> Json:
    """Encode a valued basis."""
    return {
        "kind": "basis",
        "sections": [
            {
                "label": s.label,
                "beta": list(s.beta),
                "lead": rational_to_json(s.lead),
                "series": series_to_json(s.series),
            }
            for s in basis.sections
        ],
    }


def _version(kind: str) -> Json:
    return {"kind": kind, "version": CERTIFICATE_VERSION}


def _exponents(data: Sequence[Sequence[int]]) -> tuple[Exponent, ...]:
    return tuple(tuple(int(x) for x in e) for e in data)


def gamma_to_json(certificate: GammaCertificate) -> Json:
    """Encode a weight certificate with the supports it was checked on."""
    return _version("gamma") | {
        "gamma": list(certificate.gamma),
        "verified_on_trunc": certificate.verified_on_trunc,
        "assumes_full_support": certificate.assumes_full_support,
        "supports": [
            {"beta": list(beta), "support": [list(e) for e in support]}
            for support, beta in certificate.supports
        ],
    }


def gamma_from_json(data: Json) -> GammaCertificate:
    """Decode a weight certificate."""
    return GammaCertificate(
        gamma=tuple(int(g) for g in data["gamma"]),
        verified_on_trunc=int(data["verified_on_trunc"]),
        supports=tuple(
            (_exponents(s["support"]), tuple(int(x) for x in s["beta"]))
            for s in data.get("supports", [])
        ),
        assumes_full_support=bool(data.get("assumes_full_support", True)),
    )


def family_to_json(family: DegenerationFamily) -> Json:
    """Encode a degeneration family."""
    return {
        "kind": "family",
        "gamma": list(family.gamma),
        "sections": [
            {
                "label": label,
                "beta": list(beta),
                "lead": rational_to_json(lead),
                "series": series_to_json(series),
                "tilde": series_to_json(tilde),
            }
            for label, beta, lead, series, tilde in zip(
                family.labels,
                family.betas,
                family.leads,
                family.sections,
                family.tilde,
                strict=True,
            )
        ],
    }


def family_from_json(data: Json) -> DegenerationFamily:
    """Decode a degeneration family."""
    sections = data["sections"]
    return DegenerationFamily(
        gamma=tuple(int(g) for g in data["gamma"]),
        labels=tuple(s["label"] for s in sections),
        sections=tuple(series_from_json(s["series"]) for s in sections),
        tilde=tuple(series_from_json(s["tilde"]) for s in sections),
        betas=tuple(tuple(int(x) for x in s["beta"]) for s in sections),
        leads=tuple(rational_from_json(s["lead"]) for s in sections),
    )


def immersion_to_json(
    certificate: ImmersionCertificate, family: DegenerationFamily
) -> Json:
    """Encode a zero fiber Jacobian certificate together with its family."""
    return _version("immersion") | {
        "gamma": list(certificate.gamma),
        "chart": certificate.chart,
        "holds": certificate.holds,
        "samples": [
            {
                "point": point_to_json(s.point),
                "rank": s.rank,
                "matrix": [point_to_json(row) for row in s.matrix],
            }
            for s in certificate.samples
        ],
        "family": family_to_json(family),
    }


def immersion_from_json(data: Json) -> tuple[ImmersionCertificate, DegenerationFamily]:
    """Decode a zero fiber Jacobian certificate and its family."""
    samples = tuple(
        JacobianCertificate(
            chart=int(data["chart"]),
            point=point_from_json(s["point"]),
            matrix=tuple(point_from_json(row) for row in s["matrix"]),
            rank=int(s["rank"]),
        )
        for s in data["samples"]
    )
    gamma = tuple(int(g) for g in data["gamma"])
    certificate = ImmersionCertificate(gamma, int(data["chart"]), samples)
    return certificate, family_from_json(data["family"])


def transform_to_json(transform: UnimodularAffineMap) -> Json:
    """Encode a unimodular affine map."""
    return {"w": [list(row) for row in transform.w], "a": point_to_json(transform.a)}


def transform_from_json(data: Json) -> UnimodularAffineMap:
    """Decode a unimodular affine map."""
    return UnimodularAffineMap(
        tuple(tuple(int(x) for x in row) for row in data["w"]),
        point_from_json(data["a"]),
    )


def simplex_to_json(certificate: SimplexCertificate) -> Json:
    """Encode a simplex certificate."""
    return _version("simplex") | {
        "transform": transform_to_json(certificate.transform),
        "size": rational_to_json(certificate.size),
        "supremum": (
            None
            if certificate.supremum is None
            else rational_to_json(certificate.supremum)
        ),
        "open_supremum": certificate.open_supremum,
        "target": polytope_to_json(certificate.target),
    }


def simplex_from_json(data: Json) -> SimplexCertificate:
    """Decode a simplex certificate."""
    supremum = data.get("supremum")
    return SimplexCertificate(
        transform=transform_from_json(data["transform"]),
        size=rational_from_json(data["size"]),
        target=polytope_from_json(data["target"]),
        supremum=None if supremum is None else rational_from_json(supremum),
        open_supremum=bool(data.get("open_supremum", False)),
    )


def packing_to_json(certificate: PackingCertificate) -> Json:
    """Encode a packing certificate."""
    return _version("packing") | {
        "container": polytope_to_json(certificate.container),
        "pieces": [
            {
                "polytope": polytope_to_json(piece),
                "transform": transform_to_json(transform),
            }
            for piece, transform in zip(
                certificate.pieces, certificate.transforms, strict=True
            )
        ],
    }


def packing_from_json(data: Json) -> PackingCertificate:
    """Decode a packing certificate."""
    return PackingCertificate(
        container=polytope_from_json(data["container"]),
        pieces=tuple(polytope_from_json(p["polytope"]) for p in data["pieces"]),
        transforms=tuple(transform_from_json(p["transform"]) for p in data["pieces"]),
    )


def decode_certificate(
    data: Json,
) -> Certificate | tuple[ImmersionCertificate, DegenerationFamily]:
    """Decode any certificate by its kind.

    Args:
        data: A certificate document.

    Returns:
        The decoded certificate; immersion certificates come with their family.

    Raises:
        PreconditionError: For unknown kinds or versions.
    """
    kind = data.get("kind")
    if data.get("version") != CERTIFICATE_VERSION:
        msg = f"unsupported certificate version {data.get('version')!r}"
        raise PreconditionError(msg)
    match kind:
        case "simplex":
            return simplex_from_json(data)
        case "packing":
            return packing_from_json(data)
        case "gamma":
            return gamma_from_json(data)
        case "immersion":
            return immersion_from_json(data)
        case _:
            msg = f"unknown certificate kind {kind!r}"
            raise PreconditionError(msg)
