"""End to end run from a variety description to certificates and a report.

Stages run in a fixed order with one seeded generator, so the report of a
configuration is byte-identical across runs. A failing stage raises
`PipelineStageError` with everything produced so far.
"""

import logging
from collections.abc import Iterator, Mapping
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from tordeg.src import codec
from tordeg.src.consts import (
    AREA_DRIFT_TOL,
    DEFAULT_GAMMA_BOUND,
    DEFAULT_SEED,
    DEFAULT_SIMPLEX_BOUND,
    DEFAULT_TOL,
    JACOBIAN_SAMPLES,
    MAX_SIMPLEX_DIM,
    MOMENT_SAMPLES,
    ORACLE_TRIALS,
    REAL_PART_TOL,
)
from tordeg.src.degen import (
    DegenerationFamily,
    ImmersionCertificate,
    build_family,
    immersion_certificate,
    jacobian_at_zero_fiber,
)
from tordeg.src.errors import (
    CertificateInvalidError,
    DependentAtOrderError,
    PipelineStageError,
    PreconditionError,
    TordegError,
    TruncationError,
)
from tordeg.src.flow import (
    FlowState,
    fiber_normalized_area,
    integrate_flow,
    moment_coverage,
    moment_inside,
    sample_moment_map,
    transport_area_check,
)
from tordeg.src.gromov import (
    PackingCertificate,
    SimplexCertificate,
    packing_subdivision,
    search_largest_simplex,
    simplicial_nobody,
    verify_packing_certificate,
    verify_simplex_certificate,
)
from tordeg.src.linsys import (
    GammaCertificate,
    ValuedBasis,
    certify_gamma,
    check_lattice_condition,
    power_value_set,
    triangularize,
)
from tordeg.src.oracle import bk_oracle_curve
from tordeg.src.plots import (
    plot_moment_samples,
    plot_trajectories,
    write_trajectory_csv,
)
from tordeg.src.polytope import (
    QPolytope,
    convex_hull,
    delta_k,
    normalized_volume,
    volume_gap,
)
from tordeg.src.utils import (
    get_default_output_dir,
    read_json,
    resolve_input_path,
    write_json,
)
from tordeg.src.variety import SeriesBundle, VarietySpec, cmd_expand

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlowSettings:
    """Settings of the optional flow stage."""

    enabled: bool = False
    trajectories: int = 4
    duration: float = 0.75
    start_t: float = 1.0
    tol: float = DEFAULT_TOL
    moment_samples: int = MOMENT_SAMPLES
    area_checks: bool = True

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "FlowSettings":
        """Build settings from json, unknown keys are rejected."""
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            msg = f"unknown flow settings {sorted(unknown)}"
            raise PreconditionError(msg)
        return cls(**data)


@dataclass(frozen=True)
class PipelineConfig:
    """Configuration of a pipeline run.

    Attributes:
        variety: The variety description.
        k_values: Powers of the linear system whose bodies are computed.
        trunc: Truncation order, the variety default when None.
        gamma_bound: Largest weight norm tried.
        simplex_bound: Entry bound of the simplex search.
        oracle_trials: Random systems of the root count oracle.
        jacobian_samples: Torus points of the Jacobian certificate.
        seed: Seed of the single random generator.
        output_dir: Where files are written, the user data dir when None.
        flow: Flow stage settings.
    """

    variety: VarietySpec
    k_values: tuple[int, ...] = (1,)
    trunc: int | None = None
    gamma_bound: int = DEFAULT_GAMMA_BOUND
    simplex_bound: int = DEFAULT_SIMPLEX_BOUND
    oracle_trials: int = ORACLE_TRIALS
    jacobian_samples: int = JACOBIAN_SAMPLES
    seed: int = DEFAULT_SEED
    output_dir: Path | None = None
    flow: FlowSettings = field(default_factory=FlowSettings)

    def __post_init__(self) -> None:
        """Validate the powers."""
        if not self.k_values or any(k < 1 for k in self.k_values):
            msg = f"k values must be positive, got {self.k_values}"
            raise PreconditionError(msg)

    @classmethod
    def from_dict(
        cls, data: Mapping[str, Any], base: Path | None = None
    ) -> "PipelineConfig":
        """Build a config from json.

        Args:
            data: The json document.
            base: Directory relative file references are resolved against.

        Returns:
            The config.
        """
        variety_ref = data.get("variety")
        if variety_ref is None:
            msg = "config needs a variety"
            raise PreconditionError(msg)
        if isinstance(variety_ref, str):
            path = resolve_input_path(variety_ref, base)
            if not path.is_file():
                msg = f"variety file {path} does not exist"
                raise PreconditionError(msg)
            variety = VarietySpec.from_json(path)
        else:
            variety = VarietySpec.from_dict(variety_ref)
        output = data.get("output_dir")
        return cls(
            variety=variety,
            k_values=tuple(int(k) for k in data.get("k_values", (1,))),
            trunc=data.get("trunc"),
            gamma_bound=int(data.get("gamma_bound", DEFAULT_GAMMA_BOUND)),
            simplex_bound=int(data.get("simplex_bound", DEFAULT_SIMPLEX_BOUND)),
            oracle_trials=int(data.get("oracle_trials", ORACLE_TRIALS)),
            jacobian_samples=int(data.get("jacobian_samples", JACOBIAN_SAMPLES)),
            seed=int(data.get("seed", DEFAULT_SEED)),
            output_dir=None if output is None else resolve_input_path(output, base),
            flow=FlowSettings.from_dict(data.get("flow", {})),
        )

    @classmethod
    def from_json(cls, path: Path) -> "PipelineConfig":
        """Read a config, resolving references relative to its directory."""
        return cls.from_dict(read_json(path), path.parent)

    @property
    def resolved_output_dir(self) -> Path:
        """Output directory of the run."""
        if self.output_dir is not None:
            return self.output_dir
        return get_default_output_dir(self.variety.name)


@dataclass
class PipelineReport:
    """The report document and the files written."""

    document: dict[str, Any]
    output_dir: Path
    files: list[Path] = field(default_factory=list)


@contextmanager
def _stage(name: str, artifacts: dict[str, Any]) -> Iterator[None]:
    logger.info("Stage %s", name)
    try:
        yield
    except TordegError as err:
        if isinstance(err, PipelineStageError):
            raise
        raise PipelineStageError(name, err, dict(artifacts)) from err


def _expand_and_reduce(
    spec: VarietySpec, trunc: int | None
) -> tuple[SeriesBundle, ValuedBasis]:
    """Expand and triangularize, retrying once at twice the order."""
    bundle = cmd_expand(spec, trunc)
    try:
        return bundle, triangularize(bundle.series, bundle.labels)
    except DependentAtOrderError as err:
        logger.warning("%s, retrying at order %d", err, 2 * bundle.trunc)
        bundle = cmd_expand(spec, 2 * bundle.trunc)
        return bundle, triangularize(bundle.series, bundle.labels)


def _simplicial_degree(polytope: QPolytope) -> int | None:
    """d when the polytope is conv{0, e_1, ..., e_(n-1), d e_n}, else None."""
    if not polytope.full_dimensional:
        return None
    top = max(v[-1] for v in polytope.vertices)
    if top.denominator != 1 or top < 1:
        return None
    candidate = simplicial_nobody(polytope.ambient, int(top))
    return int(top) if candidate.vertices == polytope.vertices else None


def _values_json(values: frozenset[tuple[int, ...]]) -> list[list[int]]:
    return [list(v) for v in sorted(values)]


def _bodies(
    config: PipelineConfig, basis: ValuedBasis
) -> tuple[list[dict[str, Any]], dict[int, QPolytope]]:
    """Bodies for every k, re-expanding once at twice the order if needed."""
    records: list[dict[str, Any]] = []
    bodies: dict[int, QPolytope] = {}
    for k in sorted(set(config.k_values)):
        try:
            values = power_value_set(basis, k)
        except TruncationError as err:
            order = 2 * basis.trunc_order
            logger.warning("%s, retrying k=%d at order %d", err, k, order)
            _, wider = _expand_and_reduce(config.variety, order)
            values = power_value_set(wider, k)
        body = delta_k(values, k)
        bodies[k] = body
        volume = normalized_volume(body) if body.full_dimensional else None
        records.append(
            {
                "k": k,
                "values": _values_json(values),
                "polytope": codec.polytope_to_json(body),
                "normalized_volume": (
                    None if volume is None else codec.rational_to_json(volume)
                ),
            }
        )
    return records, bodies


def _flow_stage(
    config: PipelineConfig,
    family: DegenerationFamily,
    rng: np.random.Generator,
    output: Path,
) -> tuple[dict[str, Any], list[Path]]:
    settings = config.flow
    files: list[Path] = []
    lines: list[dict[str, Any]] = []
    trajectories = []
    n = family.n
    m = n + 1
    for index in range(settings.trajectories):
        moduli = np.exp(rng.normal(0.0, 0.2, size=n))
        phases = rng.uniform(0.0, 2 * np.pi, size=n)
        coordinates = tuple(complex(z) for z in moduli * np.exp(1j * phases))
        start = FlowState(coordinates, complex(settings.start_t))
        trajectory = integrate_flow(family, start, settings.duration, settings.tol)
        trajectories.append(trajectory)
        final = trajectory.final
        record: dict[str, Any] = {
            "start": [[z.real, z.imag] for z in start.coordinates],
            "final": [[z.real, z.imag] for z in final.coordinates],
            "steps": len(trajectory.times) - 1,
            "re_t_error": abs(final.t.real - (settings.start_t - settings.duration)),
            "max_abs_im_t": max(abs(float(s[2 * m - 1])) for s in trajectory.states),
        }
        record["t_on_target"] = (
            record["re_t_error"] <= REAL_PART_TOL
            and record["max_abs_im_t"] <= REAL_PART_TOL
        )
        if settings.area_checks:
            first = np.zeros(2 * m)
            second = np.zeros(2 * m)
            first[0] = 1e-3
            second[m] = 1e-3
            check = transport_area_check(
                family, start, (first, second), settings.duration, settings.tol
            )
            record["area"] = {
                "before": check.before,
                "after": check.after,
                "relative_drift": check.relative_drift,
                "preserved": check.relative_drift <= AREA_DRIFT_TOL,
            }
        lines.append(record)
        csv_path = output / "trajectories" / f"line_{index + 1}.csv"
        files.append(write_trajectory_csv(csv_path, trajectory))
    if trajectories:
        files.append(plot_trajectories(output / "trajectories.svg", trajectories))

    moment_polytope = convex_hull(family.betas)
    samples = sample_moment_map(
        family.betas, family.leads, settings.moment_samples, rng
    )
    document: dict[str, Any] = {
        "lines": lines,
        "moment": {
            "samples": settings.moment_samples,
            "inside": moment_inside(samples, moment_polytope),
            "coverage": (
                moment_coverage(samples, moment_polytope)
                if moment_polytope.full_dimensional
                else None
            ),
        },
    }
    if n <= 2:  # noqa: PLR2004
        files.append(
            plot_moment_samples(output / "moment.svg", samples, moment_polytope)
        )
    if n == 1:
        length = moment_polytope.vertices[-1][0] - moment_polytope.vertices[0][0]
        area = fiber_normalized_area(family)
        document["zero_fiber"] = {"area_over_pi": area, "hull_length": float(length)}
    return document, files


def _summary(document: Mapping[str, Any]) -> str:
    lines = [f"variety: {document['variety']}", f"trunc: {document['trunc']}"]
    lines.append(f"values A: {document['basis']['values']}")
    lines.append(f"gamma: {document['gamma']['gamma']}")
    lines.append(f"lattice condition: {document['lattice_condition']}")
    lines.append(f"zero fiber immersion: {document['immersion']['holds']}")
    for body in document["bodies"]:
        volume = body["normalized_volume"]
        shown = (
            "degenerate"
            if volume is None
            else str(Fraction(int(volume[0]), int(volume[1])))
        )
        lines.append(
            f"k={body['k']}: |A_k|={len(body['values'])}, normalized volume {shown}"
        )
    if document.get("simplicial_degree") is not None:
        lines.append(f"simplicial body of degree {document['simplicial_degree']}")
    if document.get("oracle") is not None:
        oracle = document["oracle"]
        lines.append(
            f"root count oracle: {oracle['count']} (agrees: {oracle['agrees']})"
        )
    if document.get("gromov") is not None:
        gromov = document["gromov"]
        lines.append(
            f"Gromov width lower bound: sup {gromov['supremum']} "
            f"(certified {gromov['size']})"
        )
    if document.get("packing") is not None:
        lines.append(f"packing by {document['packing']['pieces']} unimodular simplices")
    return "\n".join(lines) + "\n"


def run_pipeline(config: PipelineConfig) -> PipelineReport:  # noqa: PLR0915
    """Run every stage and write report, summary and certificates.

    Args:
        config: The run configuration.

    Returns:
        The report and the files written.

    Raises:
        PipelineStageError: If a stage fails.
    """
    spec = config.variety
    output = config.resolved_output_dir
    rng = np.random.default_rng(config.seed)
    artifacts: dict[str, Any] = {}
    document: dict[str, Any] = {"variety": spec.name, "seed": config.seed}
    report = PipelineReport(document, output)
    certificates = output / "certificates"
    report.files.append(write_json(output / "variety.json", spec.to_dict()))

    with _stage("expand", artifacts):
        bundle, basis = _expand_and_reduce(spec, config.trunc)
        artifacts["bundle"] = bundle
        artifacts["basis"] = basis
        document["trunc"] = bundle.trunc
        document["basis"] = {
            "labels": [s.label for s in basis.sections],
            "values": [list(s.beta) for s in basis.sections],
        }
        report.files.append(
            write_json(output / "series.json", codec.bundle_to_json(bundle))
        )
        report.files.append(
            write_json(output / "basis.json", codec.basis_to_json(basis))
        )

    with _stage("lattice", artifacts):
        document["lattice_condition"] = check_lattice_condition(basis)

    with _stage("gamma", artifacts):
        gamma_certificate = certify_gamma(basis, config.gamma_bound)
        artifacts["gamma"] = gamma_certificate
        document["gamma"] = {
            "gamma": list(gamma_certificate.gamma),
            "verified_on_trunc": gamma_certificate.verified_on_trunc,
            "assumes_full_support": gamma_certificate.assumes_full_support,
        }
        report.files.append(
            write_json(
                certificates / "gamma.json", codec.gamma_to_json(gamma_certificate)
            )
        )

    with _stage("family", artifacts):
        family = build_family(basis, gamma_certificate.gamma)
        artifacts["family"] = family
        document["special_fiber"] = [
            {"coefficient": codec.rational_to_json(c), "exponent": list(b)}
            for c, b in family.special_fiber
        ]

    with _stage("jacobian", artifacts):
        immersion = immersion_certificate(family, rng, config.jacobian_samples)
        document["immersion"] = {
            "chart": immersion.chart,
            "samples": len(immersion.samples),
            "holds": immersion.holds,
        }
        report.files.append(
            write_json(
                certificates / "immersion.json",
                codec.immersion_to_json(immersion, family),
            )
        )
        if not immersion.holds:
            failed = sum(1 for s in immersion.samples if not s.full_rank)
            msg = (
                f"special fiber is not immersed: {failed} of"
                f" {len(immersion.samples)} Jacobian samples lose rank"
            )
            raise CertificateInvalidError(msg)

    with _stage("bodies", artifacts):
        records, bodies = _bodies(config, basis)
        document["bodies"] = records
        largest = bodies[max(bodies)]
        degree = _simplicial_degree(largest)
        document["simplicial_degree"] = degree
        if degree is not None:
            simplicial = simplicial_nobody(spec.n, degree)
            for record, body in zip(records, bodies.values(), strict=True):
                gap = volume_gap(simplicial, body) if body.full_dimensional else None
                record["volume_gap"] = (
                    None if gap is None else codec.rational_to_json(gap)
                )

    document["oracle"] = None
    if spec.n == 1 and 1 in bodies and bodies[1].full_dimensional:
        with _stage("oracle", artifacts):
            ordered = sorted(zip(family.betas, family.leads, strict=True))
            count = bk_oracle_curve(
                [b for b, _ in ordered],
                rng,
                config.oracle_trials,
                coefficients=[c for _, c in ordered],
            )
            volume = normalized_volume(bodies[1])
            document["oracle"] = {"count": count, "agrees": Fraction(count) == volume}

    document["gromov"] = None
    if largest.full_dimensional and spec.n <= MAX_SIMPLEX_DIM:
        with _stage("gromov", artifacts):
            simplex_certificate = search_largest_simplex(
                largest, config.simplex_bound
            )
            supremum = simplex_certificate.supremum
            document["gromov"] = {
                "size": str(simplex_certificate.size),
                "supremum": None if supremum is None else str(supremum),
                "open_supremum": simplex_certificate.open_supremum,
            }
            report.files.append(
                write_json(
                    certificates / "simplex.json",
                    codec.simplex_to_json(simplex_certificate),
                )
            )

    document["packing"] = None
    if degree is not None:
        with _stage("packing", artifacts):
            packing = packing_subdivision(spec.n, degree)
            document["packing"] = {"pieces": len(packing.pieces)}
            report.files.append(
                write_json(
                    certificates / "packing.json", codec.packing_to_json(packing)
                )
            )

    document["flow"] = None
    if config.flow.enabled:
        with _stage("flow", artifacts):
            flow_document, flow_files = _flow_stage(config, family, rng, output)
            document["flow"] = flow_document
            report.files.extend(flow_files)

    report.files.append(write_json(output / "report.json", document))
    summary = output / "summary.txt"
    summary.write_text(_summary(document), encoding="utf-8")
    report.files.append(summary)
    logger.info(
        "Pipeline for %s finished, %d files written to %s",
        spec.name,
        len(report.files),
        output,
    )
    return report


def load_config(reference: str) -> PipelineConfig:
    """Load a config from a path or a ``fixture:`` reference."""
    path = resolve_input_path(reference)
    if not path.is_file():
        msg = f"config file {path} does not exist"
        raise PreconditionError(msg)
    return PipelineConfig.from_json(path)


def verify_certificate(data: Mapping[str, Any]) -> str:
    """Re-check a certificate document without any pipeline state.

    Args:
        data: A decoded certificate file.

    Returns:
        The certificate kind.

    Raises:
        CertificateInvalidError: If the exact check fails.
    """
    decoded = codec.decode_certificate(dict(data))
    kind = str(data["kind"])
    reasons: list[str] = []
    match decoded:
        case SimplexCertificate():
            verdict = verify_simplex_certificate(decoded)
            if not verdict:
                reasons.append(verdict.reason)
        case PackingCertificate():
            reasons.extend(verify_packing_certificate(decoded).failures)
        case GammaCertificate():
            if not decoded.verify():
                reasons.append(
                    f"gamma {decoded.gamma} is not strictly minimal "
                    "on the recorded supports"
                )
        case (ImmersionCertificate() as immersion, DegenerationFamily() as family):
            for sample in immersion.samples:
                recomputed = jacobian_at_zero_fiber(
                    family, sample.point, immersion.chart
                )
                if (
                    recomputed.matrix != sample.matrix
                    or recomputed.rank != sample.rank
                ):
                    shown = [str(x) for x in sample.point]
                    reasons.append(f"Jacobian at {shown} does not match")
            if not immersion.holds:
                reasons.append("Jacobian is rank deficient at a sample")
    if reasons:
        msg = f"{kind} certificate is invalid: {'; '.join(reasons)}"
        raise CertificateInvalidError(msg)
    logger.info("%s certificate verified", kind)
    return kind
