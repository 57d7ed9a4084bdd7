"""Command line subcommands.

All public functions in this module are added to the ``tordeg`` command by
pyrig. Inputs are variety files, either a path or ``fixture:<name>`` for a
bundled fixture. Results go to ``--out`` as json, or to stdout without it.
Domain errors end the process with the exit code of their family.
"""

import json
import logging
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import replace
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Any

import numpy as np
import typer

from tordeg.src import codec
from tordeg.src.consts import (
    AREA_DRIFT_TOL,
    DEFAULT_GAMMA_BOUND,
    DEFAULT_SEED,
    DEFAULT_SIMPLEX_BOUND,
    DEFAULT_TOL,
    JACOBIAN_SAMPLES,
    MOMENT_SAMPLES,
    ORACLE_TRIALS,
)
from tordeg.src.degen import DegenerationFamily, build_family, immersion_certificate
from tordeg.src.errors import (
    CertificateInvalidError,
    PreconditionError,
    TordegError,
    exit_code_for,
)
from tordeg.src.flow import (
    FlowState,
    integrate_flow,
    moment_coverage,
    moment_inside,
    sample_moment_map,
    transport_area_check,
)
from tordeg.src.gromov import (
    packing_subdivision,
    search_largest_simplex,
    shrunken_packing,
)
from tordeg.src.linsys import (
    ValuedBasis,
    certify_gamma,
    power_value_set,
    triangularize,
    valued_sections,
)
from tordeg.src.oracle import bk_oracle_curve
from tordeg.src.pipeline import load_config, run_pipeline, verify_certificate
from tordeg.src.plots import (
    plot_moment_samples,
    plot_trajectories,
    write_trajectory_csv,
)
from tordeg.src.polytope import convex_hull, delta_k, normalized_volume
from tordeg.src.utils import read_json, resolve_input_path, write_json
from tordeg.src.variety import SeriesBundle, VarietySpec, cmd_expand

logger = logging.getLogger(__name__)

VarietyArg = Annotated[str, typer.Argument(help="Variety file, or fixture:<name>.")]
TruncOpt = Annotated[int | None, typer.Option("--trunc", help="Truncation order.")]
BoundOpt = Annotated[int, typer.Option("--bound", help="Largest weight norm tried.")]
SeedOpt = Annotated[int, typer.Option("--seed", help="Seed of all randomness.")]
OutOpt = Annotated[Path | None, typer.Option("--out", help="Output file or directory.")]
OutDirOpt = Annotated[Path, typer.Option("--out", help="Output directory.")]


@contextmanager
def _exit_on_error() -> Iterator[None]:
    try:
        yield
    except TordegError as err:
        typer.echo(f"error: {err}", err=True)
        raise typer.Exit(code=exit_code_for(err)) from err


def _load_variety(reference: str) -> VarietySpec:
    return VarietySpec.from_json(resolve_input_path(reference))


def _emit(document: Any, out: Path | None) -> None:  # noqa: ANN401
    if out is None:
        typer.echo(json.dumps(document, indent=2))
    else:
        write_json(out, document)


def _basis(variety: str, trunc: int | None) -> tuple[SeriesBundle, ValuedBasis]:
    bundle = cmd_expand(_load_variety(variety), trunc)
    return bundle, triangularize(bundle.series, bundle.labels)


def _family(variety: str, trunc: int | None, bound: int) -> DegenerationFamily:
    _, basis = _basis(variety, trunc)
    return build_family(basis, certify_gamma(basis, bound).gamma)


def expand(variety: VarietyArg, trunc: TruncOpt = None, out: OutOpt = None) -> None:
    """Expand the sections of a variety as power series at its point."""
    with _exit_on_error():
        bundle = cmd_expand(_load_variety(variety), trunc)
        for label, series in zip(bundle.labels, bundle.series, strict=True):
            typer.echo(f"{label} = {series.format(bundle.local)}")
        if out is not None:
            write_json(out, codec.bundle_to_json(bundle))


def valuate(variety: VarietyArg, trunc: TruncOpt = None, out: OutOpt = None) -> None:
    """Print the lex valuation of every section as given."""
    with _exit_on_error():
        bundle = cmd_expand(_load_variety(variety), trunc)
        sections = valued_sections(bundle.series, bundle.labels)
        _emit(
            {
                s.label: {"value": list(s.beta), "lead": codec.rational_to_json(s.lead)}
                for s in sections
            },
            out,
        )


def basis_reduce(
    variety: VarietyArg, trunc: TruncOpt = None, out: OutOpt = None
) -> None:
    """Triangularize the sections into a basis with distinct valuations."""
    with _exit_on_error():
        _, basis = _basis(variety, trunc)
        for section in basis.sections:
            typer.echo(f"{section.label}: v = {list(section.beta)}")
        if out is not None:
            write_json(out, codec.basis_to_json(basis))


def gamma(
    variety: VarietyArg,
    trunc: TruncOpt = None,
    bound: BoundOpt = DEFAULT_GAMMA_BOUND,
    out: OutOpt = None,
) -> None:
    """Find and certify a separating weight for the reduced basis."""
    with _exit_on_error():
        _, basis = _basis(variety, trunc)
        _emit(codec.gamma_to_json(certify_gamma(basis, bound)), out)


def degenerate(
    variety: VarietyArg,
    trunc: TruncOpt = None,
    bound: BoundOpt = DEFAULT_GAMMA_BOUND,
    out: OutOpt = None,
) -> None:
    """Build the degeneration family and print its special fiber."""
    with _exit_on_error():
        family = _family(variety, trunc, bound)
        names = [f"u{i + 1}" for i in range(family.n)]
        for coefficient, exponent in family.special_fiber:
            monomial = " ".join(
                name if e == 1 else f"{name}^{e}"
                for name, e in zip(names, exponent, strict=True)
                if e
            )
            typer.echo(f"{coefficient} {monomial}".strip())
        if out is not None:
            write_json(out, codec.family_to_json(family))


def jacobian_check(  # noqa: PLR0913
    variety: VarietyArg,
    trunc: TruncOpt = None,
    bound: BoundOpt = DEFAULT_GAMMA_BOUND,
    samples: Annotated[
        int, typer.Option("--samples", help="Torus sample points.")
    ] = JACOBIAN_SAMPLES,
    seed: SeedOpt = DEFAULT_SEED,
    out: OutOpt = None,
) -> None:
    """Certify that the family is an immersion along the zero fiber."""
    with _exit_on_error():
        family = _family(variety, trunc, bound)
        rng = np.random.default_rng(seed)
        certificate = immersion_certificate(family, rng, samples)
        _emit(codec.immersion_to_json(certificate, family), out)
        if not certificate.holds:
            msg = "the zero fiber Jacobian is rank deficient"
            raise CertificateInvalidError(msg)


def nobody(
    variety: VarietyArg,
    k: Annotated[
        list[int] | None, typer.Option("--k", help="Powers of the linear system.")
    ] = None,
    trunc: TruncOpt = None,
    out: OutOpt = None,
) -> None:
    """Compute the approximants (1/k) conv(A_k) of the Newton-Okounkov body."""
    with _exit_on_error():
        _, basis = _basis(variety, trunc)
        bodies = []
        for power in sorted(set(k or [1])):
            body = delta_k(power_value_set(basis, power), power)
            volume = normalized_volume(body) if body.full_dimensional else None
            bodies.append(
                {
                    "k": power,
                    "polytope": codec.polytope_to_json(body),
                    "normalized_volume": (
                        None if volume is None else codec.rational_to_json(volume)
                    ),
                }
            )
        _emit(bodies, out)


def bk_check(
    values: Annotated[list[int], typer.Argument(help="One dimensional value set.")],
    trials: Annotated[
        int, typer.Option("--trials", help="Random systems.")
    ] = ORACLE_TRIALS,
    seed: SeedOpt = DEFAULT_SEED,
) -> None:
    """Compare the root count oracle with the normalized volume of conv(A)."""
    with _exit_on_error():
        count = bk_oracle_curve(values, np.random.default_rng(seed), trials)
        volume = normalized_volume(convex_hull([(v,) for v in values]))
        typer.echo(f"roots {count}, normalized volume {volume}")
        if Fraction(count) != volume:
            msg = f"root count {count} differs from the normalized volume {volume}"
            raise CertificateInvalidError(msg)


def flow(  # noqa: PLR0913
    variety: VarietyArg,
    out: OutDirOpt,
    trunc: TruncOpt = None,
    bound: BoundOpt = DEFAULT_GAMMA_BOUND,
    trajectories: Annotated[
        int, typer.Option("--trajectories", help="Number of flow lines.")
    ] = 4,
    duration: Annotated[
        float, typer.Option("--duration", help="Flow time, negative runs backwards.")
    ] = 0.75,
    start_t: Annotated[
        float, typer.Option("--start-t", help="Real t of the starting fiber.")
    ] = 1.0,
    tol: Annotated[
        float, typer.Option("--tol", help="Integrator tolerance.")
    ] = DEFAULT_TOL,
    seed: SeedOpt = DEFAULT_SEED,
) -> None:
    """Integrate gradient-Hamiltonian flow lines from the fiber over start_t."""
    with _exit_on_error():
        family = _family(variety, trunc, bound)
        rng = np.random.default_rng(seed)
        m = family.n + 1
        lines = []
        drifts = []
        for index in range(trajectories):
            phases = rng.uniform(0.0, 2 * np.pi, size=family.n)
            coordinates = tuple(complex(z) for z in np.exp(1j * phases))
            start = FlowState(coordinates, complex(start_t))
            line = integrate_flow(family, start, duration, tol)
            lines.append(line)
            write_trajectory_csv(out / f"line_{index + 1}.csv", line)
            first = np.zeros(2 * m)
            second = np.zeros(2 * m)
            first[0] = 1e-3
            second[m] = 1e-3
            check = transport_area_check(family, start, (first, second), duration, tol)
            drifts.append(check.relative_drift)
        plot_trajectories(out / "trajectories.svg", lines)
        for index, (line, drift) in enumerate(zip(lines, drifts, strict=True)):
            typer.echo(
                f"line {index + 1}: Re t = {line.final.t.real:.12f}, "
                f"area drift {drift:.3e}"
            )
        if any(d > AREA_DRIFT_TOL for d in drifts):
            logger.warning("Area drift above %g on some line", AREA_DRIFT_TOL)


def moment_sample(  # noqa: PLR0913
    variety: VarietyArg,
    out: OutDirOpt,
    trunc: TruncOpt = None,
    bound: BoundOpt = DEFAULT_GAMMA_BOUND,
    samples: Annotated[
        int, typer.Option("--samples", help="Number of samples.")
    ] = MOMENT_SAMPLES,
    seed: SeedOpt = DEFAULT_SEED,
) -> None:
    """Sample the moment map of the special fiber over conv(A)."""
    with _exit_on_error():
        family = _family(variety, trunc, bound)
        polytope = convex_hull(family.betas)
        rng = np.random.default_rng(seed)
        points = sample_moment_map(family.betas, family.leads, samples, rng)
        coverage = (
            moment_coverage(points, polytope) if polytope.full_dimensional else None
        )
        document = {
            "samples": samples,
            "inside": moment_inside(points, polytope),
            "coverage": coverage,
        }
        write_json(out / "moment.json", document)
        if family.n <= 2:  # noqa: PLR2004
            plot_moment_samples(out / "moment.svg", points, polytope)
        typer.echo(json.dumps(document))


def gromov(
    variety: VarietyArg,
    k: Annotated[int, typer.Option("--k", help="Power of the linear system.")] = 1,
    trunc: TruncOpt = None,
    bound: Annotated[
        int, typer.Option("--bound", help="Entry bound of the matrix search.")
    ] = DEFAULT_SIMPLEX_BOUND,
    out: OutOpt = None,
) -> None:
    """Certify a Gromov width lower bound by a simplex inside the body."""
    with _exit_on_error():
        _, basis = _basis(variety, trunc)
        body = delta_k(power_value_set(basis, k), k)
        certificate = search_largest_simplex(body, bound)
        typer.echo(
            f"size {certificate.size}, supremum {certificate.supremum}",
            err=out is None,
        )
        _emit(codec.simplex_to_json(certificate), out)


def pack(
    n: Annotated[int, typer.Option("--n", help="Dimension.")],
    d: Annotated[int, typer.Option("--d", help="Degree of the simplicial body.")],
    d_second: Annotated[
        str | None, typer.Option("--shrink", help="Rational d'' in (d - 1, d).")
    ] = None,
    out: OutOpt = None,
) -> None:
    """Certify a full packing of conv{0, e_1, ..., d e_n} by unit simplices."""
    with _exit_on_error():
        certificate = packing_subdivision(n, d)
        if d_second is not None:
            try:
                height = Fraction(d_second)
            except ValueError as err:
                msg = f"--shrink is not a rational number: {d_second!r}"
                raise PreconditionError(msg) from err
            shrunken = shrunken_packing(n, d, height)
            typer.echo(f"shrunken packing valid: {shrunken.valid}", err=True)
        _emit(codec.packing_to_json(certificate), out)


def verify_cert(
    path: Annotated[Path, typer.Argument(help="Certificate file.")],
) -> None:
    """Re-check a certificate file with exact arithmetic."""
    with _exit_on_error():
        kind = verify_certificate(read_json(path))
        typer.echo(f"{kind} certificate is valid")


def pipeline(
    config: Annotated[
        str, typer.Argument(help="Pipeline config file, or fixture:<name>.")
    ],
    out: OutOpt = None,
    seed: Annotated[
        int | None, typer.Option("--seed", help="Override the config seed.")
    ] = None,
) -> None:
    """Run every stage from expansion to packing and write a report."""
    with _exit_on_error():
        settings = load_config(config)
        overrides: dict[str, Any] = {}
        if out is not None:
            overrides["output_dir"] = out
        if seed is not None:
            overrides["seed"] = seed
        if overrides:
            settings = replace(settings, **overrides)
        report = run_pipeline(settings)
        summary = report.output_dir / "summary.txt"
        typer.echo(summary.read_text(encoding="utf-8"), nl=False)
