"""Gradient-Hamiltonian flow of a toric degeneration.

The total space of the family carries the Kahler form pulled back from
Fubini-Study on the sections plus the flat form of the t-line. The flow is
the negative gradient of Re t normalized so that Re t decreases at unit
speed; it moves fibers to fibers and preserves the fiber symplectic forms.

Real coordinates of a state are (Re z, Im z) with z = (u~_1, ..., u~_n, t).
Close to the zero fiber the degenerating chart (u~, t) is used, away from it
the trivial chart (u, t) with u = t**gamma u~.
"""

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import numpy.typing as npt
from scipy import integrate, linalg, spatial, special

from tordeg.src.consts import (
    CHART_SWITCH,
    DEFAULT_TOL,
    FD_OFFSET,
    FIBER_LOG_RADIUS,
    HANDOVER_BAND,
    HANDOVER_TOL,
    MOMENT_COVERAGE_SCALE,
    MOMENT_LOG_RANGE,
)
from tordeg.src.degen import ComplexArray, DegenerationFamily, NumericFamily
from tordeg.src.errors import (
    ChartExitError,
    ChartMismatchError,
    PreconditionError,
    PullbackDegenerateError,
)
from tordeg.src.polytope import QPolytope
from tordeg.src.series import Exponent

logger = logging.getLogger(__name__)

type RealArray = npt.NDArray[np.float64]


@dataclass(frozen=True)
class FlowState:
    """A point (u~, t) of the total space in the degenerating chart."""

    u_tilde: tuple[complex, ...]
    t: complex

    @property
    def coordinates(self) -> ComplexArray:
        """Complex coordinates (u~, t)."""
        return np.array([*self.u_tilde, self.t], dtype=np.complex128)

    def to_real(self) -> RealArray:
        """Real coordinates (Re z, Im z)."""
        z = self.coordinates
        return np.concatenate([z.real, z.imag])

    @classmethod
    def from_real(cls, x: RealArray) -> "FlowState":
        """Inverse of `to_real`."""
        m = x.shape[0] // 2
        z = x[:m] + 1j * x[m:]
        return cls(tuple(complex(v) for v in z[:-1]), complex(z[-1]))


@dataclass(frozen=True, eq=False)
class KahlerSample:
    """The pulled back Kahler data at one point.

    Attributes:
        hermitian: Hermitian matrix h with omega = (i/2) h dz ^ dzbar.
        metric: Real symmetric metric G in (Re z, Im z) coordinates.
        omega: Real antisymmetric symplectic matrix.
        compatibility_residual: Size of the failure of omega = g(J., .).
    """

    hermitian: ComplexArray
    metric: RealArray
    omega: RealArray
    compatibility_residual: float


def fubini_study_hermitian(
    values: ComplexArray, jacobian: ComplexArray
) -> ComplexArray:
    """Hermitian matrix of the pullback of Fubini-Study, ddbar log |f|^2.

    Args:
        values: Section values, shape (r,).
        jacobian: Holomorphic Jacobian, shape (r, m).

    Returns:
        The (m, m) Hermitian matrix.
    """
    squared = float(np.vdot(values, values).real)
    if squared == 0.0:
        msg = "all sections vanish at the point"
        raise PullbackDegenerateError(msg)
    mixed = jacobian.T @ values.conj()
    result: ComplexArray = (jacobian.T @ jacobian.conj()) / squared - np.outer(
        mixed, mixed.conj()
    ) / squared**2
    return result


def complex_structure(m: int) -> RealArray:
    """Matrix of multiplication by i in (Re z, Im z) coordinates."""
    identity = np.eye(m)
    zero = np.zeros((m, m))
    return np.block([[zero, -identity], [identity, zero]])


def real_forms(hermitian: ComplexArray) -> tuple[RealArray, RealArray]:
    """Metric and symplectic matrices of a Hermitian form.

    With omega = (i/2) h dz ^ dzbar the metric is Re(v^T h conj(w)) and
    omega(v, w) = g(J v, w).

    Args:
        hermitian: The Hermitian matrix h.

    Returns:
        The pair (G, Omega).
    """
    real, imag = hermitian.real, hermitian.imag
    metric = np.block([[real, imag], [-imag, real]])
    structure = complex_structure(hermitian.shape[0])
    return metric, structure.T @ metric


def _kahler_from_hermitian(hermitian: ComplexArray) -> KahlerSample:
    metric, omega = real_forms(hermitian)
    structure = complex_structure(hermitian.shape[0])
    residual = float(
        max(
            np.max(np.abs(omega + omega.T)),
            np.max(np.abs(structure.T @ metric @ structure - metric)),
        )
    )
    return KahlerSample(hermitian, metric, omega, residual)


def _total_hermitian(values: ComplexArray, jacobian: ComplexArray) -> ComplexArray:
    hermitian = fubini_study_hermitian(values, jacobian)
    hermitian[-1, -1] += 1.0
    return hermitian


def pullback_kahler(
    family: DegenerationFamily | NumericFamily, state: FlowState
) -> KahlerSample:
    """Kahler data of the total space at a state of the degenerating chart.

    Args:
        family: The family.
        state: A point (u~, t).

    Returns:
        Metric and symplectic matrices in (Re z, Im z) coordinates.
    """
    numeric = _numeric(family)
    u_tilde = np.array(state.u_tilde, dtype=np.complex128)
    values, jacobian = numeric.tilde(u_tilde, state.t)
    return _kahler_from_hermitian(_total_hermitian(values, jacobian))


def fiber_hermitian(
    family: DegenerationFamily | NumericFamily, state: FlowState
) -> ComplexArray:
    """Hermitian matrix of the restriction of the form to the fiber through state."""
    return pullback_kahler(family, state).hermitian[:-1, :-1]


def _numeric(family: DegenerationFamily | NumericFamily) -> NumericFamily:
    return family.numeric if isinstance(family, DegenerationFamily) else family


def _gradient_direction(hermitian: ComplexArray) -> ComplexArray:
    """Complex components of -grad Re t / |grad Re t|^2."""
    m = hermitian.shape[0]
    metric, _ = real_forms(hermitian)
    try:
        factor = linalg.cho_factor(metric)
    except linalg.LinAlgError as err:
        msg = "pulled back Kahler metric is not positive definite"
        raise PullbackDegenerateError(msg) from err
    target = np.zeros(2 * m)
    target[m - 1] = 1.0
    gradient = linalg.cho_solve(factor, target)
    field = -gradient / gradient[m - 1]
    direction: ComplexArray = field[:m] + 1j * field[m:]
    return direction


def _field_degenerating(numeric: NumericFamily, z: ComplexArray) -> ComplexArray:
    values, jacobian = numeric.tilde(z[:-1], complex(z[-1]))
    return _gradient_direction(_total_hermitian(values, jacobian))


def _field_trivial(numeric: NumericFamily, z: ComplexArray) -> ComplexArray:
    """Compute in (u, t) and push forward to (u~, t)."""
    t = complex(z[-1])
    gamma = numeric.gamma.astype(np.float64)
    u = z[:-1] * t**gamma
    values, jacobian = numeric.trivial(u, t)
    direction = _gradient_direction(_total_hermitian(values, jacobian))
    du, dt = direction[:-1], direction[-1]
    du_tilde = t ** (-gamma) * du - gamma * t ** (-gamma - 1) * u * dt
    return np.concatenate([du_tilde, [dt]])


def grad_ham_field(
    family: DegenerationFamily | NumericFamily,
    state: FlowState,
    chart: str = "auto",
) -> RealArray:
    """The normalized gradient-Hamiltonian field at a state.

    Args:
        family: The family.
        state: Point of the total space in the degenerating chart.
        chart: "degenerating", "trivial" or "auto" which picks by |t|.

    Returns:
        The field in real coordinates (Re z, Im z); its Re t component is -1.

    Raises:
        PullbackDegenerateError: If the metric is not positive definite.
    """
    z = state.coordinates
    return _real(_field(_numeric(family), z, chart))


def _field(numeric: NumericFamily, z: ComplexArray, chart: str) -> ComplexArray:
    use_trivial = abs(z[-1]) > CHART_SWITCH if chart == "auto" else chart == "trivial"
    if chart not in {"auto", "trivial", "degenerating"}:
        msg = f"unknown chart {chart!r}"
        raise PreconditionError(msg)
    if use_trivial:
        if z[-1] == 0:
            msg = "the trivial chart is not defined on the zero fiber"
            raise PreconditionError(msg)
        return _field_trivial(numeric, z)
    return _field_degenerating(numeric, z)


def _real(direction: ComplexArray) -> RealArray:
    return np.concatenate([direction.real, direction.imag])


def chart_agreement(
    family: DegenerationFamily | NumericFamily, state: FlowState
) -> float:
    """Largest difference between the field computed in both charts."""
    numeric = _numeric(family)
    z = state.coordinates
    difference = _field(numeric, z, "degenerating") - _field(numeric, z, "trivial")
    return float(np.max(np.abs(difference)))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Accepted integration steps of a flow line."""

    times: tuple[float, ...]
    states: tuple[RealArray, ...]

    @property
    def final(self) -> FlowState:
        """State at the last accepted time."""
        return FlowState.from_real(self.states[-1])

    def state(self, index: int) -> FlowState:
        """State at one accepted step."""
        return FlowState.from_real(self.states[index])


def _integrate(
    fun: Callable[[float, RealArray], RealArray],
    start: RealArray,
    duration: float,
    tol: float,
) -> Trajectory:
    """Step an RK45 solver manually and record every accepted step."""
    times = [0.0]
    states = [start.copy()]
    if duration == 0:
        return Trajectory(tuple(times), tuple(states))
    solver = integrate.RK45(fun, 0.0, start, duration, rtol=tol, atol=tol)
    while solver.status == "running":
        try:
            message = solver.step()
        except PullbackDegenerateError as err:
            raise PullbackDegenerateError(str(err), times, states) from err
        if solver.status == "failed":
            msg = f"integration left the chart of validity at s={solver.t}: {message}"
            raise ChartExitError(msg, times, states)
        times.append(float(solver.t))
        states.append(np.array(solver.y, dtype=np.float64))
    return Trajectory(tuple(times), tuple(states))


def integrate_flow(
    family: DegenerationFamily | NumericFamily,
    start: FlowState,
    duration: float,
    tol: float = DEFAULT_TOL,
) -> Trajectory:
    """Integrate the flow from a state for a time span.

    A negative duration runs the flow backwards, Re t then grows by
    |duration|. Every accepted state with |t| inside the handover band is
    checked for agreement of the two charts.

    Args:
        family: The family.
        start: Initial state.
        duration: Flow time, equal to the decrease of Re t.
        tol: Relative and absolute tolerance of the integrator.

    Returns:
        The trajectory of accepted steps, starting with the initial state.

    Raises:
        ChartExitError: If the integrator cannot continue.
        ChartMismatchError: If the charts disagree in the handover band.
        PullbackDegenerateError: If the metric degenerates on the way.
    """
    numeric = _numeric(family)
    m = numeric.n + 1

    def fun(_s: float, x: RealArray) -> RealArray:
        return _real(_field(numeric, x[:m] + 1j * x[m:], "auto"))

    trajectory = _integrate(fun, start.to_real(), duration, tol)
    logger.debug(
        "Flow: %d accepted steps to s=%s",
        len(trajectory.times) - 1,
        trajectory.times[-1],
    )
    _check_handover(numeric, trajectory)
    return trajectory


def _check_handover(numeric: NumericFamily, trajectory: Trajectory) -> None:
    low, high = HANDOVER_BAND
    for index, time in enumerate(trajectory.times):
        state = trajectory.state(index)
        if not low <= abs(state.t) <= high:
            continue
        gap = chart_agreement(numeric, state)
        if gap > HANDOVER_TOL:
            msg = f"charts disagree by {gap:.3e} at s={time}, |t|={abs(state.t):.6f}"
            raise ChartMismatchError(msg, trajectory.times, trajectory.states)


@dataclass(frozen=True)
class AreaCheck:
    """Symplectic area of a tangent frame before and after transport."""

    before: float
    after: float

    @property
    def relative_drift(self) -> float:
        """|after - before| / |before|."""
        return abs(self.after - self.before) / abs(self.before)


def transport_area_check(
    family: DegenerationFamily | NumericFamily,
    start: FlowState,
    frame: tuple[RealArray, RealArray],
    duration: float,
    tol: float = DEFAULT_TOL,
    offset: float = FD_OFFSET,
) -> AreaCheck:
    """Transport a fiber tangent frame along the flow and compare areas.

    The pushforward of each frame vector is a central difference of flow
    lines started at offset distance. All five lines are integrated as one
    system so they share the same steps.

    Args:
        family: The family.
        start: Initial state.
        frame: Two real tangent vectors of the fiber, zero in the t slots.
        duration: Flow time.
        tol: Integrator tolerance.
        offset: Distance of the difference quotient starting points.

    Returns:
        The areas omega(v1, v2) before and after the flow.
    """
    numeric = _numeric(family)
    m = numeric.n + 1
    first, second = (np.asarray(v, dtype=np.float64) for v in frame)
    if any(v[m - 1] != 0 or v[2 * m - 1] != 0 for v in (first, second)):
        msg = "frame vectors must be tangent to the fiber"
        raise PreconditionError(msg)
    x0 = start.to_real()
    before = float(first @ pullback_kahler(numeric, start).omega @ second)
    if duration == 0:
        return AreaCheck(before, before)

    steps = [offset / float(np.linalg.norm(v)) for v in (first, second)]
    copies = [
        x0,
        x0 + steps[0] * first,
        x0 - steps[0] * first,
        x0 + steps[1] * second,
        x0 - steps[1] * second,
    ]
    stacked = np.concatenate(copies)
    size = 2 * m

    def fun(_s: float, x: RealArray) -> RealArray:
        return np.concatenate(
            [
                _real(_field(numeric, x[k : k + m] + 1j * x[k + m : k + size], "auto"))
                for k in range(0, x.shape[0], size)
            ]
        )

    final = _integrate(fun, stacked, duration, tol).states[-1].reshape(5, size)
    pushed_first = (final[1] - final[2]) / (2 * steps[0])
    pushed_second = (final[3] - final[4]) / (2 * steps[1])
    end = FlowState.from_real(final[0])
    after = float(pushed_first @ pullback_kahler(numeric, end).omega @ pushed_second)
    check = AreaCheck(before, after)
    logger.debug("Area before %.12g after %.12g", before, after)
    return check


def _log_weights(
    values: npt.NDArray[np.int64], coefficients: ComplexArray, log_moduli: RealArray
) -> RealArray:
    weights: RealArray = (
        2.0 * np.log(np.abs(coefficients)) + 2.0 * log_moduli @ values.T
    )
    return weights


def moment_map(
    values: Sequence[Exponent],
    coefficients: Sequence[complex | Fraction],
    u: Sequence[complex],
) -> RealArray:
    """Moment map of the torus action for the form pulled back by u -> (c_j u**beta_j).

    Args:
        values: Exponents beta_j.
        coefficients: Nonzero coefficients c_j.
        u: Point of the torus.

    Returns:
        sum_j w_j beta_j / sum_j w_j with w_j = |c_j|^2 |u**beta_j|^2.
    """
    betas, coeffs = _toric_data(values, coefficients)
    point = np.asarray(u, dtype=np.complex128)
    if np.any(point == 0):
        msg = "the moment map is evaluated on the torus, coordinates must be nonzero"
        raise PreconditionError(msg)
    weights = special.softmax(_log_weights(betas, coeffs, np.log(np.abs(point))))
    result: RealArray = weights @ betas
    return result


def _toric_data(
    values: Sequence[Exponent],
    coefficients: Sequence[complex | Fraction],
) -> tuple[npt.NDArray[np.int64], ComplexArray]:
    if len(values) != len(coefficients) or not values:
        msg = "one coefficient is needed per exponent"
        raise PreconditionError(msg)
    coeffs = np.array([complex(c) for c in coefficients], dtype=np.complex128)
    if np.any(coeffs == 0):
        msg = "toric coefficients must be nonzero"
        raise PreconditionError(msg)
    return np.array(values, dtype=np.int64), coeffs


def sample_moment_map(
    values: Sequence[Exponent],
    coefficients: Sequence[complex | Fraction],
    count: int,
    rng: np.random.Generator,
    log_range: tuple[float, float] = MOMENT_LOG_RANGE,
) -> RealArray:
    """Moment map images of random torus points.

    Moduli are log-uniform in 10**log_range; the phases do not matter.

    Returns:
        Array of shape (count, n).
    """
    betas, coeffs = _toric_data(values, coefficients)
    n = betas.shape[1]
    log_moduli = rng.uniform(*log_range, size=(count, n)) * np.log(10.0)
    weights = special.softmax(_log_weights(betas, coeffs, log_moduli), axis=1)
    result: RealArray = weights @ betas
    return result


def moment_inside(samples: RealArray, polytope: QPolytope, tol: float = 1e-12) -> bool:
    """Check that every sample satisfies the facet inequalities."""
    normals = np.array([h.normal for h in polytope.half_spaces], dtype=np.float64)
    offsets = np.array([float(h.offset) for h in polytope.half_spaces])
    return bool(np.all(samples @ normals.T <= offsets + tol))


def moment_coverage(
    samples: RealArray, polytope: QPolytope, scale: float = MOMENT_COVERAGE_SCALE
) -> bool:
    """Check that the samples spread over a shrunken copy of the polytope.

    Args:
        samples: Moment map images, shape (count, n).
        polytope: The full dimensional target polytope.
        scale: Shrink factor about the vertex centroid.

    Returns:
        True if the hull of the samples contains every shrunken vertex.
    """
    vertices = np.array([[float(x) for x in v] for v in polytope.vertices])
    center = vertices.mean(axis=0)
    shrunken = center + scale * (vertices - center)
    if samples.shape[1] == 1:
        return bool(samples.min() <= shrunken.min() and samples.max() >= shrunken.max())
    hull = spatial.ConvexHull(samples)
    slack = shrunken @ hull.equations[:, :-1].T + hull.equations[:, -1]
    return bool(np.all(slack <= 1e-12))


def toric_form(
    values: Sequence[Exponent],
    coefficients: Sequence[complex | Fraction],
    u: Sequence[complex],
    coefficient_power: int = 2,
) -> ComplexArray:
    """Hermitian matrix of the toric form ddbar log sum_j |c_j|^p |u**beta_j|^2.

    In log coordinates this is the covariance of the exponents under the
    weights of the potential, divided by u_a conj(u_b). With the default
    p = 2 it is the pullback of Fubini-Study by u -> (c_j u**beta_j).

    Args:
        values: Exponents beta_j.
        coefficients: Nonzero coefficients c_j.
        u: Point of the torus.
        coefficient_power: Power p of |c_j| in the potential.

    Returns:
        The (n, n) Hermitian matrix.
    """
    betas, coeffs = _toric_data(values, coefficients)
    point = np.asarray(u, dtype=np.complex128)
    log_weights = (
        coefficient_power * np.log(np.abs(coeffs))
        + 2.0 * np.log(np.abs(point)) @ betas.T
    )
    weights = special.softmax(log_weights)
    mean = weights @ betas
    centered = betas - mean
    covariance = (centered.T * weights) @ centered
    result: ComplexArray = covariance / np.outer(point, point.conj())
    return result


def fiber_normalized_area(family: DegenerationFamily | NumericFamily) -> float:
    """Symplectic area of the zero fiber of a curve family divided by pi.

    The fiber form is rotation invariant, so the area is 2 pi times the
    integral of h(r) r dr; in log radius the integrand decays exponentially
    at both ends.

    Args:
        family: A family of curves.

    Returns:
        The area over pi, which is the length of the hull of the valuations.
    """
    numeric = _numeric(family)
    if numeric.n != 1:
        msg = f"fiber area is computed for curves, got dimension {numeric.n}"
        raise PreconditionError(msg)

    def integrand(rho: float) -> float:
        radius = float(np.exp(rho))
        h = fiber_hermitian(numeric, FlowState((complex(radius),), 0j))
        return float(h[0, 0].real) * radius**2

    integral, _error = integrate.quad(
        integrand, -FIBER_LOG_RADIUS, FIBER_LOG_RADIUS, limit=400
    )
    return float(2.0 * integral)
