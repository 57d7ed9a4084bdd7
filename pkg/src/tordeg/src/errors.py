"""Error hierarchy shared by every kernel module.

Every error carries a human readable message. The command line maps each
family to an exit code, see `exit_code_for`.
"""

from collections.abc import Sequence
from typing import TYPE_CHECKING, Any

from tordeg.src.consts import (
    EXIT_CERTIFICATE_INVALID,
    EXIT_FLOW_ERROR,
    EXIT_PRECONDITION,
    EXIT_TRUNCATION,
)

if TYPE_CHECKING:
    import numpy as np
    import numpy.typing as npt


class TordegError(Exception):
    """Base class of all errors raised by tordeg."""

    exit_code = EXIT_FLOW_ERROR


class PreconditionError(TordegError, ValueError):
    """An input violates a documented precondition."""

    exit_code = EXIT_PRECONDITION


class NotContainedError(PreconditionError):
    """An inner polytope has a vertex outside the outer polytope."""

    def __init__(self, msg: str, vertex: Sequence[object]) -> None:
        """Keep the offending vertex next to the message.

        Args:
            msg: The error message.
            vertex: The first vertex found outside.
        """
        super().__init__(msg)
        self.vertex = tuple(vertex)


class TruncationError(TordegError):
    """A series truncation is too low for the requested computation."""

    exit_code = EXIT_TRUNCATION


class DependentAtOrderError(TruncationError):
    """A linear system became dependent at the current truncation order."""

    def __init__(self, order: int, label: str) -> None:
        """Record the order at which the dependency showed up.

        Args:
            order: The truncation order in use.
            label: Label of the section that reduced to zero.
        """
        msg = f"section {label!r} is dependent at order {order}"
        super().__init__(msg)
        self.order = order
        self.label = label


class CertificateInvalidError(TordegError):
    """A certificate failed its exact re-verification."""

    exit_code = EXIT_CERTIFICATE_INVALID


class FlowError(TordegError):
    """Numerical flow failure, keeps the partial trajectory."""

    exit_code = EXIT_FLOW_ERROR

    def __init__(
        self,
        msg: str,
        times: Sequence[float] = (),
        states: Sequence["npt.NDArray[np.float64]"] = (),
    ) -> None:
        """Create the error.

        Args:
            msg: The error message.
            times: Accepted step times before the failure.
            states: Real states at those times.
        """
        super().__init__(msg)
        self.times = tuple(times)
        self.states = tuple(states)


class ChartExitError(FlowError):
    """The integrator could not continue inside the chart."""


class ChartMismatchError(FlowError):
    """The two charts give different fields inside the handover band."""


class PullbackDegenerateError(FlowError):
    """The pulled back Kahler form is not positive definite."""


class PipelineStageError(TordegError):
    """A pipeline stage failed, wraps the original error."""

    def __init__(
        self, stage: str, cause: TordegError, artifacts: dict[str, Any]
    ) -> None:
        """Create the error.

        Args:
            stage: Name of the failing stage.
            cause: The error raised by the stage.
            artifacts: Artifacts produced before the failure.
        """
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause
        self.artifacts = artifacts
        self.exit_code = cause.exit_code


def exit_code_for(error: BaseException) -> int:
    """Get the process exit code for an error.

    Args:
        error: Any exception.

    Returns:
        The exit code of the error family, 1 for foreign exceptions.
    """
    if isinstance(error, TordegError):
        return error.exit_code
    return EXIT_FLOW_ERROR
