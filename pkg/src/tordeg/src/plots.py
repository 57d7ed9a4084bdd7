"""Trajectory tables and figures written by the flow stage."""

import csv
import logging
from collections.abc import Sequence
from pathlib import Path

import matplotlib as mpl
import numpy as np

mpl.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from tordeg.src.consts import APP_NAME  # noqa: E402
from tordeg.src.flow import RealArray, Trajectory  # noqa: E402
from tordeg.src.polytope import QPolytope  # noqa: E402

logger = logging.getLogger(__name__)

# fixed ids and no creation date keep the svg output byte-stable
mpl.rcParams["svg.hashsalt"] = APP_NAME
_SVG_METADATA = {"Date": None}


def write_trajectory_csv(path: Path, trajectory: Trajectory) -> Path:
    """Write the accepted steps of a trajectory.

    Columns are the flow time, then real and imaginary part of every
    coordinate u~_1, ..., u~_n, t.

    Args:
        path: Destination file.
        trajectory: The trajectory.

    Returns:
        The path written.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    m = trajectory.states[0].shape[0] // 2
    names = [f"u{i + 1}" for i in range(m - 1)] + ["t"]
    header = ["s"] + [f"{part}_{name}" for name in names for part in ("re", "im")]
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for time, state in zip(trajectory.times, trajectory.states, strict=True):
            row = [repr(time)]
            for k in range(m):
                row.extend([repr(float(state[k])), repr(float(state[m + k]))])
            writer.writerow(row)
    return path


def plot_trajectories(path: Path, trajectories: Sequence[Trajectory]) -> Path:
    """Plot |u~_1| against Re t for every trajectory."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 4))
    for index, trajectory in enumerate(trajectories):
        states = list(trajectory.states)
        m = states[0].shape[0] // 2
        re_t = [float(s[m - 1]) for s in states]
        modulus = [float(abs(complex(s[0], s[m]))) for s in states]
        ax.plot(re_t, modulus, marker=".", label=f"line {index + 1}")
    ax.set_xlabel("Re t")
    ax.set_ylabel("|u~1|")
    ax.invert_xaxis()
    ax.legend()
    fig.savefig(path, format="svg", metadata=_SVG_METADATA)
    plt.close(fig)
    logger.info("Wrote %s", path)
    return path


def plot_moment_samples(path: Path, samples: RealArray, polytope: QPolytope) -> Path:
    """Plot moment map samples over the moment polytope, n <= 2."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6, 4))
    n = samples.shape[1]
    if n == 1:
        ax.hist(samples[:, 0], bins=60)
        for vertex in polytope.vertices:
            ax.axvline(float(vertex[0]), color="black")
        ax.set_xlabel("mu")
    else:
        ax.scatter(samples[:, 0], samples[:, 1], s=1)
        ordered = _polygon_order(polytope)
        xs = [float(v[0]) for v in ordered] + [float(ordered[0][0])]
        ys = [float(v[1]) for v in ordered] + [float(ordered[0][1])]
        ax.plot(xs, ys, color="black")
        ax.set_xlabel("mu_1")
        ax.set_ylabel("mu_2")
    fig.savefig(path, format="svg", metadata=_SVG_METADATA)
    plt.close(fig)
    logger.info("Wrote %s", path)
    return path


def _polygon_order(polytope: QPolytope) -> list[tuple[float, ...]]:
    """Vertices of a polygon in counterclockwise order."""
    points = [tuple(float(x) for x in v) for v in polytope.vertices]
    cx = sum(p[0] for p in points) / len(points)
    cy = sum(p[1] for p in points) / len(points)
    return sorted(points, key=lambda p: float(np.arctan2(p[1] - cy, p[0] - cx)))
