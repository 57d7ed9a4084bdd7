"""utils."""

import json
import logging
from pathlib import Path
from typing import Any

from platformdirs import user_data_dir
from pyrig.core.resources import resource_path

from tordeg.rig.resources import fixtures

logger = logging.getLogger(__name__)


def get_user_data_dir() -> Path:
    """Get the user data directory where runs are written by default.

    Returns:
        Path to the user data directory.
    """
    data_dir = Path(user_data_dir("Tordeg", "Tordeg"))
    data_dir.mkdir(parents=True, exist_ok=True)
    return data_dir


def get_default_output_dir(name: str) -> Path:
    """Get the default output directory of a named run.

    Args:
        name: Run name, usually the variety name.

    Returns:
        Path to the run directory below the user data directory.
    """
    return get_user_data_dir() / "runs" / name


def fixture_path(name: str) -> Path:
    """Get the path of a bundled fixture file.

    Args:
        name: File name inside the fixtures package.

    Returns:
        Path to the fixture.
    """
    return resource_path(name, fixtures)


def resolve_input_path(reference: str, base: Path | None = None) -> Path:
    """Resolve a file reference from a config or the command line.

    References of the form ``fixture:<name>`` point into the bundled
    fixtures, anything else is a path relative to ``base``.

    Args:
        reference: The reference string.
        base: Directory relative paths are resolved against.

    Returns:
        The resolved path.
    """
    if reference.startswith("fixture:"):
        return fixture_path(reference.removeprefix("fixture:"))
    path = Path(reference)
    if base is not None and not path.is_absolute():
        path = base / path
    return path


def read_json(path: Path) -> Any:  # noqa: ANN401
    """Read a json document."""
    return json.loads(path.read_text(encoding="utf-8"))


def write_json(path: Path, document: Any) -> Path:  # noqa: ANN401
    """Write a json document deterministically.

    Args:
        path: Destination file, parents are created.
        document: Json serializable document.

    Returns:
        The path written.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
    logger.info("Wrote %s", path)
    return path
