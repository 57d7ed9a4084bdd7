"""module."""

from typing import Any

import pytest
from pyrig.rig.configs.pyproject import (
    PyprojectConfigFile as BasePyprojectConfigFile,
)

from tordeg.rig.configs.configs import UNTYPED_MODULES, PyprojectConfigFile


class TestPyprojectConfigFile:
    """Test class."""

    def test__configs(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Test method."""

        def base_configs(_self: BasePyprojectConfigFile) -> dict[str, Any]:
            return {"tool": {}}

        monkeypatch.setattr(BasePyprojectConfigFile, "_configs", base_configs)
        config = PyprojectConfigFile.__new__(PyprojectConfigFile)
        mypy = config._configs()["tool"]["mypy"]  # noqa: SLF001
        assert mypy["strict"] is True
        assert mypy["overrides"] == [
            {"module": list(UNTYPED_MODULES), "ignore_missing_imports": True}
        ]
