"""Configs for pyrig.

All subclasses of ConfigFile in the configs package are automatically called.
"""

from typing import Any

from pyrig.rig.configs.pyproject import (  # deptry: ignore[DEP004]
    PyprojectConfigFile as BasePyprojectConfigFile,
)

from tordeg.rig.tools.type_checker import TypeChecker

UNTYPED_MODULES = ("scipy.*", "sympy.*")


class PyprojectConfigFile(BasePyprojectConfigFile):
    """Pyproject config file.

    Extends the pyrig pyproject config file with the mypy settings.
    """

    def _configs(self) -> dict[str, Any]:
        """Get the configs."""
        configs = super()._configs()

        # add mypy settings
        configs["tool"][TypeChecker.I.name()] = {
            "strict": True,
            "warn_unreachable": True,
            "enable_error_code": [],
            "show_error_code_links": True,
            "files": ".",
            # scipy and sympy ship without complete stubs
            "overrides": [
                {"module": list(UNTYPED_MODULES), "ignore_missing_imports": True},
            ],
        }
        return configs
