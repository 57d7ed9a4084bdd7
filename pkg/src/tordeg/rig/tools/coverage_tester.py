"""Pytest-cov coverage testing wrapper.

The kernel is exact arithmetic with golden values, so the suite is held to
a real coverage threshold.
"""

from pyrig_codecov.rig.tools.testing.project import (  # deptry: ignore[DEP004]
    ProjectTester as BaseProjectTester,
)

COVERAGE_THRESHOLD = 80


class CoverageTester(BaseProjectTester):
    """Coverage tester with the tordeg threshold."""

    def threshold(self) -> int:
        """Minimum total coverage in percent."""
        return COVERAGE_THRESHOLD
