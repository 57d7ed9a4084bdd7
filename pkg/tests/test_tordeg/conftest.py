"""Shared fixtures built from the bundled golden varieties."""

import pytest

from tordeg.src.degen import DegenerationFamily, build_family
from tordeg.src.linsys import ValuedBasis, triangularize, valued_sections
from tordeg.src.utils import fixture_path
from tordeg.src.variety import SeriesBundle, VarietySpec, cmd_expand


@pytest.fixture
def elliptic_spec() -> VarietySpec:
    """Elliptic curve y^2 = x^3 + 1 with sections x/z, y/z, z/z."""
    return VarietySpec.from_json(fixture_path("elliptic.json"))


@pytest.fixture
def cubic_spec() -> VarietySpec:
    """Same curve with the reduced basis x/z, w/z, z/z, w = y - z."""
    return VarietySpec.from_json(fixture_path("cubic.json"))


@pytest.fixture
def elliptic_bundle(elliptic_spec: VarietySpec) -> SeriesBundle:
    """Expansions of the elliptic sections to order 12."""
    return cmd_expand(elliptic_spec)


@pytest.fixture
def cubic_bundle(cubic_spec: VarietySpec) -> SeriesBundle:
    """Expansions of the cubic sections to order 12."""
    return cmd_expand(cubic_spec)


@pytest.fixture
def cubic_basis(cubic_bundle: SeriesBundle) -> ValuedBasis:
    """Valued basis with A = {0, 1, 3}."""
    return triangularize(cubic_bundle.series, cubic_bundle.labels)


@pytest.fixture
def cubic_family(cubic_basis: ValuedBasis) -> DegenerationFamily:
    """Degeneration of the cubic basis with gamma = (1,)."""
    return build_family(cubic_basis, (1,))


@pytest.fixture
def elliptic_family(elliptic_bundle: SeriesBundle) -> DegenerationFamily:
    """Degeneration of the unreduced elliptic sections, valuations 1, 0, 0."""
    sections = valued_sections(elliptic_bundle.series, elliptic_bundle.labels)
    return build_family(sections, (1,), require_distinct=False)
