from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from pathlib import Path

import pytest

from symnorm.bundles import PLFunction, from_ray_values
from symnorm.catalog import catalog, chamber_fan
from symnorm.config import Limits
from symnorm.fans import Fan, star_subdivision
from symnorm.registry import SplitterRegistry
from symnorm.roots import (
    RestrictedRootSystem,
    SphericalLattice,
    WeylGroup,
    generate_weyl_group,
)


@pytest.fixture(scope="session")
def test_data_dir():
    """Test data directory Path"""
    return Path(__file__).parent / "data"


@pytest.fixture
def splitter_registry():
    return SplitterRegistry()


@pytest.fixture(scope="session")
def limits():
    """Small caps so a runaway enumeration fails fast instead of hanging the suite."""
    return Limits(weyl_order=5000, box_points=200_000)


@pytest.fixture(scope="session")
def root_system() -> Callable[[str], RestrictedRootSystem]:
    """Return a function that builds a root system from its label."""

    def _build(label: str) -> RestrictedRootSystem:
        return RestrictedRootSystem.from_label(label)

    return _build


@pytest.fixture(scope="session")
def weyl(root_system) -> Callable[[str], WeylGroup]:
    """Return a function that builds the Weyl group of a labelled root system."""

    def _build(label: str) -> WeylGroup:
        return generate_weyl_group(root_system(label))

    return _build


@pytest.fixture(scope="session")
def blowup2() -> Fan:
    """The blow-up of A^2 at the origin: rays e_1, e_2, e_1 + e_2."""
    return catalog("blowup", 2, 2)


@pytest.fixture(scope="session")
def bundle_factory() -> Callable[..., PLFunction]:
    """Create a PLFunction from a fan, ray values and an optional root system.

    With a root system the values are read on the spherical lattice of that root
    system, otherwise on M.
    """

    def create(
        fan: Fan,
        values: Sequence[int | str | Fraction],
        rs: RestrictedRootSystem | None = None,
    ) -> PLFunction:
        lattice = SphericalLattice.spherical(rs) if rs is not None else None
        return from_ray_values(fan, values, lattice)

    return create


@pytest.fixture(scope="session")
def ample_a1a1(blowup2, root_system, bundle_factory) -> PLFunction:
    """The ample spherical bundle with values (-2, -2, -3) on the A1xA1 blow-up fan.

    Its complete polytope is the octagon |x_i| <= 2, |x_1 +- x_2| <= 3.
    """
    return bundle_factory(blowup2, [-2, -2, -3], root_system("A1xA1"))


def cone_parts(h: PLFunction) -> dict[frozenset, tuple[Fraction, ...]]:
    """Linear parts of h keyed by the set of rays spanning each maximal cone."""
    return {
        frozenset(h.fan.rays[i] for i in cone): part
        for cone, part in zip(h.fan.max_cones, h.linear_parts)
    }


@dataclass
class SplitCase:
    """Test case for a splitter.

    Attributes:
        name: A human-readable name for the test case.
        algorithm: The registered algorithm name.
        fan: Catalog name and parameters of the fan.
        h_values: Ray values of the first function.
        k_values: Ray values of the second function; None means k = h.
        points: Points to split. Empty means every minimal point of Q_{h+k}.
        answer: Expected (m1, m2) for the first point, if pinned down.
    """

    name: str
    algorithm: str
    fan: tuple
    h_values: list[int]
    k_values: list[int] | None = None
    points: list[tuple[int, ...]] = field(default_factory=list)
    answer: tuple[tuple[int, ...], tuple[int, ...]] | None = None


RANK2_LABELS = ("A1xA1", "A2", "B2", "G2", "BC2")

# Applied in order to the quadrant: centre, then sigma(e_2, e_1 + e_2), then
# sigma(e_1, e_1 + e_2). The new rays are (1, 1), (1, 2) and (2, 1).
QUADRANT_SUBDIVISIONS = ((0, 1), (1, 2), (0, 2))

GRID_VALUES = range(-6, 1)


@lru_cache(maxsize=None)
def quadrant_fan(subdivisions: int) -> Fan:
    """The quadrant after the first ``subdivisions`` star subdivisions."""
    fan = chamber_fan(2)
    for gamma in QUADRANT_SUBDIVISIONS[:subdivisions]:
        fan = star_subdivision(fan, gamma)
    return fan


def classify_rank2(
    fan: Fan, cartan: tuple[tuple[int, ...], ...], values: tuple[int, ...]
) -> tuple[bool, bool]:
    """(gg, ample) of integral ray values on a smooth rank-2 fan, in plain integers."""
    parts = []
    for cone in fan.max_cones:
        (a, b), (c, d) = (fan.rays[i] for i in cone)
        det = a * d - b * c
        x, y = (values[i] for i in cone)
        parts.append(((d * x - b * y) // det, (a * y - c * x) // det))
    convex = all(
        p[0] * r[0] + p[1] * r[1] >= v
        for p in parts
        for r, v in zip(fan.rays, values)
    )
    dotted = [[row[0] * p[0] + row[1] * p[1] for row in cartan] for p in parts]
    gg = convex and all(x <= 0 for row in dotted for x in row)
    ample = (
        gg
        and len(set(parts)) == len(parts)
        and all(x < 0 for row in dotted for x in row)
    )
    return gg, ample


@lru_cache(maxsize=None)
def ample_values(label: str, subdivisions: int) -> tuple[tuple[int, ...], ...]:
    """Every ray-value vector in [-6, 0] giving an ample bundle on the quadrant fan."""
    fan = quadrant_fan(subdivisions)
    cartan = RestrictedRootSystem.from_label(label).cartan
    return tuple(
        values
        for values in product(GRID_VALUES, repeat=len(fan.rays))
        if classify_rank2(fan, cartan, values)[1]
    )


def spread(items: Sequence, count: int) -> list:
    """Up to ``count`` evenly spaced items, first one included."""
    if not items:
        return []
    count = min(count, len(items))
    return [items[i * len(items) // count] for i in range(count)]


@lru_cache(maxsize=None)
def status_grid(
    label: str, subdivisions: int
) -> tuple[tuple[tuple[int, ...], bool, bool], ...]:
    """(values, gg, ample) for 6 ample vectors, 10 vectors spread over [-6, 0] and 0."""
    fan = quadrant_fan(subdivisions)
    cartan = RestrictedRootSystem.from_label(label).cartan
    everything = list(product(GRID_VALUES, repeat=len(fan.rays)))
    stride = len(everything) // 10
    chosen = [
        *spread(ample_values(label, subdivisions), 6),
        *(everything[stride // 2 + i * stride] for i in range(10)),
        (0,) * len(fan.rays),
    ]
    return tuple((v, *classify_rank2(fan, cartan, v)) for v in dict.fromkeys(chosen))


def chamber_ample_values(label: str, count: int) -> list[tuple[int, ...]]:
    """Values in [-6, -1] on the chamber fan whose linear part is regular dominant."""
    cartan = RestrictedRootSystem.from_label(label).cartan
    pool = [
        values
        for values in product(range(-6, 0), repeat=len(cartan))
        if all(sum(a * x for a, x in zip(row, values)) < 0 for row in cartan)
    ]
    return spread(pool, count)
