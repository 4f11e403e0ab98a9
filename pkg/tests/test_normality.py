from fractions import Fraction
from itertools import combinations_with_replacement

import pytest

from symnorm.bundles import bundle_status, from_ray_values, weyl_extend
from symnorm.catalog import catalog
from symnorm.config import Limits
from symnorm.exceptions import CapExceededError, PreconditionError
from symnorm.lattice import add, mvec
from symnorm.models import Mode, Outcome, Verdict
from symnorm.normality import (
    SATURATION_NOTE,
    check_equivalence,
    check_orthant_generation,
    check_saturation,
    check_sum_complete,
    check_sum_open,
    check_wall_strip,
    descend_to_chamber,
    find_open_split,
    in_weight_set,
    transfer_decomposition,
)
from symnorm.polyhedra import complete_polytope

from .conftest import (
    RANK2_LABELS,
    ample_values,
    chamber_ample_values,
    quadrant_fan,
    spread,
)


@pytest.fixture
def center(blowup2):
    """The function with values (0, 0, 1) on the blow-up of A^2."""
    return from_ray_values(blowup2, [0, 0, 1])


def test_in_weight_set(center):
    assert in_weight_set(center, mvec([1, 0]))
    assert in_weight_set(center, mvec([3, 4]))
    assert not in_weight_set(center, mvec([0, 0]))
    assert not in_weight_set(center, mvec(["1/2", "1/2"]))


def test_find_open_split(center):
    m1, searched = find_open_split(center, center, mvec([0, 2]))
    assert m1 == mvec([0, 1])
    assert searched == 2
    m1, _ = find_open_split(center, center, mvec([0, 1]))
    assert m1 is None


def test_find_open_split_cap(center):
    with pytest.raises(CapExceededError):
        find_open_split(center, center, mvec([2, 0]), Limits(box_points=1))


def test_check_sum_open_blowup(center, limits):
    report = check_sum_open(center, center, limits, witnesses=True)
    assert report.verdict is Verdict.SURJECTIVE
    assert report.mode is Mode.OPEN
    assert report.surjective
    assert report.statistics["targets"] == 3
    assert [d.m for d in report.decompositions] == [
        mvec([0, 2]),
        mvec([1, 1]),
        mvec([2, 0]),
    ]
    for d in report.decompositions:
        assert add(d.m1, d.m2) == d.m
        assert in_weight_set(center, d.m1) and in_weight_set(center, d.m2)


def test_check_sum_open_without_witnesses(center, limits):
    report = check_sum_open(center, center, limits)
    assert report.decompositions == []
    assert report.counterexamples == []


def test_check_sum_open_needs_convex(blowup2, center):
    concave = from_ray_values(blowup2, [0, 0, -1])
    with pytest.raises(PreconditionError):
        check_sum_open(center, concave)


def test_check_sum_complete_octagon(ample_a1a1, root_system, weyl, limits):
    report = check_sum_complete(
        ample_a1a1,
        ample_a1a1,
        root_system("A1xA1"),
        weyl("A1xA1"),
        limits,
        witnesses=True,
    )
    assert report.verdict is Verdict.SURJECTIVE
    assert report.mode is Mode.COMPLETE
    assert report.statistics["targets"] == 22
    assert len(report.decompositions) == 22
    for d in report.decompositions:
        assert add(d.m1, d.m2) == d.m


def test_check_sum_complete_needs_gg(blowup2, root_system, weyl, bundle_factory):
    rs = root_system("A1xA1")
    h = bundle_factory(blowup2, [0, 0, 1], rs)
    with pytest.raises(PreconditionError):
        check_sum_complete(h, h, rs, weyl("A1xA1"))


def test_equivalence_on_octagon(ample_a1a1, root_system, weyl, limits):
    report = check_equivalence(
        ample_a1a1, ample_a1a1, root_system("A1xA1"), weyl("A1xA1"), limits
    )
    assert report.agree
    assert report.open.verdict is Verdict.SURJECTIVE
    assert report.complete.verdict is Verdict.SURJECTIVE
    assert report.transfers == 22
    assert report.counterexample is None


def test_equivalence_needs_ample(center, root_system, weyl):
    with pytest.raises(PreconditionError):
        check_equivalence(center, center, root_system("A1xA1"), weyl("A1xA1"))


@pytest.mark.parametrize(
    "p,p_prime,coefficients",
    [
        ((3, 5), (0, 0), (3, 5)),
        ((-2, 3), (-2, 0), (0, 3)),
        ((1, -2), (0, -2), (1, 0)),
        ((-1, -1), (-1, -1), (0, 0)),
    ],
)
def test_descend_to_chamber(ample_a1a1, root_system, weyl, p, p_prime, coefficients):
    descent = descend_to_chamber(ample_a1a1, p, root_system("A1xA1"), weyl("A1xA1"))
    assert descent.p_prime == mvec(p_prime)
    assert descent.coefficients == coefficients
    assert len(descent.steps) == sum(coefficients)
    assert add(descent.p_prime, descent.coefficients) == mvec(p)


def test_descend_steps_follow_smallest_index(ample_a1a1, root_system, weyl):
    descent = descend_to_chamber(
        ample_a1a1, (3, 5), root_system("A1xA1"), weyl("A1xA1")
    )
    assert descent.steps == [0, 0, 0, 1, 1, 1, 1, 1]


def test_descend_preconditions(ample_a1a1, center, root_system, weyl):
    rs, group = root_system("A1xA1"), weyl("A1xA1")
    with pytest.raises(PreconditionError):
        descend_to_chamber(ample_a1a1, (-3, 0), rs, group)
    with pytest.raises(PreconditionError):
        descend_to_chamber(ample_a1a1, (Fraction(1, 2), 0), rs, group)
    with pytest.raises(PreconditionError):
        descend_to_chamber(center, (1, 1), rs, group)


def test_transfer_without_steps(ample_a1a1, root_system, weyl):
    transfer = transfer_decomposition(
        ample_a1a1,
        ample_a1a1,
        (-4, -2),
        (-2, -1),
        (-2, -1),
        root_system("A1xA1"),
        weyl("A1xA1"),
    )
    assert transfer.p == transfer.q == mvec([-2, -1])
    assert transfer.steps == []


def test_transfer_moves_f_j(ample_a1a1, root_system, weyl):
    transfer = transfer_decomposition(
        ample_a1a1,
        ample_a1a1,
        (1, -2),
        (-2, -1),
        (3, -1),
        root_system("A1xA1"),
        weyl("A1xA1"),
    )
    assert transfer.p == mvec([-1, -1])
    assert transfer.q == mvec([2, -1])
    assert transfer.steps == [0]
    assert add(transfer.p, transfer.q) == transfer.m


@pytest.mark.parametrize(
    "m,p0,q0",
    [
        ((0, 0), (-2, -1), (-2, -1)),
        ((1, -2), (1, -1), (0, -1)),
        ((-5, -2), (-2, -1), (-3, -1)),
    ],
)
def test_transfer_preconditions(ample_a1a1, root_system, weyl, m, p0, q0):
    with pytest.raises(PreconditionError):
        transfer_decomposition(
            ample_a1a1, ample_a1a1, m, p0, q0, root_system("A1xA1"), weyl("A1xA1")
        )


def test_wall_strip_holds(ample_a1a1, root_system, weyl, limits):
    report = check_wall_strip(
        ample_a1a1, 0, root_system("A1xA1"), weyl("A1xA1"), limits
    )
    assert report.outcome is Outcome.HOLDS
    assert report.vertices == [mvec([0, -2]), mvec([0, 2])]
    assert report.failures == []


def test_wall_strip_unsupported(center, root_system, weyl):
    report = check_wall_strip(center, 0, root_system("A1xA1"), weyl("A1xA1"))
    assert report.outcome is Outcome.UNSUPPORTED
    assert report.reason


def test_saturation(ample_a1a1, root_system, weyl, limits):
    report = check_saturation(
        ample_a1a1, ample_a1a1, root_system("A1xA1"), weyl("A1xA1"), limits
    )
    assert report.outcome is Outcome.HOLDS
    assert report.sumset_size == 22
    assert report.violations == []
    assert report.note == SATURATION_NOTE


def test_orthant_generation(ample_a1a1, root_system, weyl, limits):
    report = check_orthant_generation(
        ample_a1a1,
        root_system("A1xA1"),
        weyl("A1xA1"),
        limits,
        deep_samples=10,
        seed=7,
    )
    assert report.outcome is Outcome.HOLDS
    assert report.vertices_agree and report.points_agree
    assert report.descents_checked == 12
    assert report.failures == []


def test_orthant_generation_unsupported(center, root_system, weyl):
    report = check_orthant_generation(center, root_system("A1xA1"), weyl("A1xA1"))
    assert report.outcome is Outcome.UNSUPPORTED


def test_transfer_with_prebuilt_polytopes(ample_a1a1, root_system, weyl):
    rs, group = root_system("A1xA1"), weyl("A1xA1")
    args = (ample_a1a1, ample_a1a1, (1, -2), (-2, -1), (3, -1), rs, group)
    P = complete_polytope(weyl_extend(ample_a1a1, group))
    assert transfer_decomposition(*args, (P, P)) == transfer_decomposition(*args)


# Pairs per fan: the chamber and the blow-up carry the bulk of the grid.
PAIRS_PER_FAN = {0: 20, 1: 20, 2: 2, 3: 2}


def equivalence_pairs(label: str, subdivisions: int) -> list:
    pool = ample_values(label, subdivisions)
    pairs = list(combinations_with_replacement(pool, 2))
    return spread(pairs, PAIRS_PER_FAN[subdivisions])


def test_equivalence_grid_size():
    total = sum(
        len(equivalence_pairs(label, subdivisions))
        for label in RANK2_LABELS
        for subdivisions in range(4)
    )
    assert total >= 100


@pytest.mark.parametrize("subdivisions", range(4))
@pytest.mark.parametrize("label", RANK2_LABELS)
def test_equivalence_grid(
    label, subdivisions, root_system, weyl, bundle_factory, limits
):
    rs, group = root_system(label), weyl(label)
    fan = quadrant_fan(subdivisions)
    for h_values, k_values in equivalence_pairs(label, subdivisions):
        h = bundle_factory(fan, h_values, rs)
        k = bundle_factory(fan, k_values, rs)
        report = check_equivalence(h, k, rs, group, limits)
        assert report.agree, (h_values, k_values)
        assert report.open.surjective and report.complete.surjective
        assert report.counterexample is None


# Ample for A1xA1xA1 on the blow-up of A^3 at the origin: with values a, b, c on
# the e_i, the centre value d satisfies a + b + c < d and d < every pairwise sum.
BLOWUP3_AMPLE = [(-2, -2, -2, -5), (-3, -3, -3, -7), (-3, -3, -3, -8), (-2, -3, -4, -8)]

structure_instances = [
    (label, ("quadrant", subdivisions), values)
    for label in RANK2_LABELS
    for subdivisions in (0, 1)
    for values in spread(ample_values(label, subdivisions), 5)
] + [
    (label, ("chamber", 3), values)
    for label, count in (("A1xA1xA1", 8), ("A1xA2", 6), ("A3", 8))
    for values in chamber_ample_values(label, count)
] + [("A1xA1xA1", ("blowup", 3, 3), values) for values in BLOWUP3_AMPLE]


def _structure_fan(spec: tuple):
    if spec[0] == "quadrant":
        return quadrant_fan(spec[1])
    return catalog(*spec)


def test_structure_instances_size():
    assert len(structure_instances) >= 50
    assert {len(values) for _, _, values in structure_instances} >= {2, 3, 4}


@pytest.mark.parametrize(
    "label,fan_spec,values",
    structure_instances,
    ids=[f"{label}-{spec}-{values}" for label, spec, values in structure_instances],
)
def test_reduction_identities(
    label, fan_spec, values, root_system, weyl, bundle_factory, limits
):
    rs, group = root_system(label), weyl(label)
    h = bundle_factory(_structure_fan(fan_spec), values, rs)
    assert bundle_status(h, rs).ample
    report = check_orthant_generation(
        h, rs, group, limits, deep_samples=100, seed=5
    )
    assert report.outcome is Outcome.HOLDS
    assert report.vertices_agree and report.points_agree
    assert report.descents_checked >= 101
    assert report.failures == []
    for j in range(rs.rank):
        strip = check_wall_strip(h, j, rs, group, limits)
        assert strip.outcome is Outcome.HOLDS, j
        assert strip.vertices
        assert strip.failures == []
