"""Splitting on the tower fans: a chain of blow-ups of A^l at the rays
v_i = i (e_1 + ... + e_{l-1}) + e_l.

A point of Q_{h+k} that cannot be lowered along any f_i pairs tightly with e_l or
with one of the v_i. The face of Q_{h+k} cut out by that ray is the Minkowski sum of
the faces of Q_h and Q_k, and every such face is a slab

    {y >= alpha, A <= y_1 + ... + y_{l-1} <= B}

in the quotient lattice, with A missing on the face of v_n and B missing on the
face of e_l. A slab split is a rounding of a proportional real split; the number of
coordinates rounded up for the first summand is chosen so that both sums stay in
their ranges.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from symnorm.bundles import PLFunction, dominates
from symnorm.catalog import tower_ray
from symnorm.exceptions import InvariantError
from symnorm.lattice import (
    MVec,
    add,
    fractional_flag,
    integer_part,
    mvec,
    pair,
    sub,
    unit,
    unit_n,
)
from symnorm.models import SplitWitness
from symnorm.polyhedra import HPolyhedron, face_restriction, open_polyhedron
from symnorm.registry import register

from .utils import Trace, family_params, make_witness, prepare

logger = logging.getLogger(__name__)

Bound = Fraction | None


@dataclass(frozen=True)
class Slab:
    """{y >= alpha, lower <= sum(y) <= upper}; a missing bound is None."""

    alpha: MVec
    lower: Bound
    upper: Bound


def parse_slab(K: HPolyhedron) -> Slab:
    """Read a face polyhedron of a tower fan as a slab.

    Raises:
        InvariantError: If some inequality is neither a coordinate bound nor a bound
            on the coordinate sum.
    """
    alpha: list[Fraction | None] = [None] * K.rank
    lower: Bound = None
    upper: Bound = None
    for normal, bound in K.inequalities:
        support = [i for i, x in enumerate(normal) if x]
        if len(support) == 1 and normal[support[0]] > 0:
            (i,) = support
            value = bound / normal[i]
            alpha[i] = value if alpha[i] is None else max(alpha[i], value)
        elif len(support) == K.rank and len(set(normal)) == 1:
            value = bound / normal[0]
            if normal[0] > 0:
                lower = value if lower is None else max(lower, value)
            else:
                upper = value if upper is None else min(upper, value)
        else:
            raise InvariantError(f"Face inequality {normal} >= {bound} is not a slab bound.")
    if any(x is None for x in alpha):
        raise InvariantError("Face is not bounded below in every coordinate.")
    return Slab(tuple(alpha), lower, upper)  # type: ignore[arg-type]


def _at_least(value: Fraction, bound: Bound) -> bool:
    return bound is None or value >= bound


def _at_most(value: Fraction, bound: Bound) -> bool:
    return bound is None or value <= bound


def select_r(
    x: int, y: int, t: int, a: Bound, b: Bound, c: Bound, d: Bound
) -> tuple[int, int]:
    """Number r of rounded-up coordinates for the first summand.

    With [x] and [y] the sums of the floors of the two real summands, t the number of
    fractional coordinates and [a, b], [c, d] the sum ranges of the two slabs, r must
    satisfy 0 <= r <= t, a <= [x] + r <= b and c <= [y] + t - r <= d.

    Returns:
        (case, r) with case in 1, 2, 3.

    Raises:
        InvariantError: If the chosen r leaves one of the ranges.
    """
    fit = t if c is None else min(y + t - c, t)
    if b is None or t + x <= b:
        case, r = 1, fit
    elif c is not None and y + x + t <= b + c:
        case, r = 2, fit
    else:
        case, r = 3, b - x
    if not (
        0 <= r <= t
        and _at_least(x + r, a)
        and _at_most(x + r, b)
        and _at_least(y + t - r, c)
        and _at_most(y + t - r, d)
    ):
        raise InvariantError(
            f"Case {case} chose r={r} outside its range for "
            f"[x]={x}, [y]={y}, t={t}, a={a}, b={b}, c={c}, d={d}."
        )
    return case, int(r)


def _shifted(slab: Slab) -> tuple[Bound, Bound]:
    """Sum range of the slab translated to alpha = 0; the lower end is at least 0."""
    total = sum(slab.alpha)
    return (
        Fraction(0) if slab.lower is None else max(slab.lower - total, Fraction(0)),
        None if slab.upper is None else slab.upper - total,
    )


def split_slab(h: Slab, k: Slab, z: MVec, trace: Trace) -> MVec:
    """Split a lattice point z of the slab h + k into a point of h and one of k.

    Returns:
        The summand in h.

    Raises:
        InvariantError: If the real split or the choice of r fails.
    """
    z0 = sub(sub(z, h.alpha), k.alpha)
    a, b = _shifted(h)
    c, d = _shifted(k)
    total = sum(z0)
    sigma = a if d is None else max(a, total - d)
    ceiling = total - c if b is None else min(b, total - c)
    if sigma > ceiling:
        raise InvariantError(f"No real split of {z} between the two face slabs.")
    x = tuple(v * sigma / total for v in z0) if total else z0
    floors = [integer_part(v) for v in x]
    eps = [fractional_flag(v) for v in x]
    floor_y = sum(integer_part(v) for v in sub(z0, x))
    case, r = select_r(sum(floors), floor_y, sum(eps), a, b, c, d)
    m1 = list(floors)
    raised = 0
    for i, e in enumerate(eps):
        if raised == r:
            break
        m1[i] += e
        raised += e
    trace.append({"step": "slab", "sum": sigma, "case": case, "r": r})
    return add(mvec(m1), h.alpha)


def _reduce(hk: PLFunction, m: MVec, trace: Trace) -> tuple[MVec, list[int]]:
    """Lower m along each f_i while it stays in Q_{h+k}."""
    rank = len(m)
    offsets = [0] * rank
    for i in range(rank):
        f = unit(rank, i)
        while dominates(hk, sub(m, f)):
            m = sub(m, f)
            offsets[i] += 1
    trace.append({"step": "reduce", "offsets": offsets})
    return m, offsets


@register(families=("tower",))
def split_zn(h: PLFunction, k: PLFunction, m: Sequence[Fraction]) -> SplitWitness:
    """Split m in Q_{h+k} on a tower fan by passing to the face of a tight ray.

    Raises:
        PreconditionError: If the fan or the functions do not qualify, or m is not in
            Q_{h+k}.
        InvariantError: If a minimal point has no tight ray.
    """
    rank, n = family_params(h, "tower")
    h0, k0, m0 = prepare(h, k, m)
    hk0 = h0 + k0
    trace: Trace = []
    low, offsets = _reduce(hk0, m0, trace)
    candidates = [unit_n(rank, rank - 1)] + [tower_ray(rank, i) for i in range(1, n + 1)]
    ray = next((r for r in candidates if pair(low, r) == hk0.value(r)), None)
    if ray is None:
        raise InvariantError(f"Minimal point {low} pairs tightly with no ray.")
    trace.append({"step": "tight_ray", "ray": list(ray)})
    face_h = face_restriction(open_polyhedron(h0), ray, h0.value(ray))
    face_k = face_restriction(open_polyhedron(k0), ray, k0.value(ray))
    face_hk = face_restriction(open_polyhedron(hk0), ray, hk0.value(ray))
    x = split_slab(
        parse_slab(face_h.polyhedron),
        parse_slab(face_k.polyhedron),
        face_hk.project(low),
        trace,
    )
    m1 = add(face_h.lift(x), mvec(offsets))
    return make_witness("zn", h, k, m, add(m1, h.base_part), trace)
