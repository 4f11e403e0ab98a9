"""Rank-2 splitting through vertex cones and side triangles.

Two functions strictly convex on a common rank-2 fan have polyhedra with the same
edge directions. Q_{h+k} is covered by the vertex cones p + sigma(f_1, f_2) and by
one side triangle per edge; the side triangle of an edge with normal (a1, a2) is the
corner of the staircase minus the dilate Tri((a1, a2), K) of

    Tri(a, K) = {y <= 0, a1 y1 + a2 y2 >= -K a1 a2},

and the dilation factors of h and k add up to that of h + k.
"""

import logging
import math
from collections.abc import Sequence
from fractions import Fraction

from symnorm.bundles import PLFunction, is_strictly_convex
from symnorm.exceptions import InvariantError, PreconditionError
from symnorm.fans import is_proper_over_orthant
from symnorm.lattice import MVec, add, mvec, sub
from symnorm.models import SplitWitness
from symnorm.registry import register

from .utils import Trace, make_witness, prepare, round_split

logger = logging.getLogger(__name__)

Point2 = tuple[int, int]


def _in_triangle(a: Point2, K: int, y: Point2) -> bool:
    return y[0] <= 0 and y[1] <= 0 and a[0] * y[0] + a[1] * y[1] >= -K * a[0] * a[1]


def split_triangle(
    a: Point2,
    ks: Point2,
    y: Point2,
    trace: Trace,
    depth: int = 0,
    limit: int | None = None,
) -> Point2:
    """Split an integral y in Tri(a, k1 + k2) as y1 + y2 with y_j in Tri(a, k_j).

    For a = (1, 1) the rounding of the proportional split y k1 / (k1 + k2) is used.
    For a1 > a2 the line y1 + y2 = -K a2 cuts off the isoceles triangle
    Tri((1, 1), K a2); the rest is mapped by u = (y1, y1 + y2 + K a2) onto
    Tri((a1 - a2, a2), K). a2 > a1 is the mirror image. Only reductions count towards
    ``depth``, which stays below a1 + a2 of the outermost normal.

    Returns:
        y1.

    Raises:
        InvariantError: If y is not in the triangle, a is not primitive or the
            reduction depth exceeds its bound.
    """
    a1, a2 = a
    k1, k2 = ks
    total = k1 + k2
    if math.gcd(a1, a2) != 1 or min(a1, a2) < 1:
        raise InvariantError(f"Triangle normal {a} is not a primitive positive vector.")
    if not _in_triangle(a, total, y):
        raise InvariantError(f"{y} is not in the triangle of normal {a} and size {total}.")
    limit = a1 + a2 if limit is None else limit
    if depth > limit:
        raise InvariantError(f"Triangle recursion exceeded depth {limit}.")
    if a1 == a2:
        return _split_isoceles(ks, y, trace)
    if a2 > a1:
        trace.append({"step": "mirror", "normal": [a1, a2]})
        y1 = split_triangle((a2, a1), ks, (y[1], y[0]), trace, depth, limit)
        return (y1[1], y1[0])
    if y[0] + y[1] >= -total * a2:
        trace.append({"step": "cut", "normal": [a1, a2], "side": "isoceles"})
        return _split_isoceles((k1 * a2, k2 * a2), y, trace)
    trace.append({"step": "cut", "normal": [a1, a2], "side": "reduced"})
    u = (y[0], y[0] + y[1] + total * a2)
    u1 = split_triangle((a1 - a2, a2), ks, u, trace, depth + 1, limit)
    return (u1[0], u1[1] - u1[0] - k1 * a2)


def _split_isoceles(ks: Point2, y: Point2, trace: Trace) -> Point2:
    k1, k2 = ks
    if k1 + k2 == 0:
        return (0, 0)
    x = tuple(Fraction(v * k1, k1 + k2) for v in y)
    m1 = round_split(x, mvec(y), (0, 1), (-k1, -k2), trace)
    return (int(m1[0]), int(m1[1]))


def _staircase(h: PLFunction) -> tuple[list[int], list[tuple[int, int]]]:
    """Maximal cones ordered from e_1 to e_2 and the rays between consecutive ones."""
    fan = h.fan

    def slope(ray: Sequence[int]) -> Fraction:
        return Fraction(ray[1], ray[0] + ray[1])

    order = sorted(
        range(len(fan.max_cones)),
        key=lambda c: min(slope(fan.rays[i]) for i in fan.max_cones[c]),
    )
    shared = []
    for c, d in zip(order, order[1:]):
        (common,) = set(fan.max_cones[c]) & set(fan.max_cones[d])
        shared.append(fan.rays[common])
    return order, shared


@register(families=("rank2",))
def split_dim2(h: PLFunction, k: PLFunction, m: Sequence[Fraction]) -> SplitWitness:
    """Split m in Q_{h+k} for h, k strictly convex on a common rank-2 fan.

    A point in a vertex cone of Q_{h+k} splits along the linear parts of that cone.
    Any other point lies in the side triangle of the edge whose x_1-range contains it
    and is split by the triangle engine.

    Raises:
        PreconditionError: If the fan is not a rank-2 fan proper over the quadrant,
            h or k is not strictly convex, or m is not in Q_{h+k}.
        InvariantError: If the side triangle cannot be located.
    """
    if h.fan.rank != 2 or not is_proper_over_orthant(h.fan):
        raise PreconditionError("split_dim2 needs a rank-2 fan proper over the quadrant.")
    if not (is_strictly_convex(h) and is_strictly_convex(k)):
        raise PreconditionError("split_dim2 needs strictly convex h and k.")
    h0, k0, m0 = prepare(h, k, m)
    order, shared = _staircase(h0)
    parts_h = [h0.part(c) for c in order]
    parts_k = [k0.part(c) for c in order]
    parts = [add(p, q) for p, q in zip(parts_h, parts_k)]
    trace: Trace = []
    for t, p in enumerate(parts):
        if all(x >= 0 for x in sub(m0, p)):
            trace.append({"step": "vertex_cone", "cone": order[t]})
            return make_witness("dim2", h, k, m, add(parts_h[t], h.base_part), trace)
    t = next(
        (
            t
            for t in range(len(parts) - 1)
            if parts[t][0] <= m0[0] <= parts[t + 1][0]
        ),
        None,
    )
    if t is None:
        raise InvariantError(f"No side triangle of Q_(h+k) contains {m0}.")
    a = shared[t]
    sizes = []
    corners: list[MVec] = []
    for p in (parts_h, parts_k):
        width, height = p[t + 1][0] - p[t][0], p[t][1] - p[t + 1][1]
        K = width / a[1]
        if K.denominator != 1 or height != K * a[0]:
            raise InvariantError(f"Edge {p[t]} -> {p[t + 1]} is not a dilate of normal {a}.")
        sizes.append(int(K))
        corners.append((p[t + 1][0], p[t][1]))
    y = sub(sub(m0, corners[0]), corners[1])
    trace.append({"step": "triangle", "edge": t, "normal": list(a), "sizes": sizes})
    y1 = split_triangle(
        (a[0], a[1]), (sizes[0], sizes[1]), (int(y[0]), int(y[1])), trace
    )
    m1 = add(add(corners[0], mvec(y1)), h.base_part)
    return make_witness("dim2", h, k, m, m1, trace)
