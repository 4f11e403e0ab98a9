import logging
from collections.abc import Sequence
from fractions import Fraction

from symnorm.bundles import PLFunction, is_strictly_convex
from symnorm.exceptions import InvariantError, PreconditionError
from symnorm.lattice import add, mvec, sub
from symnorm.models import SplitWitness
from symnorm.registry import register

from .dim2 import split_triangle
from .utils import Trace, family_params, make_witness, prepare

logger = logging.getLogger(__name__)


def _normal_form(h: PLFunction, a: int) -> tuple[tuple[Fraction, ...], int]:
    """(alpha, b) with Q_h = alpha + {z >= 0, a (z_1 + z_2) + z_3 >= a b}."""
    alpha = tuple(h.value(e) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    excess = h.value((a, a, 1)) - (a * alpha[0] + a * alpha[1] + alpha[2])
    b = excess / a
    if b.denominator != 1:
        raise InvariantError(f"Integral parts must give a multiple of {a}, got {excess}.")
    return alpha, int(b)


@register(families=("skew",))
def split_simplex3(h: PLFunction, k: PLFunction, m: Sequence[Fraction]) -> SplitWitness:
    """Split m in Q_{h+k} on the rank-3 fan with extra ray (a, a, 1).

    After translating by (h(e_1), h(e_2), h(e_3)) the polyhedron only depends on
    s = z_1 + z_2 and t = z_3 through {s, t >= 0, a s + t >= a b}, a rank-2 region with
    vertices (b, 0) and (0, a b) and one side triangle of normal (a, 1). The split of
    (s, t) lifts back by giving the first summand as much of z_1 as it can take.

    Args:
        h: Strictly convex function on a skew(a) fan.
        k: Strictly convex function on the same fan; usually h itself.
        m: A point of Q_{h+k} on its coset.

    Raises:
        PreconditionError: If h or k is not strictly convex on a skew fan, or m is not
            in Q_{h+k}.
    """
    (a,) = family_params(h, "skew")
    if not (is_strictly_convex(h) and is_strictly_convex(k)):
        raise PreconditionError("split_simplex3 needs strictly convex h and k.")
    h0, k0, m0 = prepare(h, k, m)
    alpha_h, b_h = _normal_form(h0, a)
    alpha_k, b_k = _normal_form(k0, a)
    z = sub(sub(m0, alpha_h), alpha_k)
    s, t = int(z[0] + z[1]), int(z[2])
    total = b_h + b_k
    trace: Trace = [{"step": "project", "s": s, "t": t, "sizes": [b_h, b_k]}]
    if s >= total:
        trace.append({"step": "vertex_cone", "vertex": [total, 0]})
        s1, t1 = b_h, 0
    elif t >= a * total:
        trace.append({"step": "vertex_cone", "vertex": [0, a * total]})
        s1, t1 = 0, a * b_h
    else:
        y1 = split_triangle((a, 1), (b_h, b_k), (s - total, t - a * total), trace)
        s1, t1 = b_h + y1[0], a * b_h + y1[1]
    first = min(int(z[0]), s1)
    m1 = mvec((first, s1 - first, t1))
    logger.debug("Skew split of %s lifts (%d, %d) to %s", z, s1, t1, m1)
    return make_witness(
        "simplex3", h, k, m, add(add(m1, alpha_h), h.base_part), trace
    )
