import logging
from collections.abc import Sequence
from fractions import Fraction
from typing import Any

from symnorm.bundles import PLFunction, from_ray_values, is_convex
from symnorm.catalog import identify
from symnorm.config import Limits
from symnorm.exceptions import (
    DimensionError,
    PolyhedronError,
    PreconditionError,
    SplitError,
    WitnessError,
)
from symnorm.lattice import (
    LatticeCoset,
    MVec,
    fractional_flag,
    integer_part,
    mvec,
    pair,
    sub,
    zero,
)
from symnorm.models import SplitWitness
from symnorm.normality import in_weight_set
from symnorm.polyhedra import HPolyhedron, vertices

logger = logging.getLogger(__name__)

Trace = list[dict[str, Any]]


def family_params(h: PLFunction, family: str) -> tuple[int, ...]:
    """Parameters of the catalog family the fan of h belongs to.

    Raises:
        PreconditionError: If the fan is not a member of the family.
    """
    for name, params in identify(h.fan):
        if name == family:
            return params
    raise PreconditionError(f"The fan is not a member of the '{family}' family.")


def shift(h: PLFunction, weight: Sequence[Fraction]) -> PLFunction:
    """h minus the linear function of the given weight, on the standard lattice."""
    return from_ray_values(
        h.fan, [v - pair(weight, ray) for ray, v in zip(h.fan.rays, h.ray_values)]
    )


def prepare(
    h: PLFunction, k: PLFunction, m: Sequence[Fraction]
) -> tuple[PLFunction, PLFunction, MVec]:
    """Check the common hypotheses and translate both functions to integral parts.

    Returns:
        (h0, k0, m0) with h0 = h - v_h, k0 = k - v_k and m0 = m - v_h - v_k, so that
        every linear part of h0 and k0 and the point m0 are integral.

    Raises:
        PreconditionError: If h and k live on different fans, either is not convex,
            or m is not a point of Q_{h+k} on its coset.
    """
    if h.fan != k.fan or h.fan.rays != k.fan.rays:
        raise PreconditionError("Both functions must live on the same fan.")
    if not (is_convex(h) and is_convex(k)):
        raise PreconditionError("Splitters need convex h and k.")
    m = mvec(m)
    if len(m) != h.fan.rank:
        raise DimensionError(f"Point {m} does not have rank {h.fan.rank}.")
    if not in_weight_set(h + k, m):
        raise PreconditionError(f"{m} is not a point of Q_(h+k) on its coset.")
    v_h, v_k = h.base_part, k.base_part
    return shift(h, v_h), shift(k, v_k), sub(sub(m, v_h), v_k)


def require_same(h: PLFunction, k: PLFunction) -> None:
    if h.ray_values != k.ray_values:
        raise PreconditionError("This splitter needs k = h.")


def make_witness(
    algorithm: str,
    h: PLFunction,
    k: PLFunction,
    m: Sequence[Fraction],
    m1: Sequence[Fraction],
    trace: Trace,
) -> SplitWitness:
    """Build the witness after re-verifying membership from the ray data.

    Raises:
        WitnessError: If m1 or m - m1 falls outside its weight set.
    """
    m, m1 = mvec(m), mvec(m1)
    witness = SplitWitness(algorithm, m, m1, sub(m, m1), trace)
    if not in_weight_set(h, witness.m1):
        raise WitnessError(algorithm, "m1 is not in Q_h", witness, trace)
    if not in_weight_set(k, witness.m2):
        raise WitnessError(algorithm, "m2 is not in Q_k", witness, trace)
    logger.debug("%s split %s = %s + %s", algorithm, m, witness.m1, witness.m2)
    return witness


def real_seed(
    h0: PLFunction, k0: PLFunction, m0: MVec, limits: Limits | None = None
) -> MVec:
    """A rational x with x in Q_h0 and m0 - x in Q_k0.

    The midpoint m0 / 2 is tried first, then the lexicographically first vertex of
    Q_h0 n (m0 - Q_k0).

    Raises:
        SplitError: If no real decomposition exists.
    """
    rays = h0.fan.rays
    midpoint = tuple(x / 2 for x in m0)
    inequalities = [(r, v) for r, v in zip(rays, h0.ray_values)] + [
        (tuple(-x for x in r), v - pair(m0, r)) for r, v in zip(rays, k0.ray_values)
    ]
    region = HPolyhedron(
        h0.fan.rank, tuple(inequalities), LatticeCoset(zero(len(m0)))
    )
    if region.contains(midpoint):
        return midpoint
    try:
        return vertices(region, limits)[0]
    except PolyhedronError:
        raise SplitError(f"No real decomposition of {m0} exists.") from None


def round_split(
    x: Sequence[Fraction],
    m: Sequence[Fraction],
    sum_indices: Sequence[int],
    sum_bounds: tuple[int, int],
    trace: Trace,
) -> MVec:
    """Round a real split m = x + (m - x) to a lattice split.

    Both sides are polyhedra of the shape {z_i >= lower_i, sum_{i in S} z_i >= bound}
    with integral data, x lies in the first and m - x in the second, and m is
    integral. Returns m1; the rounding keeps every coordinate of m1 between floor(x)
    and ceil(x).

    Raises:
        SplitError: If no cut index exists, which means x was not a real split.
    """
    y = sub(m, x)
    floor_x = [integer_part(v) for v in x]
    floor_y = [integer_part(v) for v in y]
    eps = [fractional_flag(v) for v in x]
    bound_x, bound_y = sum_bounds
    if sum(floor_y[i] for i in sum_indices) >= bound_y:
        trace.append({"step": "round", "case": "ceil_x"})
        return mvec(f + e for f, e in zip(floor_x, eps))
    base = sum(floor_x[i] for i in sum_indices)
    if base >= bound_x:
        trace.append({"step": "round", "case": "floor_x"})
        return mvec(floor_x)
    m1 = list(floor_x)
    for s, i in enumerate(sum_indices, start=1):
        m1[i] += eps[i]
        base += eps[i]
        if base == bound_x:
            trace.append({"step": "round", "case": "cut", "s": s})
            return mvec(m1)
    raise SplitError(f"No cut index rounds {tuple(x)}; it is not a real split.")
