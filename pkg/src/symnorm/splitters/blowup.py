import logging
from collections.abc import Sequence
from fractions import Fraction

from symnorm.bundles import PLFunction
from symnorm.config import Limits
from symnorm.lattice import add
from symnorm.models import SplitWitness
from symnorm.registry import register

from .utils import Trace, family_params, make_witness, prepare, real_seed, round_split

logger = logging.getLogger(__name__)


@register(families=("blowup",))
def split_blowup(
    h: PLFunction, k: PLFunction, m: Sequence[Fraction], limits: Limits | None = None
) -> SplitWitness:
    """Split m in Q_{h+k} on the blow-up of A^l along sigma(e_1, ..., e_r).

    Q_h is {z_i >= h(e_i), z_1 + ... + z_r >= h(u)} with u = e_1 + ... + e_r. A real
    split m = x + (m - x) is rounded coordinatewise: ceil(x) if floor(m - x) still
    meets the sum bound of k, floor(x) if it meets the one of h, and otherwise floor(x)
    with the fractional coordinates among 1..s rounded up, for the first s that makes
    the sum of m1 over 1..r exactly h(u).

    Args:
        h: Convex function on a blowup(l, r) fan.
        k: Convex function on the same fan.
        m: A point of Q_{h+k} on its coset.
        limits: Caps for the vertex search used when m/2 is not a real split.

    Returns:
        The validated SplitWitness.

    Raises:
        PreconditionError: If the fan or the functions do not qualify, or m is not in
            Q_{h+k}.
        SplitError: If no real split exists.
    """
    rank, r = family_params(h, "blowup")
    h0, k0, m0 = prepare(h, k, m)
    u = (1,) * r + (0,) * (rank - r)
    trace: Trace = []
    x = real_seed(h0, k0, m0, limits)
    trace.append({"step": "seed", "x": x})
    m1 = round_split(
        x, m0, range(r), (int(h0.value(u)), int(k0.value(u))), trace
    )
    return make_witness("blowup", h, k, m, add(m1, h.base_part), trace)
