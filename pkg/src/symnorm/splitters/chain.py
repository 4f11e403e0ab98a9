import logging
from collections.abc import Sequence
from fractions import Fraction

from symnorm.bundles import PLFunction
from symnorm.lattice import add, fractional_flag, integer_part, mvec
from symnorm.models import SplitWitness
from symnorm.registry import register

from .utils import Trace, family_params, make_witness, prepare, require_same

logger = logging.getLogger(__name__)


@register(families=("chain",), same_bundle=True)
def split_chain_blowup(
    h: PLFunction, k: PLFunction, m: Sequence[Fraction]
) -> SplitWitness:
    """Split m in Q_{2h} on the chain of blow-ups along sigma(e_{i-1}, e_i), i <= r.

    With m' = m / 2 the first summand takes floor(m'_i) plus its fractional flag at
    odd positions up to s (s = r for odd r, r - 1 otherwise) and floor(m'_i) elsewhere,
    so every consecutive pair z_{i-1} + z_i gets one rounded-up half.

    Raises:
        PreconditionError: If k differs from h or the fan is not a chain fan.
    """
    _, r = family_params(h, "chain")
    require_same(h, k)
    _, _, m0 = prepare(h, k, m)
    s = r if r % 2 else r - 1
    half = [x / 2 for x in m0]
    m1 = mvec(
        integer_part(x) + (fractional_flag(x) if i % 2 == 0 and i < s else 0)
        for i, x in enumerate(half)
    )
    trace: Trace = [{"step": "alternate", "s": s}]
    logger.debug("Chain split of %s with s=%d", m0, s)
    return make_witness("chain", h, k, m, add(m1, h.base_part), trace)
