"""Constructive splitters: explicit decompositions m = m1 + m2 on the catalog fans.

All splitters follow a basic pattern:

1. Take (h, k, m) and check the hypotheses of their family through
    ``utils.prepare``, raising PreconditionError when they fail.
2. Work on the translates h - v_h and k - v_k, whose linear parts are integral.
3. Return ``utils.make_witness(...)``, which re-verifies both summands against the
    ray data and raises WitnessError otherwise.
4. Register with the registry by decorating the function with ``register``; the
    algorithm name is the module name.
"""

import logging
from collections.abc import Sequence
from fractions import Fraction

from symnorm.bundles import PLFunction
from symnorm.catalog import identify
from symnorm.exceptions import PreconditionError
from symnorm.models import SplitWitness
from symnorm.registry import registry

# Required for splitters to register
from .blowup import split_blowup  # noqa: F401
from .chain import split_chain_blowup  # noqa: F401
from .dim2 import split_dim2  # noqa: F401
from .simplex3 import split_simplex3  # noqa: F401
from .tilted import check_tilted_tower  # noqa: F401
from .zn import split_zn  # noqa: F401

logger = logging.getLogger(__name__)


def fan_families(h: PLFunction) -> list[str]:
    """Family tags of the fan of h, as used by the splitter registry."""
    families = [name for name, _ in identify(h.fan)]
    if h.fan.rank == 2:
        families.append("rank2")
    return families


def split(
    h: PLFunction,
    k: PLFunction | None,
    m: Sequence[Fraction],
    algorithm: str = "auto",
) -> SplitWitness:
    """Split m with the named splitter, or with the first applicable one for "auto".

    Args:
        h: First function.
        k: Second function; None means k = h.
        m: A point of Q_{h+k}.
        algorithm: A registered algorithm name or "auto".

    Raises:
        RegistryError: If the algorithm is unknown.
        PreconditionError: If no splitter applies.
    """
    k = h if k is None else k
    if algorithm != "auto":
        return registry.get(algorithm).splitter(h, k, m)
    candidates = registry.for_families(fan_families(h))
    reasons = []
    for spec in candidates:
        if spec.same_bundle and k.ray_values != h.ray_values:
            continue
        try:
            return spec.splitter(h, k, m)
        except PreconditionError as e:
            logger.debug("Splitter %s does not apply: %s", spec.name, e)
            reasons.append(f"{spec.name}: {e}")
    raise PreconditionError(f"No splitter applies. {'; '.join(reasons)}".strip())
