import logging

from symnorm.bundles import PLFunction, is_strictly_convex
from symnorm.catalog import tilted_ray, tower_ray
from symnorm.config import Limits
from symnorm.exceptions import InvariantError, PreconditionError
from symnorm.lattice import pair, unit_n
from symnorm.models import CheckReport
from symnorm.normality import check_sum_open

from .utils import family_params

logger = logging.getLogger(__name__)


def tilted_conditions(h: PLFunction) -> dict[str, bool]:
    """The ampleness inequalities of the tilted tower in normalized values.

    With lam the weight taking the values h(e_j) on the e_j, a_i = h(v_i) - <lam, v_i>
    and b = h(w) - <lam, w>. The inequalities indexed by i are listed for 2 <= i <= n.
    """
    rank, n = family_params(h, "tilted")
    lam = tuple(h.value(unit_n(rank, j)) for j in range(rank))
    a = {}
    for i in range(1, n + 1):
        v = tower_ray(rank, i)
        a[i] = h.value(v) - pair(lam, v)
    b = h.value(tilted_ray(rank)) - pair(lam, tilted_ray(rank))
    conditions = {
        "b > a_1 > 0": b > a[1] > 0,
        "2a_1 > b": 2 * a[1] > b,
    }
    for i in range(2, n + 1):
        bound = (2 * i - 1) * a[1]
        conditions[f"a_{i} + {i - 1}b < {2 * i - 1}a_1"] = a[i] + (i - 1) * b < bound
        conditions[f"{i}a_1 > a_{i}"] = i * a[1] > a[i]
    return conditions


def check_tilted_tower(h: PLFunction, limits: Limits | None = None) -> CheckReport:
    """Check Q_{2h} = Q_h + Q_h for an ample h on a tilted tower fan.

    The decision is made by the brute-force open check; the ampleness inequalities
    are reported alongside in ``conditions``. They are necessary for strict
    convexity, so a strictly convex h failing one is an internal error.

    Raises:
        PreconditionError: If the fan is not a tilted tower or h is not strictly
            convex.
        InvariantError: If h is strictly convex but fails an inequality.
    """
    conditions = tilted_conditions(h)
    if not is_strictly_convex(h):
        raise PreconditionError("check_tilted_tower needs an ample h.")
    failed = [name for name, holds in conditions.items() if not holds]
    if failed:
        raise InvariantError(f"Strictly convex h fails the inequalities {failed}.")
    report = check_sum_open(h, h, limits)
    report.conditions.update(conditions)
    logger.info("Tilted tower check: %s", report.verdict)
    return report
