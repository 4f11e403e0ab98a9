"""Built-in fan families.

Every constructor lists the rays e_1, ..., e_l first and appends the rays created by
its subdivisions in order, so callers can address rays by position.
"""

import logging

from .exceptions import FanError
from .fans import Fan, FanKind, star_subdivision, subdivide_at, validate_fan
from .lattice import NVec, unit_n

logger = logging.getLogger(__name__)


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise FanError(message)


def chamber_fan(rank: int) -> Fan:
    """The orthant sigma(e_1, ..., e_l) with its faces."""
    _check(rank >= 1, f"Rank must be positive, got {rank}.")
    rays = tuple(unit_n(rank, i) for i in range(rank))
    return Fan(rank, rays, (tuple(range(rank)),), FanKind.OPEN)


def blowup_fan(rank: int, r: int) -> Fan:
    """Blow-up of A^l along the orbit closure of sigma(e_1, ..., e_r)."""
    _check(2 <= r <= rank, f"Need 2 <= r <= l, got l={rank}, r={r}.")
    return star_subdivision(chamber_fan(rank), range(r))


def chain_fan(rank: int, r: int) -> Fan:
    """Successive blow-ups along sigma(e_1, e_2), sigma(e_2, e_3), ..., sigma(e_{r-1}, e_r)."""
    _check(2 <= r <= rank, f"Need 2 <= r <= l, got l={rank}, r={r}.")
    fan = chamber_fan(rank)
    for i in range(1, r):
        fan = star_subdivision(fan, (i - 1, i))
    return fan


def skew_fan(a: int) -> Fan:
    """Rank 3 fan with the extra ray u = (a, a, 1); smooth iff a = 1."""
    _check(a >= 1, f"Need a >= 1, got {a}.")
    rays = ((1, 0, 0), (0, 1, 0), (0, 0, 1), (a, a, 1))
    return Fan(3, rays, ((0, 1, 3), (0, 2, 3), (1, 2, 3)), FanKind.OPEN)


def tower_ray(rank: int, i: int) -> NVec:
    """v_i = i (e_1 + ... + e_{l-1}) + e_l."""
    return (i,) * (rank - 1) + (1,)


def tower_fan(rank: int, n: int) -> Fan:
    """Blow up the orthant at its centre, then n - 1 times at sigma(e_1, ..., e_{l-1}, v_{i-1}).

    The added rays are v_1, ..., v_n in this order.
    """
    _check(rank >= 2 and n >= 1, f"Need l >= 2 and n >= 1, got l={rank}, n={n}.")
    fan = star_subdivision(chamber_fan(rank), range(rank))
    for i in range(2, n + 1):
        base = [unit_n(rank, j) for j in range(rank - 1)]
        fan = subdivide_at(fan, base + [tower_ray(rank, i - 1)])
    return fan


def tilted_ray(rank: int) -> NVec:
    """w = e_1 + 2 (e_2 + ... + e_l)."""
    return (1,) + (2,) * (rank - 1)


def tilted_tower_fan(rank: int, n: int) -> Fan:
    """The tower fan subdivided once more at sigma(v_1, e_2, ..., e_l), adding w."""
    fan = tower_fan(rank, n)
    return subdivide_at(
        fan, [tower_ray(rank, 1)] + [unit_n(rank, j) for j in range(1, rank)]
    )


FAMILIES = {
    "chamber": chamber_fan,
    "blowup": blowup_fan,
    "chain": chain_fan,
    "skew": skew_fan,
    "tower": tower_fan,
    "tilted": tilted_tower_fan,
}

ALIASES: dict[str, tuple[str, tuple[int, ...]]] = {
    "ex1": ("blowup", ()),
    "ex1b": ("chain", ()),
    "ex2b": ("skew", ()),
    "ex3_1": ("tower", ()),
    "ex3_2": ("tilted", ()),
    "blowup2": ("blowup", (2, 2)),
}


def catalog(name: str, *params: int) -> Fan:
    """Build a named fan family member and validate it.

    Args:
        name: A family name from FAMILIES or an alias from ALIASES.
        params: The family's integer parameters.

    Returns:
        The validated fan.

    Raises:
        FanError: If the name is unknown, the parameters are out of range, or the
            constructed fan fails validation.
    """
    family, defaults = ALIASES.get(name, (name, ()))
    if family not in FAMILIES:
        raise FanError(
            f"Unknown fan family '{name}'. Known: {sorted(FAMILIES) + sorted(ALIASES)}"
        )
    try:
        fan = FAMILIES[family](*(params or defaults))
    except TypeError as e:
        raise FanError(f"Bad parameters {params} for family '{name}': {e}") from e
    report = validate_fan(fan)
    if not report.valid:
        raise FanError(f"Catalog fan '{name}{params}' is invalid: {report.violations}")
    logger.info("Built catalog fan %s%s with %d rays", name, params, len(fan.rays))
    return fan


def identify(fan: Fan) -> list[tuple[str, tuple[int, ...]]]:
    """Recognize catalog family members up to ray order.

    Several families can coincide (the full blow-up of A^3 is also a tower and a
    skew fan), so every match is returned.

    Returns:
        (family, params) pairs, empty if the fan belongs to no family.
    """
    if fan.kind is not FanKind.OPEN:
        return []
    rank = fan.rank
    candidates: list[tuple[str, tuple[int, ...]]] = [("chamber", (rank,))]
    extra = len(fan.rays) - rank
    if extra >= 1:
        candidates += [("blowup", (rank, r)) for r in range(2, rank + 1)]
        candidates += [("chain", (rank, r)) for r in range(2, rank + 1)]
        candidates.append(("tower", (rank, extra)))
        if extra >= 2:
            candidates.append(("tilted", (rank, extra - 1)))
        if rank == 3 and extra == 1:
            units = {(1, 0, 0), (0, 1, 0), (0, 0, 1)}
            u = next((r for r in fan.rays if r not in units), None)
            if u is not None and u[0] == u[1] and u[2] == 1:
                candidates.append(("skew", (u[0],)))
    matches = []
    for family, params in candidates:
        try:
            if FAMILIES[family](*params) == fan:
                matches.append((family, params))
        except FanError:
            continue
    return matches
