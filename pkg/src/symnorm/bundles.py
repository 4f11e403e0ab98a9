"""Piecewise-linear support functions, their Weyl extensions and convexity criteria.

A function is stored by its values on the rays of a simplicial fan. The linear part
on each maximal cone is solved exactly and cached on the instance.
"""

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .exceptions import BundleError, FanError, InvariantError
from .fans import Fan, base_cone_index, symmetrize
from .lattice import (
    MVec,
    NVec,
    as_fraction,
    is_integral,
    pair,
    solve_linear_form,
    sub,
)
from .roots import (
    RestrictedRootSystem,
    SphericalLattice,
    WeylGroup,
    act_n,
    is_dominant,
    is_regular,
)

logger = logging.getLogger(__name__)

RayValues = Sequence[int | str | Fraction] | Mapping[int | str, int | str | Fraction]


@dataclass(frozen=True)
class PLFunction:
    """A function linear on every cone of a simplicial fan.

    Attributes:
        fan: The fan of definition.
        ray_values: h(ray) for every ray, aligned with ``fan.rays``.
        linear_parts: h restricted to each maximal cone, aligned with ``fan.max_cones``.
        lattice: The lattice every linear part must lie in.
    """

    fan: Fan
    ray_values: tuple[Fraction, ...]
    linear_parts: tuple[MVec, ...]
    lattice: SphericalLattice

    def value(self, ray: Sequence[int]) -> Fraction:
        return self.ray_values[self.fan.ray_index(ray)]

    def part(self, cone_index: int) -> MVec:
        return self.linear_parts[cone_index]

    @property
    def base_part(self) -> MVec:
        """The linear part on the designated base cone; it represents the weight coset."""
        return self.linear_parts[base_cone_index(self.fan)]

    def __add__(self, other: "PLFunction") -> "PLFunction":
        if other.fan != self.fan or other.fan.rays != self.fan.rays:
            raise BundleError("Functions on different fans cannot be added.")
        return from_ray_values(
            self.fan,
            [a + b for a, b in zip(self.ray_values, other.ray_values)],
            self.lattice,
        )


@dataclass(frozen=True)
class CompletePLFunction(PLFunction):
    """The Weyl-invariant extension h^c on the symmetrized fan.

    Attributes:
        weyl: The group the function is invariant under.
        base: The function on the open fan it extends.
    """

    weyl: WeylGroup | None = field(default=None, repr=False, compare=False)
    base: PLFunction | None = field(default=None, repr=False, compare=False)


def _normalize_values(fan: Fan, values: RayValues) -> tuple[Fraction, ...]:
    if isinstance(values, Mapping):
        out: dict[int, Fraction] = {}
        for key, value in values.items():
            index = int(key)
            if not 0 <= index < len(fan.rays):
                raise BundleError(f"Value given for missing ray index {index}.")
            out[index] = as_fraction(value)
        missing = sorted(set(range(len(fan.rays))) - set(out))
        if missing:
            raise BundleError(f"No values given for ray indices {missing}.")
        return tuple(out[i] for i in range(len(fan.rays)))
    if len(values) != len(fan.rays):
        raise BundleError(
            f"Expected {len(fan.rays)} ray values, got {len(values)}."
        )
    return tuple(as_fraction(v) for v in values)


def from_ray_values(
    fan: Fan, values: RayValues, lattice: SphericalLattice | None = None
) -> PLFunction:
    """Build a piecewise-linear function from its ray values.

    Args:
        fan: A fan whose maximal cones are full-dimensional and simplicial.
        values: One value per ray, as a sequence in ray order or a mapping from ray
            index to value.
        lattice: Lattice the linear parts must lie in. Defaults to M.

    Returns:
        The validated PLFunction.

    Raises:
        BundleError: If values are missing, a linear part leaves the lattice, or two
            linear parts differ by a non-integral weight.
    """
    lattice = lattice or SphericalLattice.standard(fan.rank)
    ray_values = _normalize_values(fan, values)
    parts: list[MVec] = []
    for cone in fan.max_cones:
        try:
            part = solve_linear_form(
                [fan.rays[i] for i in cone], [ray_values[i] for i in cone]
            )
        except Exception as e:
            raise BundleError(f"Cannot solve the linear part on cone {cone}: {e}") from e
        if not lattice.contains(part):
            raise BundleError(
                f"Linear part {_fmt(part)} on cone {cone} is not in the lattice."
            )
        parts.append(part)
    for (a, pa), (b, pb) in combinations(enumerate(parts), 2):
        if not is_integral(sub(pa, pb)):
            raise BundleError(
                f"Linear parts on cones {fan.max_cones[a]} and {fan.max_cones[b]} "
                "differ by a non-integral weight."
            )
    return PLFunction(fan, ray_values, tuple(parts), lattice)


def linear_function(fan: Fan, weight: Sequence[Fraction], lattice=None) -> PLFunction:
    """The linear function m -> pair(weight, .) on the given fan."""
    return from_ray_values(fan, [pair(weight, r) for r in fan.rays], lattice)


def _fmt(m: Sequence[Fraction]) -> str:
    return "(" + ", ".join(str(x) for x in m) + ")"


def evaluate(h: PLFunction, v: Sequence[int]) -> Fraction:
    """h(v) via the linear part of any maximal cone containing v.

    Raises:
        BundleError: If v lies outside the support of the fan.
    """
    containing = h.fan.cones_containing(v)
    if not containing:
        raise BundleError(f"{tuple(v)} lies outside the support of the fan.")
    return pair(h.linear_parts[containing[0]], v)


def evaluate_c(hc: CompletePLFunction, v: Sequence[int]) -> Fraction:
    """Evaluate the Weyl extension; weyl_extend has checked it is W-invariant."""
    return evaluate(hc, v)


def is_convex(h: PLFunction) -> bool:
    """pair(h|cone, ray) >= h(ray) for every maximal cone and every ray."""
    return convexity_violation(h) is None


def is_strictly_convex(h: PLFunction) -> bool:
    """Convex with pairwise distinct linear parts."""
    return is_convex(h) and len(set(h.linear_parts)) == len(h.linear_parts)


@dataclass(frozen=True)
class ConvexityViolation:
    """A certificate that h is not convex.

    Attributes:
        cone_index: Maximal cone whose linear part undershoots a ray value.
        ray_index: The ray it undershoots.
        v: The ray generator.
        v_prime: A vector in the cone with h(v + v_prime) < h(v) + h(v_prime).
    """

    cone_index: int
    ray_index: int
    v: NVec
    v_prime: NVec


def convexity_violation(h: PLFunction) -> ConvexityViolation | None:
    """A concrete violating pair for the convexity inequality, or None if convex."""
    fan = h.fan
    for c, part in enumerate(h.linear_parts):
        for t, ray in enumerate(fan.rays):
            if pair(part, ray) >= h.ray_values[t]:
                continue
            cone = fan.cones[c]
            direction = tuple(sum(col) for col in zip(*cone.rays))
            scale = 1
            for _ in range(64):
                v_prime = tuple(scale * x for x in direction)
                if cone.contains(tuple(a + b for a, b in zip(ray, v_prime))):
                    logger.debug("Convexity fails on cone %d at ray %s", c, ray)
                    return ConvexityViolation(c, t, ray, v_prime)
                scale *= 2
            raise BundleError(f"Could not certify the violation at ray {ray}.")
    return None


@dataclass(frozen=True)
class BundleStatus:
    """Generation and ampleness flags of a function.

    Attributes:
        gg: Globally generated.
        ample: Ample.
    """

    gg: bool
    ample: bool


def bundle_status(h: PLFunction, rs: RestrictedRootSystem | None = None) -> BundleStatus:
    """Generation and ampleness of the bundle attached to h.

    With a root system both conditions additionally require every linear part to be
    dominant (generation) or regular (ampleness). Without one only convexity is
    tested.
    """
    gg = is_convex(h)
    ample = gg and len(set(h.linear_parts)) == len(h.linear_parts)
    if rs is not None:
        gg = gg and all(is_dominant(rs, p) for p in h.linear_parts)
        ample = ample and all(is_regular(rs, p) for p in h.linear_parts)
    logger.info("Bundle status: gg=%s ample=%s", gg, ample)
    return BundleStatus(gg=gg, ample=ample)


def _check_invariant(hc: PLFunction, weyl: WeylGroup) -> None:
    """Every w in W maps rays to rays of equal value."""
    for w_n in weyl.n_elements:
        for ray, value in zip(hc.fan.rays, hc.ray_values):
            image = act_n(w_n, ray)
            try:
                image_value = hc.value(image)
            except FanError:
                raise InvariantError(
                    f"Ray {image} is missing from the extended fan."
                ) from None
            if image_value != value:
                raise InvariantError(
                    f"Extension takes {value} on {ray} but {image_value} on {image}."
                )


def weyl_extend(h: PLFunction, weyl: WeylGroup) -> CompletePLFunction:
    """The W-invariant extension h^c with h^c|(w cone) = w (h|cone).

    Raises:
        FanError: If the fan cannot be symmetrized.
        BundleError: If the transported values are inconsistent.
        InvariantError: If the extension is not W-invariant.
    """
    fan_c = symmetrize(h.fan, weyl)
    values: dict[NVec, Fraction] = {}
    for w_n in weyl.n_elements:
        for ray, value in zip(h.fan.rays, h.ray_values):
            image = act_n(w_n, ray)
            if values.setdefault(image, value) != value:
                raise BundleError(f"Inconsistent values transported onto ray {image}.")
    extended = from_ray_values(fan_c, [values[r] for r in fan_c.rays], h.lattice)
    _check_invariant(extended, weyl)
    return CompletePLFunction(
        fan=fan_c,
        ray_values=extended.ray_values,
        linear_parts=extended.linear_parts,
        lattice=extended.lattice,
        weyl=weyl,
        base=h,
    )


def divisor_function(fan: Fan, ray_index: int) -> PLFunction:
    """The function with value -1 on the given ray and 0 on every other ray.

    Raises:
        FanError: If the ray index does not exist.
    """
    if not 0 <= ray_index < len(fan.rays):
        raise FanError(f"Ray index {ray_index} is not a ray of the fan.")
    return from_ray_values(fan, [-int(i == ray_index) for i in range(len(fan.rays))])


def decompose_weight_plus_divisors(h: PLFunction, weight: Sequence[Fraction]) -> dict[int, int]:
    """Coefficients a with h = weight + sum_ray a[ray] d^ray.

    Returns:
        Map from ray index to the non-negative integer coefficient.

    Raises:
        BundleError: If some coefficient is negative or non-integral.
    """
    weight = tuple(as_fraction(x) for x in weight)
    coefficients: dict[int, int] = {}
    for i, (ray, value) in enumerate(zip(h.fan.rays, h.ray_values)):
        a = pair(weight, ray) - value
        if a < 0:
            raise BundleError(f"Weight {_fmt(weight)} is below h on ray {ray}.")
        if a.denominator != 1:
            raise BundleError(f"Coefficient {a} on ray {ray} is not an integer.")
        coefficients[i] = int(a)
    return coefficients


def dominates(h: PLFunction, m: Sequence[Fraction]) -> bool:
    """True iff pair(m, ray) >= h(ray) for every ray of the fan."""
    return all(pair(m, ray) >= value for ray, value in zip(h.fan.rays, h.ray_values))
