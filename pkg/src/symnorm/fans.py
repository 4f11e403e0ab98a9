"""Simplicial fans in N, their validation, star subdivision, and Weyl symmetrization."""

import logging
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from itertools import combinations

from .exceptions import FanError
from .lattice import (
    IntMatrix,
    MVec,
    NVec,
    determinant,
    extreme_rays,
    inverse,
    is_lattice_basis,
    is_primitive,
    pair,
    primitive,
    transpose,
    unimodular_completion,
)
from .roots import WeylGroup, act_n

logger = logging.getLogger(__name__)


class FanKind(str, Enum):
    """Support type of a fan."""

    OPEN = "open"
    COMPLETE = "complete"


@dataclass(frozen=True)
class Cone:
    """A simplicial cone spanned by primitive rays.

    Attributes:
        rays: The ray generators, sorted lexicographically.
    """

    rays: tuple[NVec, ...]

    def __post_init__(self):
        """Canonicalize ray order and check primitivity."""
        for ray in self.rays:
            if not is_primitive(ray):
                raise FanError(f"Ray {ray} is not primitive.")
        object.__setattr__(self, "rays", tuple(sorted(set(self.rays))))

    @property
    def dim(self) -> int:
        return len(self.rays)

    @cached_property
    def facet_normals(self) -> tuple[MVec, ...]:
        """For a full-dimensional cone, the dual basis u_i with pair(u_i, r_j) = d_ij."""
        if self.dim != len(self.rays[0]) or determinant(self.rays) == 0:
            raise FanError(f"Cone {self.rays} is not full-dimensional simplicial.")
        return inverse(transpose(self.rays))

    def contains(self, v: Sequence[int | Fraction]) -> bool:
        """True iff v is a non-negative combination of the rays (full-dimensional)."""
        return all(pair(u, v) >= 0 for u in self.facet_normals)  # type: ignore[arg-type]

    def faces(self) -> list["Cone"]:
        return [
            Cone(subset)
            for k in range(self.dim + 1)
            for subset in combinations(self.rays, k)
        ]


@dataclass(frozen=True, eq=False)
class Fan:
    """A fan of simplicial cones given by its maximal cones.

    Attributes:
        rank: The rank l of N.
        rays: Ray generators; cones refer to them by index.
        max_cones: Each maximal cone as a sorted tuple of ray indices.
        kind: Open (supported in the orthant) or complete.
    """

    rank: int
    rays: tuple[NVec, ...]
    max_cones: tuple[tuple[int, ...], ...]
    kind: FanKind = FanKind.OPEN

    def __post_init__(self):
        """Normalize containers and check the structural data."""
        object.__setattr__(self, "rays", tuple(tuple(int(x) for x in r) for r in self.rays))
        object.__setattr__(
            self, "max_cones", tuple(tuple(sorted(c)) for c in self.max_cones)
        )
        object.__setattr__(self, "kind", FanKind(self.kind))
        for ray in self.rays:
            if len(ray) != self.rank:
                raise FanError(f"Ray {ray} does not have length {self.rank}.")
            if not any(ray):
                raise FanError("The zero vector is not a ray.")
        if len(set(self.rays)) != len(self.rays):
            raise FanError("Rays must be distinct.")
        for cone in self.max_cones:
            for index in cone:
                if not 0 <= index < len(self.rays):
                    raise FanError(f"Cone {cone} references missing ray {index}.")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Fan):
            return NotImplemented
        return self.rank == other.rank and self.signature() == other.signature()

    def __hash__(self) -> int:
        return hash((self.rank, self.signature()))

    def signature(self) -> frozenset[tuple[NVec, ...]]:
        """Maximal cones as canonically sorted ray tuples."""
        return frozenset(self.cone(c).rays for c in self.max_cones)

    def cone(self, indices: Iterable[int]) -> Cone:
        return Cone(tuple(self.rays[i] for i in indices))

    @cached_property
    def cones(self) -> tuple[Cone, ...]:
        return tuple(self.cone(c) for c in self.max_cones)

    def ray_index(self, ray: Sequence[int]) -> int:
        try:
            return self.rays.index(tuple(ray))
        except ValueError as e:
            raise FanError(f"{tuple(ray)} is not a ray of the fan.") from e

    def cones_containing(self, v: Sequence[int | Fraction]) -> list[int]:
        """Positions in ``max_cones`` of the maximal cones containing v."""
        return [i for i, cone in enumerate(self.cones) if cone.contains(v)]

    def has_cone(self, indices: Iterable[int]) -> bool:
        wanted = set(indices)
        return any(wanted <= set(c) for c in self.max_cones)


@dataclass
class FanReport:
    """Outcome of fan validation.

    Attributes:
        violations: Human readable descriptions of every failed check.
    """

    violations: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations


def _separated(sigma: Cone, tau: Cone) -> bool:
    shared = set(sigma.rays) & set(tau.rays)
    for u in sigma.facet_normals:
        values = [pair(u, r) for r in tau.rays]
        if all(v <= 0 for v in values) and all(
            r in shared for r, v in zip(tau.rays, values) if v == 0
        ):
            return True
    return False


def intersect_in_common_face(sigma: Cone, tau: Cone) -> bool:
    """True iff sigma and tau meet in the cone spanned by their shared rays."""
    if _separated(sigma, tau) or _separated(tau, sigma):
        return True
    shared = set(sigma.rays) & set(tau.rays)
    normals = sigma.facet_normals + tau.facet_normals
    return extreme_rays(normals, len(sigma.rays[0])) <= shared


def validate_fan(fan: Fan) -> FanReport:
    """Check every fan axiom and collect all violations.

    Maximal cones must be full-dimensional and simplicial. Any two maximal cones must
    intersect in the face spanned by their common rays. Open fans must have all rays
    in the orthant; complete fans must have every wall in exactly two maximal cones.
    """
    report = FanReport()
    for ray in fan.rays:
        if not is_primitive(ray):
            report.violations.append(f"ray {ray} is not primitive")
    if len(set(fan.max_cones)) != len(fan.max_cones):
        report.violations.append("duplicate maximal cones")

    full: list[Cone] = []
    for indices in fan.max_cones:
        rays = [fan.rays[i] for i in indices]
        if len(rays) != fan.rank or determinant(rays) == 0:
            report.violations.append(
                f"maximal cone {indices} is not full-dimensional simplicial"
            )
        else:
            full.append(Cone(tuple(rays)))

    used = {i for c in fan.max_cones for i in c}
    for i, ray in enumerate(fan.rays):
        if i not in used:
            report.violations.append(f"ray {ray} lies in no maximal cone")

    for a, b in combinations(range(len(full)), 2):
        if not intersect_in_common_face(full[a], full[b]):
            report.violations.append(
                f"cones {full[a].rays} and {full[b].rays} do not meet in a common face"
            )

    if fan.kind is FanKind.OPEN:
        for ray in fan.rays:
            if any(x < 0 for x in ray):
                report.violations.append(f"ray {ray} lies outside the orthant")
    else:
        walls = Counter(
            frozenset(wall)
            for c in fan.max_cones
            for wall in combinations(c, len(c) - 1)
        )
        for wall, count in walls.items():
            if count != 2:
                report.violations.append(
                    f"wall {sorted(wall)} lies in {count} maximal cones instead of 2"
                )
    logger.debug("Validated fan with %d cones: %s", len(fan.max_cones), report)
    return report


def is_proper_over_orthant(fan: Fan) -> bool:
    """True iff the maximal cones tile the orthant exactly.

    Uses exact volume bookkeeping on the slice {sum x = 1}: the cones tile the
    orthant iff they form a valid fan and their normalized volumes add up to one.

    Raises:
        FanError: If the fan is not of open kind.
    """
    if fan.kind is not FanKind.OPEN:
        raise FanError("Properness over the orthant applies to open fans only.")
    if not validate_fan(fan).valid:
        return False
    total = Fraction(0)
    for indices in fan.max_cones:
        rays = [fan.rays[i] for i in indices]
        weight = 1
        for r in rays:
            weight *= sum(r)
        total += abs(determinant(rays)) / weight
    return total == 1


def is_smooth(fan: Fan) -> bool:
    """True iff the rays of every maximal cone form a basis of N."""
    return all(
        len(c) == fan.rank and is_lattice_basis([fan.rays[i] for i in c])
        for c in fan.max_cones
    )


def star_subdivision(fan: Fan, gamma: Iterable[int]) -> Fan:
    """Star subdivision of ``fan`` at the cone spanned by the given ray indices.

    The new ray is the primitive vector along the sum of the rays of gamma; it is
    appended after the existing rays.

    Raises:
        FanError: If gamma is not a cone of the fan or has dimension below two.
    """
    gamma = tuple(sorted(set(gamma)))
    if len(gamma) < 2:
        raise FanError("Star subdivision needs a cone of dimension at least 2.")
    if not fan.has_cone(gamma):
        raise FanError(f"Cone {gamma} is not a cone of the fan.")
    new_ray = primitive([sum(fan.rays[i][k] for i in gamma) for k in range(fan.rank)])
    new_index = len(fan.rays)
    cones: list[tuple[int, ...]] = []
    for cone in fan.max_cones:
        if set(gamma) <= set(cone):
            for removed in gamma:
                cones.append(
                    tuple(sorted([i for i in cone if i != removed] + [new_index]))
                )
        else:
            cones.append(cone)
    logger.debug("Subdivided cone %s with new ray %s", gamma, new_ray)
    return Fan(fan.rank, fan.rays + (new_ray,), tuple(cones), fan.kind)


def subdivide_at(fan: Fan, rays: Iterable[Sequence[int]]) -> Fan:
    """Star subdivision at the cone spanned by the given ray vectors."""
    return star_subdivision(fan, [fan.ray_index(r) for r in rays])


def symmetrize(fan: Fan, weyl: WeylGroup) -> Fan:
    """The complete fan {w cone : w in W, cone in fan}.

    The fan must be open and proper over the orthant, which is the fundamental
    chamber of the contragredient action. Rays of the input keep their indices; new
    rays follow in lexicographic order.

    Raises:
        FanError: If the input is not proper or the orbit is not a complete fan.
    """
    if fan.kind is not FanKind.OPEN or not is_proper_over_orthant(fan):
        raise FanError("Only open fans proper over the orthant can be symmetrized.")
    if weyl.root_system.rank != fan.rank:
        raise FanError(
            f"Weyl group of rank {weyl.root_system.rank} on a fan of rank {fan.rank}."
        )
    images: set[frozenset[NVec]] = set()
    for w in weyl.n_elements:
        for cone in fan.cones:
            images.add(frozenset(act_n(w, r) for r in cone.rays))

    extra = sorted({r for c in images for r in c} - set(fan.rays))
    rays = fan.rays + tuple(extra)
    index = {r: i for i, r in enumerate(rays)}
    max_cones = tuple(sorted(tuple(sorted(index[r] for r in c)) for c in images))
    result = Fan(fan.rank, rays, max_cones, FanKind.COMPLETE)
    report = validate_fan(result)
    if not report.valid:
        raise FanError(f"Symmetrized fan is invalid: {report.violations}")
    logger.info(
        "Symmetrized %d cones into %d cones", len(fan.max_cones), len(max_cones)
    )
    return result


def restrict_to_orthant(fan: Fan) -> Fan:
    """The open fan formed by the maximal cones lying in the orthant."""
    keep = [c for c in fan.max_cones if all(min(fan.rays[i]) >= 0 for i in c)]
    used = sorted({i for c in keep for i in c})
    remap = {old: new for new, old in enumerate(used)}
    return Fan(
        fan.rank,
        tuple(fan.rays[i] for i in used),
        tuple(tuple(remap[i] for i in c) for c in keep),
        FanKind.OPEN,
    )


@dataclass(frozen=True)
class StarFan:
    """The star of a ray presented in the quotient lattice N / Z ray.

    Attributes:
        ray: The primitive ray generator.
        completion: Integral unimodular U with U @ ray = e_1.
        completion_inv_t: U^{-T}, used to move weights into the adapted basis.
        fan: The projected fan of rank l - 1.
    """

    ray: NVec
    completion: IntMatrix
    completion_inv_t: IntMatrix
    fan: Fan

    def project(self, n: Sequence[int]) -> NVec:
        """Image of n in the quotient lattice."""
        return tuple(
            sum(a * b for a, b in zip(row, n)) for row in self.completion[1:]
        )


def star_fan(fan: Fan, ray_index: int) -> StarFan:
    """Star fan of the given ray of ``fan`` in the quotient lattice.

    Raises:
        FanError: If the index is not a ray of the fan or the rank is one.
    """
    if not 0 <= ray_index < len(fan.rays):
        raise FanError(f"Ray index {ray_index} is not a ray of the fan.")
    if fan.rank < 2:
        raise FanError("Star fans need rank at least 2.")
    ray = fan.rays[ray_index]
    u, u_inv_t = unimodular_completion(ray)

    def project(n: Sequence[int]) -> NVec:
        return primitive(
            [sum(a * b for a, b in zip(row, n)) for row in u[1:]]
        )

    rays: list[NVec] = []
    cones: list[tuple[int, ...]] = []
    for cone in fan.max_cones:
        if ray_index not in cone:
            continue
        images = []
        for i in cone:
            if i == ray_index:
                continue
            image = project(fan.rays[i])
            if image not in rays:
                rays.append(image)
            images.append(rays.index(image))
        cones.append(tuple(sorted(images)))
    quotient = Fan(fan.rank - 1, tuple(rays), tuple(cones), FanKind.OPEN)
    walls = Counter(
        frozenset(wall) for c in cones for wall in combinations(c, len(c) - 1)
    )
    if walls and all(count == 2 for count in walls.values()):
        quotient = Fan(fan.rank - 1, tuple(rays), tuple(cones), FanKind.COMPLETE)
    return StarFan(ray=ray, completion=u, completion_inv_t=u_inv_t, fan=quotient)


def base_cone_index(fan: Fan) -> int:
    """The maximal cone containing e_1 + ... + e_l with the smallest sorted ray set."""
    diagonal = (1,) * fan.rank
    containing = fan.cones_containing(diagonal)
    if not containing:
        raise FanError("No maximal cone contains e_1 + ... + e_l.")
    return min(containing, key=lambda i: fan.cones[i].rays)
