"""Exact H-polyhedra: the polyhedron Q_h, the polytope P_h, their vertices and lattice
points, the weight sets of a bundle, and restriction to a divisor face.

An inequality (normal, bound) means pair(m, normal) >= bound. All enumeration is
exhaustive over exact rationals and guarded by the caps in ``symnorm.config``.
"""

import logging
import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

from .bundles import (
    CompletePLFunction,
    PLFunction,
    bundle_status,
    is_convex,
    weyl_extend,
)
from .config import Limits, get_limits
from .exceptions import CapExceededError, PolyhedronError, PreconditionError
from .fans import FanKind
from .lattice import (
    IntMatrix,
    LatticeCoset,
    MVec,
    extreme_rays,
    mat_vec,
    pair,
    rank,
    solve,
    unimodular_completion,
    unit,
)
from .roots import RestrictedRootSystem, WeylGroup, act, is_dominant

logger = logging.getLogger(__name__)

Normal = tuple[Fraction, ...]
Inequality = tuple[Normal, Fraction]


def _normal(values: Iterable) -> Normal:
    return tuple(Fraction(x) for x in values)


@dataclass(frozen=True)
class HPolyhedron:
    """An H-represented polyhedron together with the weight coset it is sampled on.

    Attributes:
        rank: Ambient dimension.
        inequalities: (normal, bound) pairs meaning pair(m, normal) >= bound.
        coset: The lattice coset whose points are enumerated.
        equalities: (normal, value) pairs meaning pair(m, normal) == value.
    """

    rank: int
    inequalities: tuple[Inequality, ...]
    coset: LatticeCoset
    equalities: tuple[Inequality, ...] = ()

    def __post_init__(self):
        """Drop duplicate normals keeping the tightest bound; reject zero normals."""
        tightest: dict[Normal, Fraction] = {}
        for normal, bound in self.inequalities:
            normal, bound = _normal(normal), Fraction(bound)
            if len(normal) != self.rank:
                raise PolyhedronError(f"Normal {normal} does not have length {self.rank}.")
            if not any(normal):
                raise PolyhedronError("Inequality normals must be non-zero.")
            if normal not in tightest or bound > tightest[normal]:
                tightest[normal] = bound
        object.__setattr__(self, "inequalities", tuple(tightest.items()))
        object.__setattr__(
            self,
            "equalities",
            tuple((_normal(n), Fraction(v)) for n, v in self.equalities),
        )

    def contains(self, m: Sequence[Fraction]) -> bool:
        """Real membership, ignoring the coset."""
        return all(pair(m, n) >= b for n, b in self.inequalities) and all(
            pair(m, n) == v for n, v in self.equalities
        )

    def contains_point(self, m: Sequence[Fraction]) -> bool:
        """Membership of a coset point."""
        return self.coset.contains(m) and self.contains(m)

    def intersect(
        self,
        inequalities: Iterable[Inequality] = (),
        equalities: Iterable[Inequality] = (),
    ) -> "HPolyhedron":
        return HPolyhedron(
            self.rank,
            self.inequalities + tuple(inequalities),
            self.coset,
            self.equalities + tuple(equalities),
        )

    def with_coset(self, coset: LatticeCoset) -> "HPolyhedron":
        return HPolyhedron(self.rank, self.inequalities, coset, self.equalities)


@dataclass(frozen=True)
class LatticePointSet:
    """A finite set of points in one weight coset, sorted lexicographically.

    Attributes:
        points: The points.
        coset: Their common coset.
    """

    points: tuple[MVec, ...]
    coset: LatticeCoset
    _lookup: frozenset[MVec] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        """Sort, deduplicate and check coset membership."""
        points = tuple(sorted(set(self.points)))
        for p in points:
            if not self.coset.contains(p):
                raise PolyhedronError(f"Point {p} is not in the coset of the set.")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "_lookup", frozenset(points))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[MVec]:
        return iter(self.points)

    def __contains__(self, m: object) -> bool:
        return m in self._lookup

    def as_set(self) -> frozenset[MVec]:
        return self._lookup


def open_polyhedron(h: PLFunction) -> HPolyhedron:
    """Q_h = {m : pair(m, ray) >= h(ray) for every ray} on the coset of h's base part.

    Raises:
        PreconditionError: If h is not defined on an open fan.
    """
    if h.fan.kind is not FanKind.OPEN:
        raise PreconditionError("Q_h is defined for functions on open fans.")
    return HPolyhedron(
        h.fan.rank,
        tuple((_normal(r), v) for r, v in zip(h.fan.rays, h.ray_values)),
        LatticeCoset(h.base_part),
    )


def complete_polytope(hc: PLFunction) -> HPolyhedron:
    """P_h = {m : pair(m, ray) >= h^c(ray) for every ray of the complete fan}.

    Raises:
        PreconditionError: If hc is not defined on a complete fan.
        PolyhedronError: If hc is not convex, so that P_h does not realize it.
    """
    if hc.fan.kind is not FanKind.COMPLETE:
        raise PreconditionError("P_h is defined for functions on complete fans.")
    if not is_convex(hc):
        raise PolyhedronError(
            "h^c is not convex on the complete fan; P_h would not be the expected "
            "bounded polytope."
        )
    return HPolyhedron(
        hc.fan.rank,
        tuple((_normal(r), v) for r, v in zip(hc.fan.rays, hc.ray_values)),
        LatticeCoset(hc.base_part),
    )


def dominant_part(K: HPolyhedron, rs: RestrictedRootSystem) -> HPolyhedron:
    """K intersected with the chamber C+ (every dotted coordinate <= 0)."""
    return K.intersect(
        inequalities=[(_normal(-a for a in row), Fraction(0)) for row in rs.cartan]
    )


def wall_section(K: HPolyhedron, rs: RestrictedRootSystem, j: int) -> HPolyhedron:
    """K intersected with the wall H_j where the j-th dotted coordinate vanishes."""
    return K.intersect(equalities=[(_normal(rs.cartan[j]), Fraction(0))])


def _check_rank(K: HPolyhedron, limits: Limits) -> None:
    if K.rank > limits.vertex_rank:
        raise CapExceededError("vertex_rank", limits.vertex_rank, K.rank)


def _vertex_candidates(K: HPolyhedron) -> set[MVec]:
    free = K.rank - len(K.equalities)
    if free < 0:
        return set()
    eq_normals = [n for n, _ in K.equalities]
    eq_values = [v for _, v in K.equalities]
    found: set[MVec] = set()
    for subset in combinations(K.inequalities, free):
        rows = eq_normals + [n for n, _ in subset]
        point = solve(rows, eq_values + [b for _, b in subset])
        if point is not None and K.contains(point):
            found.add(point)
    return found


def vertices(K: HPolyhedron, limits: Limits | None = None) -> list[MVec]:
    """Exact vertex set by solving every rank-sized subset of constraints.

    Equalities are part of every subset.

    Raises:
        CapExceededError: If the rank exceeds ``limits.vertex_rank``.
        PolyhedronError: If the polyhedron is empty or has no vertex.
    """
    limits = limits or get_limits()
    _check_rank(K, limits)
    found = _vertex_candidates(K)
    if not found:
        raise PolyhedronError("Polyhedron is empty or not pointed.")
    return sorted(found)


def recession_rays(K: HPolyhedron) -> set:
    """Primitive extreme rays of the recession cone, in f-coordinates."""
    normals = [n for n, _ in K.inequalities]
    for n, _ in K.equalities:
        normals += [n, tuple(-x for x in n)]
    if rank(normals) < K.rank:
        raise PolyhedronError("Polyhedron is not pointed.")
    return extreme_rays(normals, K.rank)


def is_bounded(K: HPolyhedron) -> bool:
    return not recession_rays(K)


def coset_values(lo: Fraction, hi: Fraction, offset: Fraction) -> list[Fraction]:
    start = math.ceil(lo - offset)
    stop = math.floor(hi - offset)
    return [offset + k for k in range(start, stop + 1)]


def _scan_box(
    K: HPolyhedron, lows: Sequence[Fraction], highs: Sequence[Fraction], limits: Limits
) -> Iterator[MVec]:
    offsets = K.coset.offset()
    axes = [coset_values(lo, hi, o) for lo, hi, o in zip(lows, highs, offsets)]
    size = math.prod(len(a) for a in axes)
    if size > limits.box_points:
        raise CapExceededError("box_points", limits.box_points, size)
    logger.debug("Scanning %d box points", size)
    for point in product(*axes):
        if K.contains(point):
            yield point


def lattice_points(K: HPolyhedron, limits: Limits | None = None) -> LatticePointSet:
    """All points of a bounded polyhedron in its coset.

    Raises:
        PolyhedronError: If K is unbounded.
        CapExceededError: If the bounding box exceeds ``limits.box_points``.
    """
    limits = limits or get_limits()
    _check_rank(K, limits)
    corners = _vertex_candidates(K)
    if not corners:
        return LatticePointSet((), K.coset)
    if not is_bounded(K):
        raise PolyhedronError("Cannot enumerate the points of an unbounded polyhedron.")
    lows = [min(v[i] for v in corners) for i in range(K.rank)]
    highs = [max(v[i] for v in corners) for i in range(K.rank)]
    points = LatticePointSet(tuple(_scan_box(K, lows, highs, limits)), K.coset)
    logger.info("Found %d lattice points", len(points))
    return points


def minimal_lattice_points(
    Q: HPolyhedron, limits: Limits | None = None
) -> LatticePointSet:
    """Points m of Q in its coset with m - f_i outside Q for every i.

    Every minimal point lies in conv(vertices) + [0, 1)^l, so that box is scanned.

    Raises:
        PolyhedronError: If some normal leaves the orthant, so Q is not closed under
            adding f_i.
    """
    limits = limits or get_limits()
    if any(x < 0 for n, _ in Q.inequalities for x in n) or Q.equalities:
        raise PolyhedronError(
            "Minimal points need every inequality normal in the orthant and no "
            "equalities."
        )
    _check_rank(Q, limits)
    corners = _vertex_candidates(Q)
    if not corners:
        return LatticePointSet((), Q.coset)
    lows = [min(v[i] for v in corners) for i in range(Q.rank)]
    highs = [max(v[i] for v in corners) + 1 for i in range(Q.rank)]
    basis = [unit(Q.rank, i) for i in range(Q.rank)]
    minimal = [
        m
        for m in _scan_box(Q, lows, highs, limits)
        if not any(Q.contains(tuple(a - b for a, b in zip(m, f))) for f in basis)
    ]
    logger.info("Found %d minimal points", len(minimal))
    return LatticePointSet(tuple(minimal), Q.coset)


@dataclass(frozen=True)
class WeightSets:
    """Weight sets of a bundle on the open, complete and symmetric sides.

    Attributes:
        pi_z: Q_h with its coset; its coset points are the (infinite) set Pi(Z, h).
        pi_zc: Coset points of P_h.
        pi_y: Dominant points of P_h.
        orbit_identity_holds: Whether pi_zc is the union of the W-translates of pi_y.
        open_dominant_agrees: Whether the coset points of Q_h in C+ equal pi_y.
    """

    pi_z: HPolyhedron
    pi_zc: LatticePointSet
    pi_y: LatticePointSet
    orbit_identity_holds: bool
    open_dominant_agrees: bool


def weight_sets(
    h: PLFunction,
    rs: RestrictedRootSystem,
    weyl: WeylGroup,
    limits: Limits | None = None,
) -> WeightSets:
    """Compute Pi(Z, h), Pi(Z^c, h) and Pi(Y, h) with their consistency flags.

    Raises:
        PreconditionError: If h is not globally generated.
    """
    if not bundle_status(h, rs).gg:
        raise PreconditionError("Weight sets need a globally generated bundle.")
    hc = weyl_extend(h, weyl)
    Q = open_polyhedron(h)
    P = complete_polytope(hc)
    pi_zc = lattice_points(P, limits)
    pi_y = LatticePointSet(
        tuple(p for p in pi_zc if is_dominant(rs, p)), pi_zc.coset
    )
    orbit = {act(w, p) for w in weyl.elements for p in pi_y}
    open_dominant = lattice_points(dominant_part(Q, rs), limits)
    return WeightSets(
        pi_z=Q,
        pi_zc=pi_zc,
        pi_y=pi_y,
        orbit_identity_holds=orbit == set(pi_zc.points),
        open_dominant_agrees=open_dominant.as_set() == pi_y.as_set(),
    )


def dominant_saturation_violations(
    h: PLFunction,
    rs: RestrictedRootSystem,
    weyl: WeylGroup,
    limits: Limits | None = None,
) -> list[tuple[MVec, MVec]]:
    """Pairs (nu, nu') with nu in Pi(Y, h), nu' dominant and nu' - nu a non-negative
    integral combination of the f_i, but nu' outside Pi(Y, h)."""
    sets = weight_sets(h, rs, weyl, limits)
    candidates = lattice_points(dominant_part(sets.pi_z, rs), limits)
    violations = []
    for nu in sets.pi_y:
        for nu_prime in candidates:
            if nu_prime in sets.pi_y:
                continue
            if all(b >= a for a, b in zip(nu, nu_prime)):
                violations.append((nu, nu_prime))
    return violations


def active_cones(P: HPolyhedron, hc: CompletePLFunction) -> dict[int, MVec | None]:
    """For each maximal cone of the complete fan, its linear part if that part is a
    vertex of P, else None."""
    corner_set = set(_vertex_candidates(P))
    return {
        i: (part if part in corner_set else None)
        for i, part in enumerate(hc.linear_parts)
    }


@dataclass(frozen=True)
class FacePolyhedron:
    """The face pair(m, ray) = level of a polyhedron, presented in rank l - 1.

    A weight m on the face corresponds to m'' with U^{-T} m = (level, m'').

    Attributes:
        ray: The primitive ray defining the face.
        level: The prescribed value of pair(m, ray).
        completion: Unimodular U with U @ ray = e_1.
        completion_inv_t: U^{-T}.
        polyhedron: The face in the quotient coordinates.
    """

    ray: tuple[int, ...]
    level: Fraction
    completion: IntMatrix
    completion_inv_t: IntMatrix
    polyhedron: HPolyhedron

    def lift(self, m: Sequence[Fraction]) -> MVec:
        """The weight of the ambient rank whose face coordinates are m."""
        full = (self.level,) + tuple(Fraction(x) for x in m)
        return tuple(
            Fraction(x)
            for x in mat_vec(tuple(zip(*self.completion)), full)
        )

    def project(self, m: Sequence[Fraction]) -> MVec:
        """Face coordinates of a weight lying on the face."""
        adapted = mat_vec(self.completion_inv_t, tuple(Fraction(x) for x in m))
        return tuple(Fraction(x) for x in adapted[1:])


def face_restriction(
    K: HPolyhedron, ray: Sequence[int], level: Fraction
) -> FacePolyhedron:
    """Restrict K to {pair(m, ray) = level} and present it in the quotient lattice.

    Raises:
        PolyhedronError: If the face is empty, or no coset point lies on its level.
    """
    level = Fraction(level)
    u, u_inv_t = unimodular_completion(ray)
    inequalities: list[Inequality] = []
    for normal, bound in K.inequalities:
        image = mat_vec(u, normal)
        reduced = tuple(image[1:])
        shifted = bound - level * image[0]
        if not any(reduced):
            if shifted > 0:
                raise PolyhedronError(f"Face at level {level} violates {normal} >= {bound}.")
            continue
        inequalities.append((reduced, shifted))
    adapted = mat_vec(u_inv_t, K.coset.basepoint)
    if (adapted[0] - level).denominator != 1:
        raise PolyhedronError(f"No coset point of the polyhedron lies at level {level}.")
    face = HPolyhedron(
        K.rank - 1, tuple(inequalities), LatticeCoset(tuple(adapted[1:]))
    )
    if not _vertex_candidates(face):
        raise PolyhedronError(f"The face at level {level} is empty.")
    return FacePolyhedron(tuple(ray), level, u, u_inv_t, face)
