"""Surjectivity of section multiplication as lattice-point decomposition.

The open side asks whether Q_{h+k} n (v_{h+k} + M) = Q_h n (v_h + M) + Q_k n (v_k + M);
the complete side asks the same of the polytopes P. Both oracles search exhaustively
and in lexicographic order. The descent and transfer procedures turn open
decompositions into complete ones, and the remaining checks are diagnostics of the
structure that makes the two sides equivalent.
"""

import logging
import math
import time
from collections.abc import Sequence
from fractions import Fraction
from itertools import product

import numpy as np

from .bundles import (
    PLFunction,
    bundle_status,
    dominates,
    evaluate,
    is_convex,
    weyl_extend,
)
from .config import Limits, get_limits
from .exceptions import CapExceededError, InvariantError, PreconditionError
from .lattice import MVec, add, is_integral, sub, unit
from .models import (
    CheckReport,
    Decomposition,
    Descent,
    EquivalenceReport,
    Mode,
    OrthantGenerationReport,
    Outcome,
    SaturationReport,
    Transfer,
    Verdict,
    WallStripReport,
)
from .polyhedra import (
    HPolyhedron,
    complete_polytope,
    coset_values,
    dominant_part,
    lattice_points,
    minimal_lattice_points,
    open_polyhedron,
    vertices,
    wall_section,
)
from .roots import RestrictedRootSystem, WeylGroup, dotted_coords, is_dominant

logger = logging.getLogger(__name__)


def in_weight_set(h: PLFunction, m: Sequence[Fraction]) -> bool:
    """Membership in Q_h n (v_h + M) recomputed from the ray data of h."""
    return is_integral(sub(m, h.base_part)) and dominates(h, m)


def find_open_split(
    h: PLFunction, k: PLFunction, m: MVec, limits: Limits | None = None
) -> tuple[MVec | None, int]:
    """First m1 (lexicographically) with m1 in Q_h, m - m1 in Q_k, both on their cosets.

    The search box is h(e_i) <= m1_i <= m_i - k(e_i).

    Returns:
        (m1 or None, number of candidates examined).
    """
    limits = limits or get_limits()
    rank = h.fan.rank
    offsets = tuple(x - (x // 1) for x in h.base_part)
    axes = []
    for i in range(rank):
        e = tuple(int(j == i) for j in range(rank))
        axes.append(coset_values(h.value(e), m[i] - k.value(e), offsets[i]))
    size = math.prod(len(a) for a in axes)
    if size > limits.box_points:
        raise CapExceededError("box_points", limits.box_points, size)
    Qh, Qk = open_polyhedron(h), open_polyhedron(k)
    searched = 0
    for m1 in product(*axes):
        searched += 1
        if Qh.contains(m1) and Qk.contains(sub(m, m1)):
            return tuple(m1), searched
    return None, searched


def check_sum_open(
    h: PLFunction, k: PLFunction, limits: Limits | None = None, witnesses: bool = False
) -> CheckReport:
    """Decide Q_{h+k} = Q_h + Q_k on lattice cosets through the minimal layer.

    Args:
        h: First function on an open fan.
        k: Second function on the same fan.
        limits: Enumeration caps.
        witnesses: Keep one decomposition per minimal point in the report.

    Raises:
        PreconditionError: If h or k is not convex.
    """
    if not (is_convex(h) and is_convex(k)):
        raise PreconditionError("The open-side check needs convex h and k.")
    start = time.perf_counter()
    hk = h + k
    targets = minimal_lattice_points(open_polyhedron(hk), limits)
    logger.info("Open check over %d minimal points", len(targets))
    report = CheckReport(verdict=Verdict.SURJECTIVE, mode=Mode.OPEN)
    searched = 0
    for m in targets:
        m1, count = find_open_split(h, k, m, limits)
        searched += count
        if m1 is None:
            logger.debug("No open decomposition of %s", m)
            report.counterexamples.append(m)
            continue
        m2 = sub(m, m1)
        if not (in_weight_set(h, m1) and in_weight_set(k, m2)):
            raise InvariantError(f"Open decomposition of {m} failed re-verification.")
        if witnesses:
            report.decompositions.append(Decomposition(m, m1, m2))
    if report.counterexamples:
        report.verdict = Verdict.NOT_SURJECTIVE
    report.statistics = {
        "targets": len(targets),
        "searched": searched,
        "seconds": round(time.perf_counter() - start, 6),
    }
    logger.info("Open check verdict: %s", report.verdict.value)
    return report


def _require_gg(h: PLFunction, rs: RestrictedRootSystem, what: str) -> None:
    if not bundle_status(h, rs).gg:
        raise PreconditionError(f"{what} needs globally generated spherical bundles.")


def _require_ample(h: PLFunction, rs: RestrictedRootSystem, what: str) -> None:
    if not bundle_status(h, rs).ample:
        raise PreconditionError(f"{what} needs ample spherical bundles.")


def check_sum_complete(
    h: PLFunction,
    k: PLFunction,
    rs: RestrictedRootSystem,
    weyl: WeylGroup,
    limits: Limits | None = None,
    witnesses: bool = False,
) -> CheckReport:
    """Decide P_{h+k} = P_h + P_k on lattice cosets, checking dominant targets only.

    Raises:
        PreconditionError: If h or k is not globally generated.
    """
    _require_gg(h, rs, "The complete-side check")
    _require_gg(k, rs, "The complete-side check")
    start = time.perf_counter()
    Ph = complete_polytope(weyl_extend(h, weyl))
    Pk = complete_polytope(weyl_extend(k, weyl))
    Phk = complete_polytope(weyl_extend(h + k, weyl))
    candidates = lattice_points(Ph, limits)
    targets = [m for m in lattice_points(Phk, limits) if is_dominant(rs, m)]
    logger.info(
        "Complete check over %d dominant targets and %d candidates",
        len(targets),
        len(candidates),
    )
    report = CheckReport(verdict=Verdict.SURJECTIVE, mode=Mode.COMPLETE)
    searched = 0
    for m in targets:
        found = None
        for m1 in candidates:
            searched += 1
            if Pk.contains_point(sub(m, m1)):
                found = m1
                break
        if found is None:
            report.counterexamples.append(m)
        elif witnesses:
            report.decompositions.append(Decomposition(m, found, sub(m, found)))
    if report.counterexamples:
        report.verdict = Verdict.NOT_SURJECTIVE
    if not targets:
        report.notes.append("P_{h+k} has no dominant coset point; vacuously surjective.")
    report.statistics = {
        "targets": len(targets),
        "searched": searched,
        "seconds": round(time.perf_counter() - start, 6),
    }
    logger.info("Complete check verdict: %s", report.verdict.value)
    return report


def _diagonal_bound(h: PLFunction, p: Sequence[Fraction]) -> int:
    diagonal = (1,) * h.fan.rank
    return int(sum(p) - evaluate(h, diagonal)) + 1


def descend_to_chamber(
    h: PLFunction,
    p: Sequence[Fraction],
    rs: RestrictedRootSystem,
    weyl: WeylGroup,
    polytope: HPolyhedron | None = None,
) -> Descent:
    """Write p in Q_h as p' + sum c_i f_i with p' in P_h n C+ on the same coset.

    While some dotted coordinate of the current point is positive, take the smallest
    such index j and subtract f_j until that coordinate is no longer positive.

    Raises:
        PreconditionError: If h is not ample or p is not a coset point of Q_h.
        InvariantError: If a step leaves Q_h, the walk does not terminate, or the end
            point is outside P_h.
    """
    _require_ample(h, rs, "Descent to the chamber")
    p = tuple(Fraction(x) for x in p)
    if not in_weight_set(h, p):
        raise PreconditionError(f"{p} is not a coset point of Q_h.")
    P = polytope or complete_polytope(weyl_extend(h, weyl))
    budget = _diagonal_bound(h, p)
    current = p
    coefficients = [0] * h.fan.rank
    steps: list[int] = []
    while True:
        dotted = dotted_coords(rs, current)
        j = next((i for i, x in enumerate(dotted) if x > 0), None)
        if j is None:
            break
        while dotted_coords(rs, current)[j] > 0:
            current = sub(current, unit(h.fan.rank, j))
            coefficients[j] += 1
            steps.append(j)
            if not dominates(h, current):
                raise InvariantError(f"Descent from {p} left Q_h at {current}.")
            if len(steps) > budget:
                raise InvariantError(f"Descent from {p} exceeded {budget} steps.")
    if not P.contains_point(current):
        raise InvariantError(f"Descent from {p} ended outside P_h at {current}.")
    logger.debug("Descended %s to %s in %d steps", p, current, len(steps))
    return Descent(p=p, p_prime=current, coefficients=tuple(coefficients), steps=steps)


def transfer_decomposition(
    h: PLFunction,
    k: PLFunction,
    m: Sequence[Fraction],
    p0: Sequence[Fraction],
    q0: Sequence[Fraction],
    rs: RestrictedRootSystem,
    weyl: WeylGroup,
    polytopes: tuple[HPolyhedron, HPolyhedron] | None = None,
) -> Transfer:
    """Move f_j from q to p until q lands in P_k.

    Each round picks the smallest j with a positive dotted coordinate of q and moves
    f_j while that coordinate stays positive. p stays in P_h and q in Q_k throughout.
    ``polytopes`` passes (P_h, P_k) when the caller already built them.

    Raises:
        PreconditionError: If the inputs do not satisfy p0 + q0 = m, p0 in P_h n C+,
            q0 in Q_k.
        InvariantError: If an invariant breaks or the step bound is exceeded.
    """
    m, p, q = (tuple(Fraction(x) for x in v) for v in (m, p0, q0))
    Ph, Pk = polytopes or (
        complete_polytope(weyl_extend(h, weyl)),
        complete_polytope(weyl_extend(k, weyl)),
    )
    if add(p, q) != m:
        raise PreconditionError("p0 + q0 must equal m.")
    if not (Ph.contains_point(p) and is_dominant(rs, p)):
        raise PreconditionError(f"p0 = {p} is not in P_h n C+.")
    if not in_weight_set(k, q):
        raise PreconditionError(f"q0 = {q} is not a coset point of Q_k.")
    budget = _diagonal_bound(k, q)
    steps: list[int] = []
    while not Pk.contains(q):
        dotted = dotted_coords(rs, q)
        j = next((i for i, y in enumerate(dotted) if y > 0), None)
        if j is None:
            raise InvariantError(f"q = {q} is dominant in Q_k but outside P_k.")
        f_j = unit(h.fan.rank, j)
        while dotted_coords(rs, q)[j] > 0 and not Pk.contains(q):
            p, q = add(p, f_j), sub(q, f_j)
            steps.append(j)
            if not Ph.contains(p):
                raise InvariantError(f"Transfer step {len(steps)} left P_h at {p}.")
            if not dominates(k, q):
                raise InvariantError(f"Transfer step {len(steps)} left Q_k at {q}.")
            if len(steps) > budget:
                raise InvariantError(f"Transfer of {m} exceeded {budget} steps.")
    logger.debug("Transferred %s in %d steps", m, len(steps))
    return Transfer(m=m, p=p, q=q, steps=steps)


def check_wall_strip(
    h: PLFunction,
    j: int,
    rs: RestrictedRootSystem,
    weyl: WeylGroup,
    limits: Limits | None = None,
) -> WallStripReport:
    """Check p' +- f_j / 2 in Q_h for every vertex p' of P_h on the wall H_j.

    Inputs that are not ample, or whose P_h has a vertex on H_j, are reported as
    unsupported.
    """
    if not bundle_status(h, rs).ample:
        return WallStripReport(j, Outcome.UNSUPPORTED, reason="h is not ample spherical")
    P = complete_polytope(weyl_extend(h, weyl))
    on_wall = [v for v in vertices(P, limits) if dotted_coords(rs, v)[j] == 0]
    if on_wall:
        return WallStripReport(
            j,
            Outcome.UNSUPPORTED,
            vertices=on_wall,
            reason="a vertex of P_h lies on the wall",
        )
    Q = open_polyhedron(h)
    section = vertices(wall_section(P, rs, j), limits)
    half = tuple(Fraction(int(i == j), 2) for i in range(h.fan.rank))
    failures = [
        v for v in section if not (Q.contains(add(v, half)) and Q.contains(sub(v, half)))
    ]
    outcome = Outcome.VIOLATED if failures else Outcome.HOLDS
    logger.info("Wall strip check for index %d: %s", j, outcome.value)
    return WallStripReport(j, outcome, vertices=section, failures=failures)


SATURATION_NOTE = (
    "The sumset only approximates the image of the multiplication map, so a "
    "violation here is a diagnostic and does not contradict normality."
)


def check_saturation(
    h: PLFunction,
    k: PLFunction,
    rs: RestrictedRootSystem,
    weyl: WeylGroup,
    limits: Limits | None = None,
) -> SaturationReport:
    """Dominant-order saturation of S = dominant points of P_h + P_k inside Pi(Y, h+k).

    Raises:
        PreconditionError: If h or k is not globally generated.
    """
    _require_gg(h, rs, "The saturation check")
    _require_gg(k, rs, "The saturation check")
    points_h = lattice_points(complete_polytope(weyl_extend(h, weyl)), limits)
    points_k = lattice_points(complete_polytope(weyl_extend(k, weyl)), limits)
    target = lattice_points(complete_polytope(weyl_extend(h + k, weyl)), limits)
    sumset = {add(a, b) for a in points_h for b in points_k}
    dominant_sums = {s for s in sumset if is_dominant(rs, s)}
    pi_y = [t for t in target if is_dominant(rs, t)]
    violations = [
        (nu, nu_prime)
        for nu in sorted(dominant_sums)
        for nu_prime in pi_y
        if nu_prime not in dominant_sums and all(b >= a for a, b in zip(nu, nu_prime))
    ]
    outcome = Outcome.VIOLATED if violations else Outcome.HOLDS
    logger.info("Saturation check: %s", outcome.value)
    return SaturationReport(
        outcome=outcome,
        sumset_size=len(dominant_sums),
        violations=violations,
        note=SATURATION_NOTE,
    )


def check_orthant_generation(
    h: PLFunction,
    rs: RestrictedRootSystem,
    weyl: WeylGroup,
    limits: Limits | None = None,
    deep_samples: int = 100,
    seed: int = 0,
) -> OrthantGenerationReport:
    """Check Q_h n C+ = P_h n C+ and that Q_h is generated from P_h n C+ by the f_i.

    The second part descends every minimal point of Q_h and ``deep_samples`` points
    of the form (minimal point + random non-negative combination of the f_i) and
    verifies each reconstruction exactly.
    """
    if not bundle_status(h, rs).ample:
        return OrthantGenerationReport(
            Outcome.UNSUPPORTED, reason="h is not ample spherical"
        )
    Q = open_polyhedron(h)
    P = complete_polytope(weyl_extend(h, weyl))
    Qd, Pd = dominant_part(Q, rs), dominant_part(P, rs)
    vertices_agree = vertices(Qd, limits) == vertices(Pd, limits)
    points_agree = (
        lattice_points(Qd, limits).as_set() == lattice_points(Pd, limits).as_set()
    )

    minimal = list(minimal_lattice_points(Q, limits))
    rng = np.random.default_rng(seed)
    samples = list(minimal)
    for _ in range(deep_samples if minimal else 0):
        base = minimal[int(rng.integers(len(minimal)))]
        shift = rng.integers(0, 4, size=h.fan.rank)
        samples.append(tuple(x + int(c) for x, c in zip(base, shift)))

    failures: list[MVec] = []
    for p in samples:
        try:
            descent = descend_to_chamber(h, p, rs, weyl, polytope=P)
        except InvariantError as e:
            logger.debug("Descent failed for %s: %s", p, e)
            failures.append(p)
            continue
        rebuilt = tuple(a + c for a, c in zip(descent.p_prime, descent.coefficients))
        if rebuilt != p or not is_dominant(rs, descent.p_prime):
            failures.append(p)
    holds = vertices_agree and points_agree and not failures
    return OrthantGenerationReport(
        outcome=Outcome.HOLDS if holds else Outcome.VIOLATED,
        vertices_agree=vertices_agree,
        points_agree=points_agree,
        descents_checked=len(samples),
        failures=failures,
    )


def check_equivalence(
    h: PLFunction,
    k: PLFunction,
    rs: RestrictedRootSystem,
    weyl: WeylGroup,
    limits: Limits | None = None,
) -> EquivalenceReport:
    """Run both oracles and carry open decompositions of dominant targets across.

    Each dominant coset point m of P_{h+k} is split on the open side, the h summand is
    descended to P_h n C+ and the resulting pair is transferred to the complete side.

    Raises:
        PreconditionError: If h or k is not ample spherical.
    """
    _require_ample(h, rs, "The equivalence check")
    _require_ample(k, rs, "The equivalence check")
    open_report = check_sum_open(h, k, limits)
    complete_report = check_sum_complete(h, k, rs, weyl, limits)
    agree = open_report.verdict == complete_report.verdict

    Ph = complete_polytope(weyl_extend(h, weyl))
    Pk = complete_polytope(weyl_extend(k, weyl))
    Phk = complete_polytope(weyl_extend(h + k, weyl))
    transfers = 0
    for m in lattice_points(Phk, limits):
        if not is_dominant(rs, m):
            continue
        a, _ = find_open_split(h, k, m, limits)
        if a is None:
            continue
        descent = descend_to_chamber(h, a, rs, weyl, polytope=Ph)
        q0 = add(sub(m, a), descent.coefficients)
        transfer_decomposition(h, k, m, descent.p_prime, q0, rs, weyl, (Ph, Pk))
        transfers += 1

    counterexample = None
    if not agree:
        counterexample = {
            "h": [str(v) for v in h.ray_values],
            "k": [str(v) for v in k.ray_values],
            "open": open_report.verdict.value,
            "complete": complete_report.verdict.value,
        }
        logger.error("Open and complete verdicts disagree: %s", counterexample)
    return EquivalenceReport(
        open=open_report,
        complete=complete_report,
        agree=agree,
        transfers=transfers,
        counterexample=counterexample,
    )
