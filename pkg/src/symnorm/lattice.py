"""Exact vectors in the dual lattices M and N and the small amount of exact linear
algebra the rest of the package needs.

Vectors in M (weights) are tuples of ``Fraction`` in the basis f_1, ..., f_l; vectors
in N (one-parameter subgroups, ray generators) are tuples of ``int`` in the dual basis
e_1, ..., e_l. Matrix work is delegated to sympy with exact rationals throughout.
"""

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import sympy

from .exceptions import DimensionError

logger = logging.getLogger(__name__)

MVec = tuple[Fraction, ...]
NVec = tuple[int, ...]
IntMatrix = tuple[tuple[int, ...], ...]


def as_fraction(value: int | str | Fraction) -> Fraction:
    """Convert an int, a "p/q" string or a Fraction to a Fraction.

    Raises:
        TypeError: If a float (or any other inexact type) is passed.
    """
    if isinstance(value, bool) or not isinstance(value, (int, str, Fraction)):
        raise TypeError(f"Exact rational expected, got {type(value).__name__}.")
    return Fraction(value)


def mvec(values: Iterable[int | str | Fraction]) -> MVec:
    """Build an MVec from exact values."""
    return tuple(as_fraction(v) for v in values)


def nvec(values: Iterable[int]) -> NVec:
    """Build an NVec, rejecting non-integral entries."""
    out = []
    for v in values:
        if isinstance(v, Fraction):
            if v.denominator != 1:
                raise DimensionError(f"N-vector entries must be integers, got {v}.")
            v = v.numerator
        out.append(int(v))
    return tuple(out)


def zero(rank: int) -> MVec:
    return (Fraction(0),) * rank


def unit(rank: int, i: int) -> MVec:
    """The basis vector f_{i+1} (0-indexed i)."""
    return tuple(Fraction(int(j == i)) for j in range(rank))


def unit_n(rank: int, i: int) -> NVec:
    return tuple(int(j == i) for j in range(rank))


def _check_lengths(a: Sequence, b: Sequence) -> None:
    if len(a) != len(b):
        raise DimensionError(f"Length mismatch: {len(a)} != {len(b)}.")


def pair(m: Sequence[Fraction], n: Sequence[int]) -> Fraction:
    """The pairing <m, n> = sum_i m_i n_i of the dual bases.

    Raises:
        DimensionError: If the lengths differ.
    """
    _check_lengths(m, n)
    return sum((Fraction(x) * y for x, y in zip(m, n)), Fraction(0))


def add(a: Sequence[Fraction], b: Sequence[Fraction]) -> MVec:
    _check_lengths(a, b)
    return tuple(Fraction(x) + y for x, y in zip(a, b))


def sub(a: Sequence[Fraction], b: Sequence[Fraction]) -> MVec:
    _check_lengths(a, b)
    return tuple(Fraction(x) - y for x, y in zip(a, b))


def scale(c: Fraction | int, a: Sequence[Fraction]) -> MVec:
    return tuple(Fraction(c) * x for x in a)


def is_integral(a: Sequence[Fraction]) -> bool:
    return all(Fraction(x).denominator == 1 for x in a)


def integer_part(x: Fraction) -> int:
    """The integral part [x]: the largest integer not exceeding x."""
    return math.floor(x)


def fractional_flag(x: Fraction) -> int:
    """0 when x is an integer, 1 otherwise."""
    return 0 if Fraction(x).denominator == 1 else 1


def primitive(n: Sequence[int]) -> NVec:
    """Divide an integer vector by the gcd of its entries."""
    g = math.gcd(*n)
    if g == 0:
        raise DimensionError("The zero vector has no primitive generator.")
    return tuple(x // g for x in n)


def is_primitive(n: Sequence[int]) -> bool:
    return math.gcd(*n) == 1


def _sympy_matrix(rows: Sequence[Sequence[int | Fraction]]) -> sympy.Matrix:
    return sympy.Matrix(
        [
            [sympy.Rational(Fraction(x).numerator, Fraction(x).denominator) for x in r]
            for r in rows
        ]
    )


def _to_fraction(x: sympy.Basic) -> Fraction:
    r = sympy.Rational(x)
    return Fraction(int(r.p), int(r.q))


def determinant(rows: Sequence[Sequence[int | Fraction]]) -> Fraction:
    """Exact determinant of a square matrix.

    Raises:
        DimensionError: If the matrix is not square.
    """
    if any(len(r) != len(rows) for r in rows):
        raise DimensionError("Determinant requires a square matrix.")
    if not rows:
        return Fraction(1)
    return _to_fraction(_sympy_matrix(rows).det(method="bareiss"))


def rank(rows: Sequence[Sequence[int | Fraction]]) -> int:
    if not rows:
        return 0
    return int(_sympy_matrix(rows).rank())


def nullspace(rows: Sequence[Sequence[int | Fraction]], width: int) -> list[MVec]:
    """A basis of {x : rows @ x = 0} in Q^width."""
    if not rows:
        return [unit(width, i) for i in range(width)]
    return [
        tuple(_to_fraction(x) for x in col) for col in _sympy_matrix(rows).nullspace()
    ]


def solve(
    rows: Sequence[Sequence[int | Fraction]], rhs: Sequence[Fraction]
) -> MVec | None:
    """Solve the square system rows @ x = rhs exactly; None when singular."""
    _check_lengths(rows, rhs)
    a = _sympy_matrix(rows)
    if a.det(method="bareiss") == 0:
        return None
    x = a.LUsolve(_sympy_matrix([[v] for v in rhs]))
    return tuple(_to_fraction(v) for v in x)


def inverse(rows: Sequence[Sequence[int | Fraction]]) -> tuple[MVec, ...]:
    """Exact inverse of a non-singular square matrix."""
    inv = _sympy_matrix(rows).inv()
    return tuple(
        tuple(_to_fraction(inv[i, j]) for j in range(inv.cols)) for i in range(inv.rows)
    )


def transpose(rows: Sequence[Sequence]) -> tuple[tuple, ...]:
    return tuple(zip(*rows))


def mat_vec(rows: Sequence[Sequence], vec: Sequence) -> tuple:
    """rows @ vec, keeping ints as ints and Fractions as Fractions."""
    return tuple(sum((a * b for a, b in zip(r, vec)), 0 * vec[0]) for r in rows)


def is_lattice_basis(vs: Sequence[Sequence[int]]) -> bool:
    """True iff the l integer vectors form a basis of Z^l.

    Raises:
        DimensionError: If the input is not l vectors of length l.
    """
    return abs(determinant(vs)) == 1


def solve_linear_form(rays: Sequence[NVec], values: Sequence[Fraction]) -> MVec:
    """The unique m with pair(m, rays[i]) = values[i] for every i.

    Args:
        rays: Linearly independent ray generators of a full-dimensional simplicial
            cone.
        values: Prescribed values on the rays.

    Returns:
        The linear form m as an MVec.

    Raises:
        DimensionError: If the system is singular or not square.
    """
    if len(rays) != len(values) or any(len(r) != len(rays) for r in rays):
        raise DimensionError(
            f"Need {len(rays)} values and square ray data to solve a linear form."
        )
    m = solve(rays, [as_fraction(v) for v in values])
    if m is None:
        raise DimensionError(f"Rays {list(rays)} are linearly dependent.")
    return m


def unimodular_completion(rho: Sequence[int]) -> tuple[IntMatrix, IntMatrix]:
    """An integral unimodular U with U @ rho = e_1, together with U^{-T}.

    When rho has an entry of absolute value one the last such entry is used as pivot,
    which keeps the projection n -> (U n)_{2..l} in the shape
    ``n_j - rho_j * rho_p * n_p`` (j != p). Otherwise the Euclidean algorithm on rows
    produces U.

    Raises:
        DimensionError: If rho is not primitive.
    """
    rho = tuple(int(x) for x in rho)
    if not is_primitive(rho):
        raise DimensionError(f"Ray {rho} is not primitive.")
    size = len(rho)
    units = [i for i, x in enumerate(rho) if abs(x) == 1]
    if units:
        p = units[-1]
        sign = rho[p]
        rows: list[list[int]] = [[sign * int(j == p) for j in range(size)]]
        for i in range(size):
            if i != p:
                rows.append(
                    [int(j == i) - (rho[i] * sign if j == p else 0) for j in range(size)]
                )
    else:
        rows = [[int(i == j) for j in range(size)] for i in range(size)]
        v = list(rho)
        while sum(1 for x in v if x) > 1:
            i = min((k for k in range(size) if v[k]), key=lambda k: abs(v[k]))
            for j in range(size):
                if j != i and v[j]:
                    q = v[j] // v[i]
                    v[j] -= q * v[i]
                    rows[j] = [a - q * b for a, b in zip(rows[j], rows[i])]
        i = next(k for k in range(size) if v[k])
        rows[0], rows[i] = rows[i], rows[0]
        if v[i] < 0:
            rows[0] = [-a for a in rows[0]]
    u = tuple(tuple(r) for r in rows)
    inv_t = transpose(inverse(u))
    u_inv_t = tuple(tuple(int(x) for x in r) for r in inv_t)
    return u, u_inv_t


@dataclass(frozen=True)
class LatticeCoset:
    """The coset basepoint + M of the weight lattice M = Z^l.

    Attributes:
        basepoint: A representative of the coset.
    """

    basepoint: MVec

    @property
    def rank(self) -> int:
        return len(self.basepoint)

    def contains(self, m: Sequence[Fraction]) -> bool:
        """Two MVecs lie in the same coset iff their difference is integral."""
        return is_integral(sub(m, self.basepoint))

    def canonical(self) -> "LatticeCoset":
        """The same coset with every basepoint coordinate reduced into [0, 1)."""
        return LatticeCoset(tuple(x - integer_part(x) for x in self.basepoint))

    def offset(self) -> MVec:
        """Fractional offsets of the coset, one per coordinate."""
        return self.canonical().basepoint


def extreme_rays(normals: Sequence[Sequence[Fraction]], size: int) -> set[NVec]:
    """Primitive extreme rays of the pointed cone {x : pair(u, x) >= 0 for all u}."""
    found: set[NVec] = set()
    for rows in combinations(normals, size - 1):
        if rank(rows) != size - 1:
            continue
        (direction,) = nullspace(rows, size)
        for sign in (1, -1):
            d = tuple(sign * x for x in direction)
            if all(pair(u, d) >= 0 for u in normals):  # type: ignore[arg-type]
                scale = math.lcm(*(Fraction(x).denominator for x in d))
                found.add(primitive([int(x * scale) for x in d]))
    return found
