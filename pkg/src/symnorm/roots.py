"""Restricted root systems, their Weyl groups, and dominance.

Weights are written in the basis f_i = -(simple restricted root i). The dotted
coordinates of a weight are its coordinates in the basis g_i = -(scaled fundamental
weight i); with the Cartan matrix A (A[i][j] = <alpha_i^vee, alpha_j>) they are
``A @ x``. The dominant chamber C+ is where every dotted coordinate is <= 0.
"""

import logging
import re
from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .config import Limits, get_limits
from .exceptions import CapExceededError, InvariantError, RootSystemError
from .lattice import (
    IntMatrix,
    MVec,
    NVec,
    inverse,
    is_integral,
    mat_vec,
    solve,
    transpose,
)

logger = logging.getLogger(__name__)

MAX_BUILTIN_RANK = 4


def _type_a(rank: int) -> list[list[int]]:
    return [
        [2 if i == j else -1 if abs(i - j) == 1 else 0 for j in range(rank)]
        for i in range(rank)
    ]


def _type_b(rank: int) -> list[list[int]]:
    cartan = _type_a(rank)
    if rank >= 2:
        cartan[rank - 1][rank - 2] = -2
    return cartan


def _type_c(rank: int) -> list[list[int]]:
    return [list(r) for r in zip(*_type_b(rank))]


def _type_d(rank: int) -> list[list[int]]:
    if rank < 4:
        raise RootSystemError(f"Type D needs rank >= 4, got {rank}.")
    cartan = _type_a(rank)
    cartan[rank - 1][rank - 2] = cartan[rank - 2][rank - 1] = 0
    cartan[rank - 1][rank - 3] = cartan[rank - 3][rank - 1] = -1
    return cartan


def _type_g(rank: int) -> list[list[int]]:
    if rank != 2:
        raise RootSystemError("Type G exists only in rank 2.")
    return [[2, -3], [-1, 2]]


def _type_f(rank: int) -> list[list[int]]:
    if rank != 4:
        raise RootSystemError("Type F exists only in rank 4.")
    return [[2, -1, 0, 0], [-1, 2, -2, 0], [0, -1, 2, -1], [0, 0, -1, 2]]


# BC shares its Weyl group and dominance with B; only the lattice differs.
CARTAN_BUILDERS = {
    "A": _type_a,
    "B": _type_b,
    "C": _type_c,
    "BC": _type_b,
    "D": _type_d,
    "G": _type_g,
    "F": _type_f,
}

_COMPONENT = re.compile(r"^(BC|A|B|C|D|G|F)(\d+)$")


def _block_diagonal(blocks: list[list[list[int]]]) -> list[list[int]]:
    size = sum(len(b) for b in blocks)
    out = [[0] * size for _ in range(size)]
    offset = 0
    for block in blocks:
        for i, row in enumerate(block):
            for j, value in enumerate(row):
                out[offset + i][offset + j] = value
        offset += len(block)
    return out


@dataclass(frozen=True)
class RestrictedRootSystem:
    """Cartan data of a restricted root system.

    Attributes:
        label: Type label such as "A2", "BC2", "A1xA1" or "custom".
        cartan: The Cartan matrix of the reduced root system sharing a basis.
    """

    label: str
    cartan: IntMatrix

    def __post_init__(self):
        """Check the Cartan matrix axioms."""
        size = len(self.cartan)
        if size == 0 or any(len(r) != size for r in self.cartan):
            raise RootSystemError(f"Cartan matrix of '{self.label}' must be square.")
        for i in range(size):
            if self.cartan[i][i] != 2:
                raise RootSystemError(f"Cartan diagonal entry {i} must be 2.")
            for j in range(size):
                if i == j:
                    continue
                if self.cartan[i][j] > 0:
                    raise RootSystemError(
                        f"Off-diagonal Cartan entry ({i}, {j}) must be <= 0."
                    )
                if (self.cartan[i][j] == 0) != (self.cartan[j][i] == 0):
                    raise RootSystemError(
                        f"Cartan entries ({i}, {j}) and ({j}, {i}) must vanish together."
                    )

    @property
    def rank(self) -> int:
        return len(self.cartan)

    @property
    def basis_change(self) -> IntMatrix:
        """Columns are the g-coordinates of the f_i."""
        return self.cartan

    @classmethod
    def from_label(cls, label: str) -> "RestrictedRootSystem":
        """Build a built-in root system from a label like "B3" or "A1xA2".

        Raises:
            RootSystemError: If the label is unknown or the rank is out of range.
        """
        blocks = []
        for part in label.replace("×", "x").split("x"):
            match = _COMPONENT.match(part.strip())
            if not match:
                raise RootSystemError(f"Unknown root system type '{part}'.")
            kind, rank = match.group(1), int(match.group(2))
            if not 1 <= rank <= MAX_BUILTIN_RANK:
                raise RootSystemError(
                    f"Built-in types go up to rank {MAX_BUILTIN_RANK}, got '{part}'."
                )
            blocks.append(CARTAN_BUILDERS[kind](rank))
        cartan = _block_diagonal(blocks)
        return cls(label=label, cartan=tuple(tuple(r) for r in cartan))

    @classmethod
    def from_cartan(
        cls, cartan: Sequence[Sequence[int]], label: str = "custom"
    ) -> "RestrictedRootSystem":
        return cls(label=label, cartan=tuple(tuple(int(x) for x in r) for r in cartan))


def dotted_coords(rs: RestrictedRootSystem, m: Sequence[Fraction]) -> MVec:
    """Coordinates of m in the basis g_1, ..., g_l."""
    if len(m) != rs.rank:
        raise RootSystemError(f"Weight of length {len(m)} for rank {rs.rank}.")
    return tuple(Fraction(x) for x in mat_vec(rs.cartan, tuple(Fraction(v) for v in m)))


def fundamental_weight(rs: RestrictedRootSystem, i: int) -> MVec:
    """g_{i+1} in f-coordinates (0-indexed i)."""
    rhs = tuple(Fraction(int(j == i)) for j in range(rs.rank))
    g = solve(rs.cartan, rhs)
    if g is None:
        raise RootSystemError(f"Cartan matrix of '{rs.label}' is singular.")
    return g


def simple_reflection(rs: RestrictedRootSystem, j: int) -> np.ndarray:
    """Matrix of m -> m - xdot_j(m) f_j on f-coordinates (0-indexed j)."""
    if not 0 <= j < rs.rank:
        raise RootSystemError(f"Reflection index {j} out of range for rank {rs.rank}.")
    matrix = np.eye(rs.rank, dtype=np.int64)
    matrix[j, :] -= np.asarray(rs.cartan[j], dtype=np.int64)
    return matrix


def act(w: np.ndarray, m: Sequence[Fraction]) -> MVec:
    """Apply a group element (integer matrix on f-coordinates) to a weight."""
    rows = tuple(tuple(int(x) for x in row) for row in w)
    return tuple(Fraction(x) for x in mat_vec(rows, tuple(Fraction(v) for v in m)))


def act_n(w_n: np.ndarray, n: Sequence[int]) -> NVec:
    """Apply the contragredient action (integer matrix on e-coordinates)."""
    return tuple(int(x) for x in w_n @ np.asarray(n, dtype=np.int64))


@dataclass(frozen=True)
class WeylGroup:
    """A finite restricted Weyl group.

    Attributes:
        root_system: The root system generating the group.
        elements: Integer matrices acting on f-coordinates; the identity comes first.
        n_elements: The contragredient matrices acting on e-coordinates, aligned with
            ``elements`` so that pair(w m, w n) = pair(m, n).
    """

    root_system: RestrictedRootSystem
    elements: tuple[np.ndarray, ...] = field(repr=False)
    n_elements: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def generators(self) -> tuple[np.ndarray, ...]:
        return tuple(
            simple_reflection(self.root_system, j)
            for j in range(self.root_system.rank)
        )

    def __len__(self) -> int:
        return len(self.elements)

    def orbit(self, m: Sequence[Fraction]) -> set[MVec]:
        return {act(w, m) for w in self.elements}

    def orbit_n(self, n: Sequence[int]) -> set[NVec]:
        return {act_n(w, n) for w in self.n_elements}


@lru_cache(maxsize=32)
def _closure(cartan: IntMatrix, cap: int) -> tuple[tuple[bytes, ...], tuple[bytes, ...]]:
    rank = len(cartan)
    identity = np.eye(rank, dtype=np.int64)
    gens = []
    for j in range(rank):
        s = identity.copy()
        s[j, :] -= np.asarray(cartan[j], dtype=np.int64)
        gens.append(s)

    seen = {identity.tobytes(): identity.tobytes()}
    queue = deque([(identity, identity)])
    while queue:
        u_m, u_n = queue.popleft()
        for s in gens:
            v_m = s @ u_m
            key = v_m.tobytes()
            if key in seen:
                continue
            seen[key] = (s.T @ u_n).tobytes()
            if len(seen) > cap:
                raise CapExceededError("weyl_order", cap, len(seen))
            queue.append((v_m, s.T @ u_n))
    return tuple(seen.keys()), tuple(seen.values())


def generate_weyl_group(
    rs: RestrictedRootSystem, limits: Limits | None = None
) -> WeylGroup:
    """Breadth-first closure of the simple reflections.

    Args:
        rs: The root system.
        limits: Caps to enforce. Uses the process-wide limits if None.

    Returns:
        The WeylGroup with identity first.

    Raises:
        CapExceededError: If the group has more elements than ``limits.weyl_order``.
    """
    limits = limits or get_limits()
    m_keys, n_keys = _closure(rs.cartan, limits.weyl_order)
    shape = (rs.rank, rs.rank)
    elements = tuple(np.frombuffer(k, dtype=np.int64).reshape(shape) for k in m_keys)
    n_elements = tuple(
        np.frombuffer(k, dtype=np.int64).reshape(shape) for k in n_keys
    )
    logger.info("Weyl group of %s has %d elements", rs.label, len(elements))
    return WeylGroup(root_system=rs, elements=elements, n_elements=n_elements)


def is_dominant(rs: RestrictedRootSystem, m: Sequence[Fraction]) -> bool:
    """True iff every dotted coordinate of m is <= 0."""
    return all(x <= 0 for x in dotted_coords(rs, m))


def is_regular(rs: RestrictedRootSystem, m: Sequence[Fraction]) -> bool:
    """True iff every dotted coordinate of m is < 0."""
    return all(x < 0 for x in dotted_coords(rs, m))


def dominant_representative(
    rs: RestrictedRootSystem, weyl: WeylGroup, m: Sequence[Fraction]
) -> tuple[np.ndarray, MVec]:
    """Move m into C+ by simple reflections, smallest index first.

    Returns:
        (w, m_dom) with m_dom = w m dominant.

    Raises:
        InvariantError: If the walk does not terminate within |W| steps.
    """
    w = np.eye(rs.rank, dtype=np.int64)
    current = tuple(Fraction(x) for x in m)
    for _ in range(len(weyl) + 1):
        dotted = dotted_coords(rs, current)
        j = next((i for i, x in enumerate(dotted) if x > 0), None)
        if j is None:
            return w, current
        s = simple_reflection(rs, j)
        current = act(s, current)
        w = s @ w
    raise InvariantError(f"Dominance walk for {tuple(m)} did not terminate.")


@dataclass(frozen=True)
class SphericalLattice:
    """A lattice of weights containing M, given by l generators in f-coordinates.

    Attributes:
        generators: Generators of the lattice.
    """

    generators: tuple[MVec, ...]

    def __post_init__(self):
        """Ensure the generators are a basis of a lattice containing M."""
        size = len(self.generators)
        if size == 0 or any(len(g) != size for g in self.generators):
            raise RootSystemError("Lattice needs l generators of length l.")
        basis = transpose(self.generators)
        try:
            inv = inverse(basis)
        except ValueError as e:
            raise RootSystemError("Lattice generators are linearly dependent.") from e
        # Every f_i must be an integral combination of the generators.
        if not all(is_integral(row) for row in inv):
            raise RootSystemError("Lattice generators do not span a lattice over M.")

    @property
    def rank(self) -> int:
        return len(self.generators)

    @classmethod
    def standard(cls, rank: int) -> "SphericalLattice":
        """The weight lattice M itself."""
        return cls(
            tuple(tuple(Fraction(int(i == j)) for j in range(rank)) for i in range(rank))
        )

    @classmethod
    def spherical(cls, rs: RestrictedRootSystem) -> "SphericalLattice":
        """The lattice spanned by the -g_i."""
        return cls(
            tuple(
                tuple(-x for x in fundamental_weight(rs, i)) for i in range(rs.rank)
            )
        )

    def contains(self, m: Sequence[Fraction]) -> bool:
        coefficients = solve(transpose(self.generators), tuple(Fraction(x) for x in m))
        return coefficients is not None and is_integral(coefficients)
