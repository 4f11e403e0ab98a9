"""Report types returned by the checks and splitters, the job schemas read by the CLI,
and the collector that gathers batch results."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .exceptions import ReportCollectorError
from .lattice import MVec


class Verdict(str, Enum):
    """Outcome of a surjectivity check."""

    SURJECTIVE = "surjective"
    NOT_SURJECTIVE = "not_surjective"
    UNSUPPORTED = "unsupported"


class Outcome(str, Enum):
    """Outcome of a structural diagnostic."""

    HOLDS = "holds"
    VIOLATED = "violated"
    UNSUPPORTED = "unsupported"


class Mode(str, Enum):
    """Which side of the correspondence a check runs on."""

    OPEN = "open"
    COMPLETE = "complete"


@dataclass
class Decomposition:
    """m = m1 + m2 with m1, m2 in the respective weight sets."""

    m: MVec
    m1: MVec
    m2: MVec


@dataclass
class CheckReport:
    """Result of a surjectivity check.

    Attributes:
        verdict: The verdict.
        mode: Open (Q side) or complete (P side).
        decompositions: One decomposition per target point when requested.
        counterexamples: Target points with no decomposition.
        statistics: Counts and timing.
        conditions: Named side conditions evaluated along the way.
        notes: Free-form remarks.
    """

    verdict: Verdict
    mode: Mode
    decompositions: list[Decomposition] = field(default_factory=list)
    counterexamples: list[MVec] = field(default_factory=list)
    statistics: dict[str, Any] = field(default_factory=dict)
    conditions: dict[str, bool] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def surjective(self) -> bool:
        return self.verdict is Verdict.SURJECTIVE


@dataclass
class SplitWitness:
    """A decomposition produced by a constructive splitter.

    Attributes:
        algorithm: Name of the splitter.
        m: The split point.
        m1: Summand in the first weight set.
        m2: Summand in the second weight set.
        trace: Steps taken (rounding choices, recursion cuts, index selections).
    """

    algorithm: str
    m: MVec
    m1: MVec
    m2: MVec
    trace: list[dict[str, Any]] = field(default_factory=list)


@dataclass
class Descent:
    """p = p_prime + sum_i coefficients[i] f_i with p_prime in P_h and C+."""

    p: MVec
    p_prime: MVec
    coefficients: tuple[int, ...]
    steps: list[int] = field(default_factory=list)


@dataclass
class Transfer:
    """A complete-side decomposition obtained by moving f_j from q to p."""

    m: MVec
    p: MVec
    q: MVec
    steps: list[int] = field(default_factory=list)


@dataclass
class EquivalenceReport:
    """Paired open and complete checks.

    Attributes:
        open: The open-side report.
        complete: The complete-side report.
        agree: Whether both verdicts coincide.
        transfers: Number of open decompositions carried to the complete side.
        counterexample: The bundle data of a disagreement, if any.
    """

    open: CheckReport
    complete: CheckReport
    agree: bool
    transfers: int = 0
    counterexample: dict[str, Any] | None = None


@dataclass
class WallStripReport:
    """Check that p' +- f_j / 2 lies in Q_h for each vertex p' of P_h on the wall H_j."""

    index: int
    outcome: Outcome
    vertices: list[MVec] = field(default_factory=list)
    failures: list[MVec] = field(default_factory=list)
    reason: str | None = None


@dataclass
class SaturationReport:
    """Dominant-order saturation of the dominant part of a sumset."""

    outcome: Outcome
    sumset_size: int
    violations: list[tuple[MVec, MVec]] = field(default_factory=list)
    note: str = ""


@dataclass
class OrthantGenerationReport:
    """Agreement of Q_h and P_h on C+ and generation of Q_h from P_h by the f_i."""

    outcome: Outcome
    vertices_agree: bool = False
    points_agree: bool = False
    descents_checked: int = 0
    failures: list[MVec] = field(default_factory=list)
    reason: str | None = None


class ReportCollector(dict):
    """A dictionary for collecting batch results by job name."""

    def add_report(self, name: str, report: Any) -> None:
        """Store a job's report, refusing to overwrite an existing name."""
        if name in self:
            raise ReportCollectorError(
                f"Job '{name}' already exists in ReportCollector. Job names must be unique."
            )
        self[name] = report


Rational = int | str

COMMANDS = (
    "validate-fan",
    "symmetrize",
    "ample",
    "polytope",
    "pi-sets",
    "check",
    "split",
    "saturation",
    "rj-check",
    "l1-check",
)


class _Schema(BaseModel):
    model_config = ConfigDict(extra="forbid")


class RootSpec(_Schema):
    """Root system descriptor: a built-in type label or a custom Cartan matrix."""

    type: str | None = None
    cartan: list[list[int]] | None = None
    rank: int | None = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _one_source(self) -> "RootSpec":
        if (self.type is None) == (self.cartan is None):
            raise ValueError("give exactly one of 'type' or 'cartan'")
        if self.cartan is not None and self.rank is not None:
            if self.rank != len(self.cartan):
                raise ValueError(
                    f"rank {self.rank} does not match a {len(self.cartan)}-row cartan"
                )
        return self


class FanSpec(_Schema):
    """Inline fan: rays by coordinates, maximal cones by ray index."""

    rank: int = Field(gt=0)
    rays: list[list[int]]
    max_cones: list[list[int]]
    kind: Literal["open", "complete"] = "open"

    @model_validator(mode="after")
    def _references(self) -> "FanSpec":
        for i, ray in enumerate(self.rays):
            if len(ray) != self.rank:
                raise ValueError(f"rays.{i} has length {len(ray)}, expected {self.rank}")
        for i, cone in enumerate(self.max_cones):
            for index in cone:
                if not 0 <= index < len(self.rays):
                    raise ValueError(f"max_cones.{i} references missing ray {index}")
        return self


class LatticeSpec(_Schema):
    """Generators of the lattice the linear parts must lie in."""

    generators: list[list[Rational]]


class BundleSpec(_Schema):
    """Bundle descriptor: ray values (by index or in ray order) and a lattice."""

    fan: str | FanSpec | None = None
    values: dict[str, Rational] | list[Rational]
    lattice: Literal["default", "standard"] | LatticeSpec = "default"


class JobSpec(_Schema):
    """One unit of work for the CLI or a batch manifest."""

    name: str | None = None
    command: Literal[COMMANDS]  # type: ignore[valid-type]
    root: str | RootSpec | None = None
    fan: str | FanSpec | None = None
    bundles: list[BundleSpec] = Field(default_factory=list)
    options: dict[str, Any] = Field(default_factory=dict)


class Manifest(_Schema):
    """Batch manifest; each job is validated on its own so one bad job fails alone."""

    jobs: list[dict[str, Any]] = Field(default_factory=list)
