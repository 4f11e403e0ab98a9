"""Top level functions: decode job descriptions, run them, render the reports."""

import csv
import dataclasses
import io
import json
import logging
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np
import tomli_w
from pydantic import BaseModel, ValidationError

from .bundles import (
    PLFunction,
    bundle_status,
    convexity_violation,
    from_ray_values,
    is_convex,
    is_strictly_convex,
    weyl_extend,
)
from .catalog import catalog, identify
from .config import Limits, get_limits
from .exceptions import BaseError, JobError
from .fans import (
    Fan,
    FanKind,
    is_proper_over_orthant,
    is_smooth,
    symmetrize,
    validate_fan,
)
from .lattice import mvec
from .models import (
    BundleSpec,
    EquivalenceReport,
    FanSpec,
    JobSpec,
    LatticeSpec,
    Manifest,
    ReportCollector,
    RootSpec,
)
from .normality import (
    check_equivalence,
    check_orthant_generation,
    check_saturation,
    check_sum_complete,
    check_sum_open,
    check_wall_strip,
)
from .polyhedra import (
    active_cones,
    complete_polytope,
    is_bounded,
    minimal_lattice_points,
    open_polyhedron,
    vertices,
    weight_sets,
)
from .roots import (
    RestrictedRootSystem,
    SphericalLattice,
    WeylGroup,
    generate_weyl_group,
)
from .splitters import split  # Ensures all splitters get registered
from .splitters.tilted import check_tilted_tower

logger = logging.getLogger(__name__)

FORMATS = ("json", "toml", "csv")


def _validation_message(error: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(x) for x in e['loc']) or '<root>'}: {e['msg']}"
        for e in error.errors()
    )


def parse_job(data: JobSpec | dict[str, Any]) -> JobSpec:
    """Validate a job description.

    Raises:
        JobError: With the location path of every schema violation.
    """
    if isinstance(data, JobSpec):
        return data
    try:
        return JobSpec.model_validate(data)
    except ValidationError as e:
        raise JobError(f"Invalid job: {_validation_message(e)}") from e


def decode_root(spec: str | RootSpec | None) -> RestrictedRootSystem | None:
    """A root system from a label such as "A1xA1" or a RootSpec."""
    if spec is None:
        return None
    if isinstance(spec, str):
        return RestrictedRootSystem.from_label(spec)
    if spec.type is not None:
        return RestrictedRootSystem.from_label(spec.type)
    assert spec.cartan is not None  # for mypy
    return RestrictedRootSystem.from_cartan(spec.cartan)


def _read_json(text: str, what: str) -> Any:
    source = text if text.lstrip().startswith(("{", "[")) else None
    if source is None:
        path = Path(text)
        if not path.is_file():
            raise JobError(f"{what} '{text}' is neither JSON nor a readable file.")
        source = path.read_text()
    try:
        return json.loads(source)
    except json.JSONDecodeError as e:
        raise JobError(f"{what} is not valid JSON: {e}") from e


def resolve_fan(spec: str | FanSpec | None) -> Fan:
    """A fan from ``catalog:<name>[:<param>...]``, inline JSON, a JSON path or a FanSpec.

    Raises:
        JobError: If no fan is given or the description does not validate.
        FanError: If the catalog rejects the name or parameters.
    """
    if spec is None:
        raise JobError("This command needs a fan.")
    if isinstance(spec, str):
        if spec.startswith("catalog:"):
            name, *params = spec.split(":")[1:]
            try:
                return catalog(name, *(int(p) for p in params))
            except ValueError as e:
                raise JobError(f"Catalog parameters must be integers: '{spec}'.") from e
        try:
            spec = FanSpec.model_validate(_read_json(spec, "Fan"))
        except ValidationError as e:
            raise JobError(f"Invalid fan: {_validation_message(e)}") from e
    return Fan(spec.rank, spec.rays, spec.max_cones, FanKind(spec.kind))


def _lattice(
    spec: str | LatticeSpec, rank: int, rs: RestrictedRootSystem | None
) -> SphericalLattice:
    if isinstance(spec, LatticeSpec):
        return SphericalLattice(tuple(mvec(g) for g in spec.generators))
    if spec == "default" and rs is not None:
        return SphericalLattice.spherical(rs)
    return SphericalLattice.standard(rank)


def decode_bundle(
    spec: BundleSpec, fan: Fan | None, rs: RestrictedRootSystem | None
) -> PLFunction:
    """A piecewise-linear function from a BundleSpec.

    The bundle's own fan takes precedence over the job fan. The default lattice is the
    spherical lattice when a root system is given and M otherwise.
    """
    if spec.fan is not None:
        fan = resolve_fan(spec.fan)
    if fan is None:
        raise JobError("A bundle needs a fan.")
    return from_ray_values(fan, spec.values, _lattice(spec.lattice, fan.rank, rs))


@dataclasses.dataclass
class Context:
    """Decoded inputs of one job."""

    job: JobSpec
    limits: Limits
    rs: RestrictedRootSystem | None
    fan: Fan | None
    bundles: list[PLFunction]

    def root(self) -> RestrictedRootSystem:
        if self.rs is None:
            raise JobError(f"Command '{self.job.command}' needs a root system.")
        return self.rs

    def weyl(self) -> WeylGroup:
        return generate_weyl_group(self.root(), self.limits)

    def bundle_pair(self) -> tuple[PLFunction, PLFunction]:
        if not 1 <= len(self.bundles) <= 2:
            raise JobError(f"Expected one or two bundles, got {len(self.bundles)}.")
        h = self.bundles[0]
        return h, self.bundles[-1]

    def single(self) -> PLFunction:
        if len(self.bundles) != 1:
            raise JobError(f"Expected one bundle, got {len(self.bundles)}.")
        return self.bundles[0]

    def option(self, name: str, default: Any = None) -> Any:
        return self.job.options.get(name, default)


def _fan_report(ctx: Context) -> dict[str, Any]:
    fan = resolve_fan(ctx.job.fan)
    report = validate_fan(fan)
    result: dict[str, Any] = {
        "fan": fan,
        "valid": report.valid,
        "violations": report.violations,
        "smooth": is_smooth(fan),
        "families": [list(m) for m in identify(fan)],
    }
    if fan.kind is FanKind.OPEN:
        result["proper"] = is_proper_over_orthant(fan)
    return result


def _symmetrize(ctx: Context) -> Fan:
    return symmetrize(resolve_fan(ctx.job.fan), ctx.weyl())


def _ample(ctx: Context) -> dict[str, Any]:
    h = ctx.single()
    status = bundle_status(h, ctx.rs)
    return {
        "gg": status.gg,
        "ample": status.ample,
        "convex": is_convex(h),
        "strictly_convex": is_strictly_convex(h),
        "violation": convexity_violation(h),
    }


def _polytope(ctx: Context) -> dict[str, Any]:
    h = ctx.single()
    Q = open_polyhedron(h)
    result: dict[str, Any] = {"vertices_q": vertices(Q, ctx.limits)}
    if ctx.rs is not None:
        hc = weyl_extend(h, ctx.weyl())
        P = complete_polytope(hc)
        result["vertices_p"] = vertices(P, ctx.limits)
        result["bounded"] = is_bounded(P)
        result["active_cones"] = active_cones(P, hc)
    return result


def _pi_sets(ctx: Context) -> dict[str, Any]:
    sets = weight_sets(ctx.single(), ctx.root(), ctx.weyl(), ctx.limits)
    return {
        "pi_z": {"inequalities": sets.pi_z.inequalities, "coset": sets.pi_z.coset},
        "pi_zc": sets.pi_zc.points,
        "pi_y": sets.pi_y.points,
        "orbit_identity_holds": sets.orbit_identity_holds,
        "open_dominant_agrees": sets.open_dominant_agrees,
    }


def _check(ctx: Context) -> Any:
    mode = ctx.option("mode", "open")
    witnesses = bool(ctx.option("witnesses", False))
    if mode == "tilted":
        return check_tilted_tower(ctx.single(), ctx.limits)
    h, k = ctx.bundle_pair()
    if mode == "open":
        return check_sum_open(h, k, ctx.limits, witnesses)
    if mode == "complete":
        return check_sum_complete(h, k, ctx.root(), ctx.weyl(), ctx.limits, witnesses)
    if mode == "equivalence":
        return check_equivalence(h, k, ctx.root(), ctx.weyl(), ctx.limits)
    raise JobError(f"Unknown check mode '{mode}'.")


def _split(ctx: Context) -> Any:
    h, k = ctx.bundle_pair()
    algorithm = ctx.option("algorithm", "auto")
    point = ctx.option("point")
    if point is not None:
        return split(h, k, mvec(point), algorithm)
    targets = minimal_lattice_points(open_polyhedron(h + k), ctx.limits)
    found = [split(h, k, m, algorithm) for m in targets]
    return {"algorithm": algorithm, "count": len(found), "witnesses": found}


def _saturation(ctx: Context) -> Any:
    h, k = ctx.bundle_pair()
    return check_saturation(h, k, ctx.root(), ctx.weyl(), ctx.limits)


def _rj_check(ctx: Context) -> Any:
    h = ctx.single()
    rs, weyl = ctx.root(), ctx.weyl()
    index = ctx.option("index")
    if index is not None:
        if not 1 <= int(index) <= rs.rank:
            raise JobError(f"Index {index} is not in 1..{rs.rank}.")
        return check_wall_strip(h, int(index) - 1, rs, weyl, ctx.limits)
    return [check_wall_strip(h, j, rs, weyl, ctx.limits) for j in range(rs.rank)]


def _l1_check(ctx: Context) -> Any:
    return check_orthant_generation(
        ctx.single(),
        ctx.root(),
        ctx.weyl(),
        ctx.limits,
        deep_samples=int(ctx.option("deep_samples", 100)),
        seed=int(ctx.option("seed", 0)),
    )


COMMANDS: dict[str, Callable[[Context], Any]] = {
    "validate-fan": _fan_report,
    "symmetrize": _symmetrize,
    "ample": _ample,
    "polytope": _polytope,
    "pi-sets": _pi_sets,
    "check": _check,
    "split": _split,
    "saturation": _saturation,
    "rj-check": _rj_check,
    "l1-check": _l1_check,
}


def run(job: JobSpec | dict[str, Any], limits: Limits | None = None) -> Any:
    """Run one job and return its report object.

    Args:
        job: The job, as a JobSpec or its dictionary form.
        limits: Enumeration caps. Uses the process-wide limits if None.

    Returns:
        The report of the named command: a CheckReport, SplitWitness, Fan or a
        dictionary of results.

    Raises:
        JobError: If the job does not validate or lacks an input its command needs.
        BaseError: Whatever the command raises for invalid mathematical input.
    """
    job = parse_job(job)
    logger.info("Running job %s (%s)", job.name or "<unnamed>", job.command)
    rs = decode_root(job.root)
    fan = None
    if job.fan is not None and job.command not in ("validate-fan", "symmetrize"):
        fan = resolve_fan(job.fan)
    bundles = [decode_bundle(b, fan, rs) for b in job.bundles]
    ctx = Context(job, limits or get_limits(), rs, fan, bundles)
    return COMMANDS[job.command](ctx)


def _run_entry(data: dict[str, Any], limits: Limits) -> dict[str, Any]:
    """Run one manifest entry, turning errors into an error record."""
    try:
        result = run(data, limits)
    except BaseError as e:
        logger.error("Job failed: %s", e)
        return {"status": "error", "error": type(e).__name__, "message": str(e)}
    entry: dict[str, Any] = {"status": "ok", "result": to_jsonable(result)}
    if isinstance(result, EquivalenceReport) and not result.agree:
        entry["status"] = "disagree"
    return entry


def load_manifest(source: str | Path | dict[str, Any]) -> Manifest:
    """Read a batch manifest from a path or its dictionary form.

    Raises:
        JobError: If the manifest cannot be read or does not validate.
    """
    if not isinstance(source, dict):
        try:
            source = json.loads(Path(source).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise JobError(f"Cannot read manifest '{source}': {e}") from e
    try:
        return Manifest.model_validate(source)
    except ValidationError as e:
        raise JobError(f"Invalid manifest: {_validation_message(e)}") from e


def run_batch(
    source: str | Path | dict[str, Any],
    jobs: int | None = None,
    limits: Limits | None = None,
) -> tuple[ReportCollector, bool]:
    """Run every job of a manifest.

    Args:
        source: Manifest path or dictionary.
        jobs: Worker processes; defaults to ``limits.max_workers``.
        limits: Enumeration caps passed to every job.

    Returns:
        (collector, ok) where ok is False if any job errored or any equivalence check
        disagreed.
    """
    manifest = load_manifest(source)
    limits = limits or get_limits()
    jobs = jobs or limits.max_workers
    names = [
        str(entry.get("name") or f"job-{i}") for i, entry in enumerate(manifest.jobs)
    ]
    logger.info("Running %d jobs with %d worker(s)", len(names), jobs)
    if jobs > 1 and len(manifest.jobs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            entries = list(
                pool.map(_run_entry, manifest.jobs, [limits] * len(manifest.jobs))
            )
    else:
        entries = [_run_entry(entry, limits) for entry in manifest.jobs]
    collector = ReportCollector()
    for name, entry in zip(names, entries):
        collector.add_report(name, entry)
    ok = all(entry["status"] == "ok" for entry in entries)
    return collector, ok


def to_jsonable(obj: Any) -> Any:
    """Plain JSON data: rationals as "p/q" strings, enums by value, tuples as lists."""
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (bool, int, float, str)) or obj is None:
        return obj
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, BaseModel):
        return obj.model_dump(exclude_none=True)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {
            f.name: to_jsonable(getattr(obj, f.name))
            for f in dataclasses.fields(obj)
            if f.repr and not f.name.startswith("_")
        }
    if isinstance(obj, dict):
        return {str(key): to_jsonable(value) for key, value in obj.items()}
    if isinstance(obj, (set, frozenset)):
        try:
            obj = sorted(obj)
        except TypeError:
            obj = list(obj)
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    raise TypeError(f"Cannot serialize {type(obj).__name__}.")


def _drop_none(data: Any) -> Any:
    if isinstance(data, dict):
        return {k: _drop_none(v) for k, v in data.items() if v is not None}
    if isinstance(data, list):
        return [_drop_none(x) for x in data if x is not None]
    return data


def _csv(data: Any) -> str:
    if isinstance(data, dict) and data and all(isinstance(v, dict) for v in data.values()):
        rows = [{"name": name, **value} for name, value in data.items()]
    elif isinstance(data, list):
        rows = [x if isinstance(x, dict) else {"value": x} for x in data]
    else:
        rows = [data if isinstance(data, dict) else {"value": data}]
    flat = [
        {
            key: value if isinstance(value, (str, int, float, bool)) or value is None
            else json.dumps(value, sort_keys=True)
            for key, value in row.items()
        }
        for row in rows
    ]
    columns = sorted({key for row in flat for key in row})
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(flat)
    return buffer.getvalue()


def render(result: Any, fmt: str = "json") -> str:
    """Serialize a report as JSON (sorted keys), TOML or a CSV summary table."""
    data = to_jsonable(result)
    if fmt == "json":
        return json.dumps(data, indent=2, sort_keys=True)
    if fmt == "toml":
        table = data if isinstance(data, dict) else {"results": data}
        return tomli_w.dumps(_drop_none(table))
    if fmt == "csv":
        return _csv(data)
    raise JobError(f"Unknown output format '{fmt}'. Known: {list(FORMATS)}")
