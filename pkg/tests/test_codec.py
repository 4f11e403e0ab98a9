import json
from enum import Enum
from fractions import Fraction

import numpy as np
import pytest

from symnorm.codec import (
    load_manifest,
    parse_job,
    render,
    resolve_fan,
    run,
    run_batch,
    to_jsonable,
)
from symnorm.config import Limits
from symnorm.exceptions import (
    CapExceededError,
    FanError,
    JobError,
    ReportCollectorError,
)
from symnorm.fans import Fan, FanKind
from symnorm.lattice import mvec
from symnorm.models import CheckReport, Outcome, Verdict

AMPLE = {
    "command": "ample",
    "root": "A1xA1",
    "fan": "catalog:blowup:2:2",
    "bundles": [{"values": [-2, -2, -3]}],
}

CENTER = {"fan": "catalog:blowup2", "bundles": [{"values": [0, 0, 1]}]}


def test_run_ample(limits):
    result = run(AMPLE, limits)
    assert result == {
        "gg": True,
        "ample": True,
        "convex": True,
        "strictly_convex": True,
        "violation": None,
    }


def test_run_ample_reports_violation(limits):
    job = {
        "command": "ample",
        "fan": "catalog:blowup2",
        "bundles": [{"values": [0, 0, -1]}],
    }
    result = run(job, limits)
    assert not result["convex"]
    assert not result["gg"]
    assert result["violation"] is not None


def test_run_validate_fan(limits):
    result = run({"command": "validate-fan", "fan": "catalog:blowup2"}, limits)
    assert result["valid"] and result["smooth"] and result["proper"]
    assert result["violations"] == []
    assert ["blowup", (2, 2)] in result["families"]


def test_run_validate_inline_fan(limits):
    fan = {"rank": 2, "rays": [[1, 0], [1, 1], [1, -1]], "max_cones": [[0, 1], [1, 2]]}
    result = run({"command": "validate-fan", "fan": fan}, limits)
    assert not result["valid"]
    assert not result["proper"]
    assert result["families"] == []
    assert result["fan"] == Fan(2, ((1, 0), (1, 1), (1, -1)), ((0, 1), (1, 2)))


def test_fan_from_json_file(tmp_path):
    path = tmp_path / "fan.json"
    path.write_text(
        json.dumps({"rank": 2, "rays": [[1, 0], [0, 1]], "max_cones": [[0, 1]]})
    )
    fan = resolve_fan(str(path))
    assert fan.max_cones == ((0, 1),)


@pytest.mark.parametrize(
    "spec,error",
    [
        (None, JobError),
        ("catalog:blowup:x", JobError),
        ("catalog:nope", FanError),
        ("missing.json", JobError),
        ('{"rank": 2, "rays": [[1, 0]], "max_cones": [[0, 3]]}', JobError),
        ('{"rank": 2', JobError),
    ],
)
def test_resolve_fan_errors(spec, error):
    with pytest.raises(error):
        resolve_fan(spec)


def test_run_symmetrize(limits):
    fan = run(
        {"command": "symmetrize", "root": "A1xA1", "fan": "catalog:blowup:2:2"}, limits
    )
    assert fan.kind is FanKind.COMPLETE
    assert len(fan.max_cones) == 8


def test_run_symmetrize_with_cartan(limits):
    fan = run(
        {
            "command": "symmetrize",
            "root": {"cartan": [[2, -1], [-1, 2]]},
            "fan": "catalog:blowup2",
        },
        limits,
    )
    assert len(fan.max_cones) == 12


def test_run_polytope(limits):
    result = run({**AMPLE, "command": "polytope"}, limits)
    assert result["vertices_q"] == [mvec([-2, -1]), mvec([-1, -2])]
    assert len(result["vertices_p"]) == 8
    assert result["bounded"]
    assert all(part is not None for part in result["active_cones"].values())


def test_run_polytope_without_root(limits):
    result = run({"command": "polytope", **CENTER}, limits)
    assert result == {"vertices_q": [mvec([0, 1]), mvec([1, 0])]}


def test_run_pi_sets(limits):
    result = run({**AMPLE, "command": "pi-sets"}, limits)
    assert len(result["pi_zc"]) == 21
    assert len(result["pi_y"]) == 8
    assert result["orbit_identity_holds"] and result["open_dominant_agrees"]


def test_pi_sets_need_root(limits):
    with pytest.raises(JobError, match="needs a root system"):
        run({"command": "pi-sets", **CENTER}, limits)


def test_run_check_open(limits):
    report = run(
        {"command": "check", **CENTER, "options": {"witnesses": True}}, limits
    )
    assert isinstance(report, CheckReport)
    assert report.verdict is Verdict.SURJECTIVE
    assert len(report.decompositions) == 3


def test_run_check_with_two_bundles(limits):
    job = {
        "command": "check",
        "fan": "catalog:blowup2",
        "bundles": [{"values": [0, 0, 1]}, {"values": {"0": 2, "1": -1, "2": 3}}],
    }
    assert run(job, limits).surjective


def test_run_check_equivalence(limits):
    report = run({**AMPLE, "command": "check", "options": {"mode": "equivalence"}}, limits)
    assert report.agree
    assert report.transfers == 22


def test_run_check_tilted(limits):
    job = {
        "command": "check",
        "fan": "catalog:tilted:3:1",
        "bundles": [{"values": [0, 0, 0, 2, 3]}],
        "options": {"mode": "tilted"},
    }
    report = run(job, limits)
    assert report.surjective
    assert all(report.conditions.values())


def test_run_check_unknown_mode(limits):
    with pytest.raises(JobError, match="Unknown check mode"):
        run({"command": "check", **CENTER, "options": {"mode": "sideways"}}, limits)


def test_run_check_bundle_count(limits):
    job = {"command": "check", "fan": "catalog:blowup2", "bundles": []}
    with pytest.raises(JobError, match="one or two bundles"):
        run(job, limits)


def test_run_split_point(limits):
    job = {
        "command": "split",
        **CENTER,
        "options": {"point": ["1", "1"], "algorithm": "blowup"},
    }
    witness = run(job, limits)
    assert witness.m1 == mvec([1, 0])
    assert witness.m2 == mvec([0, 1])


def test_run_split_minimal_layer(limits):
    result = run({"command": "split", **CENTER}, limits)
    assert result["algorithm"] == "auto"
    assert result["count"] == 3
    assert {w.algorithm for w in result["witnesses"]} == {"blowup"}


def test_run_rj_check(limits):
    report = run({**AMPLE, "command": "rj-check", "options": {"index": 1}}, limits)
    assert report.index == 0
    assert report.outcome is Outcome.HOLDS
    reports = run({**AMPLE, "command": "rj-check"}, limits)
    assert [r.index for r in reports] == [0, 1]
    with pytest.raises(JobError):
        run({**AMPLE, "command": "rj-check", "options": {"index": 3}}, limits)


def test_run_l1_check(limits):
    job = {**AMPLE, "command": "l1-check", "options": {"deep_samples": 5, "seed": 3}}
    report = run(job, limits)
    assert report.outcome is Outcome.HOLDS
    assert report.descents_checked == 7


def test_run_saturation(limits):
    report = run({**AMPLE, "command": "saturation"}, limits)
    assert report.outcome is Outcome.HOLDS


def test_run_respects_limits():
    with pytest.raises(CapExceededError):
        run({**AMPLE, "command": "pi-sets"}, Limits(box_points=5))


def test_bundle_needs_a_fan(limits):
    with pytest.raises(JobError, match="needs a fan"):
        run({"command": "ample", "bundles": [{"values": [0, 0, 1]}]}, limits)


def test_bundle_with_own_fan(limits):
    job = {"command": "ample", "bundles": [{"fan": "catalog:blowup2", "values": [0, 0, 1]}]}
    assert run(job, limits)["strictly_convex"]


@pytest.mark.parametrize(
    "job,location",
    [
        ({"command": "decode"}, "command"),
        ({"command": "check", "extra": 1}, "extra"),
        ({"command": "check", "root": {"type": "A2", "cartan": [[2]]}}, "root"),
        ({"command": "check", "bundles": [{"values": [0], "lattice": 4}]}, "bundles.0"),
    ],
)
def test_parse_job_errors(job, location):
    with pytest.raises(JobError, match=location):
        parse_job(job)


def test_run_batch():
    manifest = {
        "jobs": [
            {"name": "ample", **AMPLE},
            {"name": "broken", "command": "check", "fan": "catalog:nope"},
            {"command": "validate-fan", "fan": "catalog:chamber:2"},
        ]
    }
    collector, ok = run_batch(manifest, limits=Limits(box_points=200_000))
    assert not ok
    assert list(collector) == ["ample", "broken", "job-2"]
    assert collector["ample"]["status"] == "ok"
    assert collector["ample"]["result"]["ample"] is True
    assert collector["broken"]["status"] == "error"
    assert collector["broken"]["error"] == "FanError"
    assert "Unknown fan family 'nope'" in collector["broken"]["message"]
    assert collector["job-2"]["result"]["valid"] is True


def test_run_batch_with_workers():
    manifest = {"jobs": [{"name": str(i), **AMPLE} for i in range(3)]}
    collector, ok = run_batch(manifest, jobs=2, limits=Limits(box_points=200_000))
    assert ok
    assert sorted(collector) == ["0", "1", "2"]


def test_run_batch_empty_manifest():
    collector, ok = run_batch({"jobs": []})
    assert ok
    assert collector == {}


def test_run_batch_duplicate_names():
    manifest = {"jobs": [{"name": "same", **AMPLE}, {"name": "same", **AMPLE}]}
    with pytest.raises(ReportCollectorError):
        run_batch(manifest)


def test_run_batch_from_file(test_data_dir):
    collector, ok = run_batch(test_data_dir / "acceptance.json")
    assert ok, {name: e for name, e in collector.items() if e["status"] != "ok"}


def test_load_manifest_errors(tmp_path):
    with pytest.raises(JobError):
        load_manifest(tmp_path / "missing.json")
    with pytest.raises(JobError):
        load_manifest({"jobs": 3})
    path = tmp_path / "manifest.json"
    path.write_text("{not json")
    with pytest.raises(JobError):
        load_manifest(path)


class Color(Enum):
    RED = "red"


def test_to_jsonable():
    data = {
        "fraction": Fraction(-1, 2),
        "enum": Color.RED,
        "numpy": np.int64(3),
        "array": np.eye(2, dtype=np.int64),
        "set": {(1, 0), (0, 1)},
        "tuple": (Fraction(1), None, True),
        3: "key",
    }
    assert to_jsonable(data) == {
        "fraction": "-1/2",
        "enum": "red",
        "numpy": 3,
        "array": [[1, 0], [0, 1]],
        "set": [[0, 1], [1, 0]],
        "tuple": ["1", None, True],
        "3": "key",
    }
    with pytest.raises(TypeError):
        to_jsonable(object())


def test_to_jsonable_report():
    report = CheckReport(verdict=Verdict.SURJECTIVE, mode="open")
    report.counterexamples.append(mvec(["1/2", 0]))
    data = to_jsonable(report)
    assert data["verdict"] == "surjective"
    assert data["counterexamples"] == [["1/2", "0"]]


def test_render_json(limits):
    text = render(run(AMPLE, limits), "json")
    assert json.loads(text) == {
        "ample": True,
        "convex": True,
        "gg": True,
        "strictly_convex": True,
        "violation": None,
    }
    assert text.index('"ample"') < text.index('"gg"')


def test_render_toml(limits):
    text = render(run(AMPLE, limits), "toml")
    assert sorted(text.splitlines()) == [
        "ample = true",
        "convex = true",
        "gg = true",
        "strictly_convex = true",
    ]
    points = render([mvec([1, 0])], "toml")
    assert points.startswith("results = ")
    assert '"1"' in points and '"0"' in points


def test_render_csv(limits):
    text = render(run({"command": "split", **CENTER}, limits)["witnesses"], "csv")
    lines = text.splitlines()
    assert lines[0] == "algorithm,m,m1,m2,trace"
    assert len(lines) == 4
    assert render({"a": {"x": 1}, "b": {"x": 2}}, "csv") == "name,x\na,1\nb,2\n"


def test_render_unknown_format():
    with pytest.raises(JobError):
        render({}, "yaml")
