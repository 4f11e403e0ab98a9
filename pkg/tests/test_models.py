import pytest
from pydantic import ValidationError

from symnorm.exceptions import ReportCollectorError
from symnorm.models import (
    BundleSpec,
    CheckReport,
    FanSpec,
    JobSpec,
    Mode,
    ReportCollector,
    RootSpec,
    Verdict,
)


def test_report_collector_only_allows_one_report_per_name():
    rc = ReportCollector()
    rc.add_report("ample", {"status": "ok"})
    assert rc["ample"] == {"status": "ok"}

    with pytest.raises(ReportCollectorError):
        rc.add_report("ample", {"status": "error"})


@pytest.mark.parametrize(
    "verdict,surjective",
    [
        (Verdict.SURJECTIVE, True),
        (Verdict.NOT_SURJECTIVE, False),
        (Verdict.UNSUPPORTED, False),
    ],
)
def test_check_report_surjective(verdict, surjective):
    assert CheckReport(verdict=verdict, mode=Mode.OPEN).surjective is surjective


def test_check_report_defaults_are_not_shared():
    a = CheckReport(verdict=Verdict.SURJECTIVE, mode=Mode.OPEN)
    b = CheckReport(verdict=Verdict.SURJECTIVE, mode=Mode.OPEN)
    a.counterexamples.append((1, 1))
    assert b.counterexamples == []


def test_root_spec():
    assert RootSpec(type="A2").type == "A2"
    assert RootSpec(cartan=[[2, -1], [-1, 2]], rank=2).rank == 2
    with pytest.raises(ValidationError):
        RootSpec()
    with pytest.raises(ValidationError):
        RootSpec(type="A2", cartan=[[2, -1], [-1, 2]])
    with pytest.raises(ValidationError):
        RootSpec(cartan=[[2, -1], [-1, 2]], rank=3)


def test_fan_spec():
    spec = FanSpec(rank=2, rays=[[1, 0], [0, 1], [1, 1]], max_cones=[[0, 2], [1, 2]])
    assert spec.kind == "open"
    with pytest.raises(ValidationError, match="rays.1"):
        FanSpec(rank=2, rays=[[1, 0], [0, 1, 0]], max_cones=[[0, 1]])
    with pytest.raises(ValidationError, match="missing ray 5"):
        FanSpec(rank=2, rays=[[1, 0], [0, 1]], max_cones=[[0, 5]])
    with pytest.raises(ValidationError):
        FanSpec(rank=2, rays=[[1, 0], [0, 1]], max_cones=[[0, 1]], kind="closed")


def test_bundle_spec_values():
    assert BundleSpec(values=[0, "1/2", -1]).values == [0, "1/2", -1]
    assert BundleSpec(values={"2": 1}).values == {"2": 1}
    assert BundleSpec(values=[0], lattice="standard").lattice == "standard"
    with pytest.raises(ValidationError):
        BundleSpec(values=[0], lattice="other")


def test_job_spec():
    job = JobSpec(command="check", root="A1xA1", fan="catalog:blowup2")
    assert job.bundles == []
    assert job.options == {}
    with pytest.raises(ValidationError):
        JobSpec(command="decode")
    with pytest.raises(ValidationError):
        JobSpec(command="check", verbose=True)
