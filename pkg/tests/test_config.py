import pytest
from pydantic import ValidationError

from symnorm.config import ENV_VAR, Limits, get_limits
from symnorm.exceptions import JobError


def test_limits_defaults():
    limits = Limits()
    assert limits.weyl_order == 10**6
    assert limits.vertex_rank == 5
    assert limits.box_points == 2_000_000
    assert limits.max_workers == 1


@pytest.mark.parametrize(
    "raw,expected",
    [
        (None, {}),
        ("", {}),
        ("5000", {"weyl_order": 5000, "box_points": 5000}),
        ("box_points=10, max_workers=4", {"box_points": 10, "max_workers": 4}),
        ("vertex_rank=3", {"vertex_rank": 3}),
    ],
)
def test_limits_from_env(monkeypatch, raw, expected):
    if raw is None:
        monkeypatch.delenv(ENV_VAR, raising=False)
    else:
        monkeypatch.setenv(ENV_VAR, raw)
    assert Limits.from_env() == Limits(**expected)


def test_limits_from_value_overrides_environment(monkeypatch):
    monkeypatch.setenv(ENV_VAR, "10")
    assert Limits.from_env("box_points=7").box_points == 7


@pytest.mark.parametrize(
    "raw", ["many", "box_points=ten", "depth=3", "weyl_order=0", "-4"]
)
def test_limits_from_env_rejects_malformed_values(raw):
    with pytest.raises(JobError, match=ENV_VAR):
        Limits.from_env(raw)


def test_limits_are_frozen():
    limits = Limits()
    with pytest.raises(ValidationError):
        limits.box_points = 3
    with pytest.raises(ValidationError):
        Limits(depth=3)


def test_get_limits_is_cached(monkeypatch):
    get_limits.cache_clear()
    monkeypatch.setenv(ENV_VAR, "123")
    try:
        first = get_limits()
        monkeypatch.setenv(ENV_VAR, "456")
        assert get_limits() is first
        assert first.weyl_order == 123
    finally:
        get_limits.cache_clear()
