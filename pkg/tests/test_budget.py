import pytest

from liecert.services.budget import Budget, ResourceLimitExceeded, dense_footprint


class FakeClock:
    def __init__(self):
        self.now = 0.0

    def __call__(self):
        return self.now


def test_dense_footprint():
    assert dense_footprint(10, 20) == 800


def test_require_dense_within_limit():
    budget = Budget(mem_bytes=1000, seconds=10)
    assert budget.require_dense(10, 25, "small") == 1000


def test_require_dense_over_limit():
    budget = Budget(mem_bytes=1000, seconds=10)
    with pytest.raises(ResourceLimitExceeded) as info:
        budget.require_dense(10, 26, "big")
    assert info.value.what == "big"
    assert "big" in str(info.value)


def test_time_budget():
    clock = FakeClock()
    budget = Budget(mem_bytes=1000, seconds=5, clock=clock)
    clock.now = 4.0
    budget.check_time("step")
    clock.now = 6.0
    with pytest.raises(ResourceLimitExceeded) as info:
        budget.check_time("step")
    assert info.value.resource == "seconds"
    assert budget.elapsed == 6.0


def test_unlimited_budget_and_settings(settings):
    Budget.unlimited().require_dense(10 ** 6, 10 ** 6, "huge")
    budget = Budget.from_settings(settings)
    assert budget.mem_bytes == settings.budget_mem_bytes
    assert budget.seconds == settings.budget_seconds
