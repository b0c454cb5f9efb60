import numpy as np
import pytest

from cargobook.policies import ConstantPolicy, RandPolicy, rand_p_decide
from cargobook.simulator import BookingState


def test_rand_extremes():
    rng = np.random.default_rng(0)
    assert all(rand_p_decide(1.0, rng) for _ in range(1000))
    assert not any(rand_p_decide(0.0, rng) for _ in range(1000))


def test_rand_rate():
    rng = np.random.default_rng(1)
    rate = np.mean([rand_p_decide(0.7, rng) for _ in range(100_000)])
    assert abs(rate - 0.7) <= 0.01


def test_rand_bounds():
    with pytest.raises(ValueError):
        rand_p_decide(1.5, np.random.default_rng(0))
    with pytest.raises(ValueError):
        RandPolicy(-0.1)


def test_rand_policy_reset():
    pol = RandPolicy(0.5)
    s = BookingState(1, (0,))
    pol.reset(4)
    a = [pol.decide(s, 1) for _ in range(50)]
    pol.reset(4)
    assert a == [pol.decide(s, 1) for _ in range(50)]


def test_constant_policy():
    assert ConstantPolicy(True).decide(BookingState(1, (0,)), 1) is True
