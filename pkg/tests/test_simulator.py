import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cargobook.instance import ArrivalTable, arrival_table, build_family
from cargobook.policies import ConstantPolicy, RandPolicy
from cargobook.simulator import (
    NO_REQUEST, BookingState, Trajectory, generate_realizations, load_realizations, replay,
    run_episode, sample_event, sample_events, save_realizations, step, total_profit,
)


def test_sample_event_family_10_frequencies():
    tab = arrival_table(build_family(10, 0))
    rng = np.random.default_rng(0)
    draws = np.array([sample_event(tab, 1, rng) for _ in range(40_000)])
    assert abs((draws == 0).mean() - 0.10) < 0.006
    assert abs((draws == 1).mean() - 0.125) < 0.007


def test_sample_event_period_two_drift():
    tab = arrival_table(build_family(10, 0))
    assert tab.row(2)[9] == pytest.approx(0.052, abs=1e-12)


def test_point_mass_table_always_none():
    probs = np.array([[1.0, 0.0, 0.0]])
    tab = ArrivalTable(probs, np.cumsum(probs, axis=1))
    rng = np.random.default_rng(1)
    assert all(sample_event(tab, 1, rng) == NO_REQUEST for _ in range(500))


def test_sample_event_out_of_range(f4):
    with pytest.raises(IndexError):
        sample_event(arrival_table(f4), 21, np.random.default_rng(0))


def test_step_accept_family_4(f4):
    nxt, r = step(BookingState.initial(4), 3, True, f4.revenues)
    assert nxt == BookingState(2, (0, 0, 1, 0)) and r == 12


def test_step_none_and_reject(f4):
    s = BookingState(5, (1, 0, 2, 0))
    assert step(s, NO_REQUEST, True, f4.revenues) == (BookingState(6, s.w), 0.0)
    assert step(s, 2, False, f4.revenues) == (BookingState(6, s.w), 0.0)


def test_all_reject_episode(f4):
    traj = run_episode(f4, ConstantPolicy(False), rng=np.random.default_rng(0))
    assert traj.final_state.w == (0, 0, 0, 0) and traj.revenue == 0


def test_all_accept_bookkeeping(f4):
    events = sample_events(arrival_table(f4), np.random.default_rng(3))
    traj = run_episode(f4, ConstantPolicy(True), events=events)
    reqs = [e for e in events if e]
    assert sum(traj.final_state.w) == len(reqs)
    assert traj.revenue == pytest.approx(sum(f4.revenues[e - 1] for e in reqs))


def test_rand_one_equals_all_accept(f4):
    events = sample_events(arrival_table(f4), np.random.default_rng(4))
    a = run_episode(f4, RandPolicy(1.0, seed=9), events=events)
    b = run_episode(f4, ConstantPolicy(True), events=events)
    assert a.final_state == b.final_state and a.revenue == b.revenue


def test_total_profit():
    traj = Trajectory([], [], 50.0, BookingState(1, ()))
    assert total_profit(traj, -20.0) == 30.0
    assert total_profit(Trajectory([], [], 0.0, BookingState(1, ())), 0.0) == 0.0


def test_event_list_length_checked(f4):
    with pytest.raises(ValueError):
        run_episode(f4, ConstantPolicy(True), events=[0] * 3)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000), p=st.floats(0, 1))
def test_replay_round_trip_and_state_bound(seed, p):
    spec = build_family(4, 0)
    policy = RandPolicy(p, seed)
    traj = run_episode(spec, policy, rng=np.random.default_rng(seed))
    state, revenue = replay(spec, traj.events, [a or 0 for a in traj.actions])
    assert state == traj.final_state
    assert revenue == pytest.approx(traj.revenue)
    assert sum(traj.final_state.w) <= traj.final_state.t - 1
    assert traj.final_state.t == spec.T + 1


def test_run_episode_reproducible(f4):
    a = run_episode(f4, RandPolicy(0.5, 1), rng=np.random.default_rng(2))
    b = run_episode(f4, RandPolicy(0.5, 1), rng=np.random.default_rng(2))
    assert a.events == b.events and a.actions == b.actions


def test_realization_file_round_trip(tmp_path, f4):
    real = generate_realizations(f4, 5, 7)
    path = tmp_path / "r.json"
    save_realizations(path, f4, real, 7)
    assert load_realizations(path, f4) == real
    other = build_family(4, 1)
    with pytest.raises(ValueError):
        load_realizations(path, other)
    with pytest.raises(FileNotFoundError, match="missing.json"):
        load_realizations(tmp_path / "missing.json")
