import numpy as np
import pytest

from estimation import SampleSet, run_trials, sample_outcomes, trial_rng
from spin_core import ProbDist
from utils.errors import InvalidInputError


def _dist(probs) -> ProbDist:
    probs = np.asarray(probs, dtype=float)
    n = len(probs) - 1
    return ProbDist(outcomes=n / 2 - np.arange(n + 1), probs=probs)


def test_delta_distribution():
    samples = sample_outcomes(_dist([0.0, 0.0, 1.0, 0.0]), 1000, 7, 0)
    assert samples.counts.tolist() == [0, 0, 1000, 0]
    assert samples.m_total == 1000
    assert samples.counts_map() == {-0.5: 1000}


def test_fair_coin_statistics():
    m = 10**6
    samples = sample_outcomes(_dist([0.5, 0.5]), m, 12345, 3)
    sigma = np.sqrt(m / 4)
    assert abs(samples.counts[0] - m / 2) < 4 * sigma
    assert samples.counts.sum() == m


def test_zero_probability_outcomes_never_drawn():
    samples = sample_outcomes(_dist([0.25, 0.0, 0.5, 0.0, 0.25]), 10**5, 1, 0)
    assert samples.counts[1] == 0
    assert samples.counts[3] == 0


def test_reproducible_per_trial():
    dist = _dist([0.1, 0.2, 0.3, 0.4])
    first = sample_outcomes(dist, 500, 2024, 5)
    again = sample_outcomes(dist, 500, 2024, 5)
    other = sample_outcomes(dist, 500, 2024, 6)
    np.testing.assert_array_equal(first.counts, again.counts)
    assert not np.array_equal(first.counts, other.counts)


def test_trial_streams_are_independent_of_order():
    a = trial_rng(99, 3).random(4)
    trial_rng(99, 0).random(100)
    b = trial_rng(99, 3).random(4)
    np.testing.assert_array_equal(a, b)


def test_invalid_requests():
    dist = _dist([0.5, 0.5])
    with pytest.raises(InvalidInputError):
        sample_outcomes(dist, 0, 1, 0)
    with pytest.raises(InvalidInputError):
        sample_outcomes(dist, 10, -1, 0)
    with pytest.raises(InvalidInputError):
        SampleSet(outcomes=np.array([0.5, -0.5]), counts=np.array([3, -1]), master_seed=0, trial_index=0)


def test_sample_mean():
    samples = SampleSet(outcomes=np.array([1.0, 0.0, -1.0]), counts=np.array([3, 0, 1]), master_seed=0, trial_index=0)
    assert samples.mean() == pytest.approx(0.5)


def test_run_trials_order_and_workers():
    dist = _dist([0.2, 0.3, 0.5])

    def trial(i: int) -> tuple[int, ...]:
        return tuple(sample_outcomes(dist, 200, 42, i).counts.tolist())

    serial = run_trials(trial, 16, workers=1)
    parallel = run_trials(trial, 16, workers=4)
    assert serial == parallel
    assert len(set(serial)) > 1
    assert run_trials(trial, 0, workers=3) == []
