from dataclasses import dataclass

import numpy as np

from spin_core import ProbDist
from utils.errors import InvalidInputError

MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class SampleSet:
    """Outcome counts of one simulated measurement record.

    Counts are indexed like the distribution they were drawn from
    (m = +J ... -J) and are a sufficient statistic for every estimator here.
    """

    outcomes: np.ndarray
    counts: np.ndarray
    master_seed: int
    trial_index: int

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64, copy=True)
        if counts.shape != np.shape(self.outcomes) or (counts < 0).any():
            raise InvalidInputError("counts must be nonnegative and match the outcomes")
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)

    @property
    def m_total(self) -> int:
        return int(self.counts.sum())

    def counts_map(self) -> dict[float, int]:
        return {float(m): int(c) for m, c in zip(self.outcomes, self.counts) if c}

    def mean(self) -> float:
        return float(self.outcomes @ self.counts) / self.m_total


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """Counter-based stream owned by one trial; independent of how trials are scheduled."""
    if not 0 <= master_seed <= MAX_SEED:
        raise InvalidInputError(f"master_seed must be a 64-bit unsigned integer, got {master_seed}")
    if trial_index < 0:
        raise InvalidInputError(f"trial_index must be >= 0, got {trial_index}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([master_seed, trial_index])))


def sample_outcomes(dist: ProbDist, shots: int, master_seed: int, trial_index: int) -> SampleSet:
    """Draw ``shots`` outcomes from ``dist`` by inverting its cumulative distribution."""
    if shots < 1:
        raise InvalidInputError(f"shots must be >= 1, got {shots}")
    cdf = np.cumsum(dist.probs)
    cdf[-1] = 1.0
    uniforms = trial_rng(master_seed, trial_index).random(shots)
    idx = np.searchsorted(cdf, uniforms, side="right")
    counts = np.bincount(idx, minlength=len(cdf))
    return SampleSet(
        outcomes=dist.outcomes, counts=counts, master_seed=master_seed, trial_index=trial_index
    )

