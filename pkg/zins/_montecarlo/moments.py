"""Running sample moments with an associative merge"""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class RunningMoments:
    """count, mean and sum of squared deviations of a sample

    The mean may be an array, e.g. one entry per grid time. Two instances
    are combined with :meth:`merge`, which gives the moments of the pooled
    sample independent of how it was split.

    args
    ----
    count: int
        sample size
    mean: float or ndarray
        sample mean
    m2: float or ndarray
        sum of squared deviations from the mean
    """

    count: int = 0
    mean: np.ndarray = 0.0
    m2: np.ndarray = 0.0

    @classmethod
    def from_samples(cls, samples) -> "RunningMoments":
        "moments of samples along the first axis"
        samples = np.asarray(samples, dtype=float)
        n = samples.shape[0]
        if n == 0:
            return cls()
        mean = samples.mean(axis=0)
        m2 = ((samples - mean) ** 2).sum(axis=0)
        return cls(n, mean, m2)

    def merge(self, other: "RunningMoments") -> "RunningMoments":
        if other.count == 0:
            return self
        if self.count == 0:
            return other
        n = self.count + other.count
        d = other.mean - self.mean
        mean = self.mean + d * (other.count / n)
        m2 = self.m2 + other.m2 + d * d * (self.count * other.count / n)
        return RunningMoments(n, mean, m2)

    @property
    def variance(self):
        "unbiased sample variance"
        if self.count < 2:
            return np.zeros_like(np.asarray(self.mean, dtype=float))
        return self.m2 / (self.count - 1)

    @property
    def std_error(self):
        "standard error of the mean"
        if self.count < 1:
            return np.zeros_like(np.asarray(self.mean, dtype=float))
        return np.sqrt(self.variance / self.count)


def merge_all(parts) -> RunningMoments:
    "merge in the given order"
    total = RunningMoments()
    for part in parts:
        total = total.merge(part)
    return total
