"""Counter-based random streams per path and channel

Every path draws from three independent streams, keyed by the master seed,
the path index and the channel. Any path can be redrawn in isolation, and
its values do not depend on which paths were simulated with it.
"""
from dataclasses import dataclass

import numpy as np

#: the noise channels and their keys
CHANNELS = {"brownian": 0, "poisson": 1, "chain": 2}


@dataclass(frozen=True)
class PathStream:
    """the random streams of a single path

    args
    ----
    seed: int
        the master seed, an unsigned 64 bit integer
    path_index: int
        the index of the path within the experiment
    """

    seed: int = 0
    path_index: int = 0

    def channel(self, name: str) -> np.random.Generator:
        """a fresh generator for one channel

        Calling this twice with the same name returns generators producing
        the same numbers.
        """
        try:
            key = CHANNELS[name]
        except KeyError:
            raise ValueError(f"{name} is not a channel, choose from {', '.join(CHANNELS)}") from None
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.path_index, key))
        return np.random.Generator(np.random.Philox(sequence))
