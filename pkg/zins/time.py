# -*- coding: utf-8 -*-
"""Wall clock timing of simulations

A :class:`Clock` measures the time spent since it was created, and records
the duration of labelled blocks, e.g. of every batch of paths, so a command
can report where its time went.
"""
from contextlib import contextmanager
from logging import getLogger
from time import perf_counter
from typing import Dict, List

log = getLogger(__name__)


class Clock:
    """keeps track of elapsed time

    get the time since creation or the last :meth:`~.reset` with :meth:`~.now`,
    and the time since the last call of :meth:`~.tick` with :meth:`~.tick`.
    Blocks run within :meth:`~.timed` are recorded as laps under a label.
    """

    def __init__(self):
        self.reset()

    def time(self) -> float:
        "time in seconds according to the performance counter"
        return perf_counter()

    def tick(self) -> float:
        """time since last call of :meth:`~.tick`

        returns
        -------
        delta_t: float
            time passed in seconds since the last call of :meth:`~.tick` or
            :meth:`~.reset`
        """
        ts = self.time()
        delta_t = ts - self.last_tick
        self.last_tick = ts
        return delta_t

    def reset(self):
        "restart the clock and forget all laps"
        self._t0 = self.last_tick = self.time()
        self.laps: Dict[str, List[float]] = {}

    def now(self) -> float:
        "the time passed since the last call of :meth:`reset`"
        return self.time() - self._t0

    @contextmanager
    def timed(self, label: str):
        """record the duration of a block as a lap

        Laps may be recorded from several threads at once.

        args
        ----
        label: str
            laps with the same label are collected together
        """
        t0 = self.time()
        try:
            yield
        finally:
            lap = self.time() - t0
            self.laps.setdefault(label, []).append(lap)
            log.debug(f"{label} took {lap:.3f}s")

    def total(self, label: str) -> float:
        "the summed duration of all laps with this label"
        return float(sum(self.laps.get(label, ())))

    def summary(self) -> str:
        "one line per label with the number of laps and their total"
        return "\n".join(
            f"{label}: {len(laps)} laps, {sum(laps):.3f}s" for label, laps in self.laps.items()
        )


clock = Clock()  #: a default :class:`.Clock` instance
