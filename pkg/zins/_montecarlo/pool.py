"""Fanning out batches of paths over a thread pool

numpy releases the GIL in its array loops, so batches simulated in threads
run in parallel. Results are returned in batch order, whatever order the
batches finish in, and reduced in that order.
"""
from concurrent.futures import ThreadPoolExecutor
from logging import getLogger
from os import cpu_count
from typing import Callable, List, TypeVar

from zins.time import Clock

log = getLogger(__name__)

T = TypeVar("T")


def batches(num_paths: int, batch_size: int) -> List[range]:
    """split the path indices 0..num_paths-1 into consecutive ranges"""
    if num_paths < 1:
        raise ValueError(f"num_paths must be positive, got {num_paths}")
    if batch_size < 1:
        raise ValueError(f"batch_size must be positive, got {batch_size}")
    return [
        range(start, min(start + batch_size, num_paths))
        for start in range(0, num_paths, batch_size)
    ]


def run_batches(
    func: Callable[[range], T],
    num_paths: int,
    batch_size: int = 256,
    threads: int = None,
) -> List[T]:
    """evaluate func for every batch of path indices

    args
    ----
    func: callable
        called with a range of path indices, must not share mutable state
        with other calls
    num_paths: int
        total number of paths
    batch_size: int
        paths per batch
    threads: int
        size of the pool, defaults to the machine parallelism. With one
        thread the batches run in the calling thread.

    returns
    -------
    results: list
        one result per batch, in batch order
    """
    ranges = batches(num_paths, batch_size)
    threads = threads or cpu_count() or 1
    clock = Clock()

    def timed(paths: range):
        with clock.timed("batch"):
            return func(paths)

    if threads == 1 or len(ranges) == 1:
        results = [timed(r) for r in ranges]
    else:
        with ThreadPoolExecutor(max_workers=min(threads, len(ranges))) as pool:
            results = list(pool.map(timed, ranges))
    log.info(
        f"Simulated {num_paths} paths in {len(ranges)} batches in {clock.now():.2f}s, "
        f"{clock.total('batch'):.2f}s of batch time"
    )
    return results
