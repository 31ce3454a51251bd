"""Contains worker-pool helpers and reductions shared by the experiments."""

import collections.abc
import logging
import typing
from multiprocessing import Pool

import numpy as np

log = logging.getLogger(__name__)

T = typing.TypeVar("T")
R = typing.TypeVar("R")


def check_processes(num_process: int) -> int:
    if num_process < 1:
        raise ValueError("Must have number of processes greater than 0.")
    return num_process


def pool_map(
    function: collections.abc.Callable[..., R],
    work: collections.abc.Sequence[tuple],
    num_process: int = 1,
) -> list[R]:
    """
    Apply a function to every argument tuple of ``work``.

    Results come back in input order whatever the number of processes, so a
    computation gives the same answer serially and in parallel.  The function
    and its arguments must be picklable when ``num_process > 1``.
    """
    check_processes(num_process)
    if num_process == 1 or len(work) <= 1:
        return [function(*args) for args in work]
    log.debug("Dispatching %s tasks to %s processes", len(work), num_process)
    with Pool(processes=num_process) as pool:
        results = [pool.apply_async(function, args=args) for args in work]
        return [r.get() for r in results]


def chunked(
    items: collections.abc.Sequence[T], size: int
) -> list[collections.abc.Sequence[T]]:
    if size < 1:
        raise ValueError("Chunk size must be positive.")
    return [items[i : i + size] for i in range(0, len(items), size)]


def pool_max(
    function: collections.abc.Callable[..., np.ndarray],
    work: collections.abc.Sequence[tuple],
    num_process: int = 1,
) -> np.ndarray:
    """Elementwise maximum of the arrays returned for every work item."""
    arrays = pool_map(function, work, num_process)
    if not arrays:
        raise ValueError("No work items to reduce.")
    return logreduce(np.maximum, arrays)


# Balanced reducer carried over from the doranet utils.
def logreduce(
    function: collections.abc.Callable[[T, T], T],
    iterable: collections.abc.Iterable[T],
) -> T:
    """
    logreduce(function, iterable) -> value.

    Reduce with an associative function in a balanced tree, e.g.
    logreduce(np.maximum, [a, b, c, d, e]) computes
    max(max(max(a, b), max(c, d)), e).

    Memory: maximum of log2(n) objects of iterable stored vs 2 for reduce()
    """
    i = iter(iterable)
    try:
        r_val, stop = _logreduce(function, i, 0)
    except StopIteration:
        raise TypeError(
            "logreduce() of empty iterable with no initial value"
        ) from None
    n = 0
    try:
        while not stop:
            n += 1
            new_val, stop = _logreduce(function, i, n - 1)
            r_val = function(r_val, new_val)
    except StopIteration:
        ...
    return r_val


def _logreduce(
    f: collections.abc.Callable[[T, T], T],
    i: collections.abc.Iterator[T],
    n: int,
) -> tuple[T, bool]:
    if n == 0:
        x = next(i)
        try:
            y = next(i)
        except StopIteration:
            return x, True
        return f(x, y), False
    x, stop = _logreduce(f, i, n - 1)
    if stop:
        return x, True
    try:
        y, stop = _logreduce(f, i, n - 1)
    except StopIteration:
        return x, True
    return f(x, y), False
