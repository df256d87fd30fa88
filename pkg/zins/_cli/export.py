"""CSV outputs of the commands

Every file starts with comment lines prefixed by '#', which echo the fully
resolved configuration, so any output can be reproduced from its own header.
Floats are written with :func:`repr`, i.e. as the shortest string that reads
back to the same value.
"""
import csv
import sys
from contextlib import contextmanager
from logging import getLogger
from pathlib import Path
from typing import Iterable, List, Sequence, Union

import numpy as np

log = getLogger(__name__)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


@contextmanager
def _open(fname: Union[str, Path, None]):
    if fname is None:
        yield sys.stdout
    else:
        with Path(fname).open("w", newline="", encoding="utf-8") as f:
            yield f
        log.info(f"Wrote {fname}")


def write_table(
    fname: Union[str, Path, None],
    columns: Sequence[str],
    rows: Iterable[Sequence],
    header: Sequence[str] = (),
    footer: Sequence[str] = (),
):
    """write a table with comment lines before and after

    args
    ----
    fname: str or Path
        where to write, stdout if None
    columns: list of str
        the column names
    rows: iterable
        the rows, floats are written with repr
    header: list of str
        comment lines written before the table, without the '#'
    footer: list of str
        comment lines written after the table, without the '#'
    """
    with _open(fname) as f:
        for line in header:
            f.write(f"# {line}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
        for line in footer:
            f.write(f"# {line}\n")


def config_header(command: str, config_json: str, extra: Sequence[str] = ()) -> List[str]:
    "the comment lines echoing the command and the resolved configuration"
    lines = [f"zins {command}"]
    lines.extend(extra)
    lines.append("config:")
    lines.extend(config_json.splitlines())
    return lines


def path_rows(state, row: int = 0):
    """rows (k, t, X, regime, dB, dN) of one path, for k = -M..K

    regime and increments are empty on the initial segment, increments are
    empty at the last grid point
    """
    grid, noise = state.grid, state.noise
    times = grid.times
    for column in range(grid.size):
        k = column - grid.M
        regime = dB = dN = None
        if k >= 0:
            regime = int(state.regimes[row, k])
            if k < grid.K:
                dB = float(noise.brownian[row, k])
                dN = int(noise.poisson[row, k])
        yield k, float(times[column]), float(state.values[row, column]), regime, dB, dN


def stair_rows(state, row: int = 0):
    "the corners (t, x) of the step process on [0, T], ready for plotting"
    grid = state.grid
    path = state.path[row]
    times = grid.times[grid.M :]
    for k in range(grid.K):
        yield float(times[k]), float(path[k])
        yield float(times[k + 1]), float(path[k])
    yield float(times[-1]), float(path[-1])
