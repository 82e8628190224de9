"""Cartesian parameter sweeps executed on a process pool."""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from ..errors import ParameterError
from .config import SWEEPABLE, RunConfig

DEFAULT_CAP = 10_000


@dataclass(frozen=True)
class SweepSpec:
    base: RunConfig = field(default_factory=RunConfig)
    axes: tuple = ()  # ((name, (v1, v2, ...)), ...)
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        axes = tuple((name, tuple(values)) for name, values in self.axes)
        object.__setattr__(self, "axes", axes)
        names = [name for name, _ in axes]
        bad = [n for n in names if n not in SWEEPABLE]
        if bad:
            raise ParameterError(f"cannot sweep {bad}; allowed axes are {SWEEPABLE}")
        if len(set(names)) != len(names):
            raise ParameterError(f"duplicate sweep axes in {names}")
        if any(len(v) == 0 for _, v in axes):
            raise ParameterError("sweep axes need at least one value")
        if self.size > self.cap:
            raise ParameterError(f"sweep has {self.size} points, above the cap of {self.cap}")

    @property
    def names(self):
        return [name for name, _ in self.axes]

    @property
    def size(self):
        n = 1
        for _, values in self.axes:
            n *= len(values)
        return n

    def points(self):
        """Grid points in row-major order (last axis varies fastest)."""
        for combo in itertools.product(*(values for _, values in self.axes)):
            yield dict(zip(self.names, combo))

    def configs(self):
        return [self.base.with_values(**point) for point in self.points()]


def _run(cfg):
    return cfg.run()


def sweep(spec, workers=1):
    """Run every grid point; rows come back in grid order whatever the completion order.

    Each row is ``(point, RunRecord)`` where ``point`` maps axis names to values.
    """
    points = list(spec.points())
    configs = spec.configs()
    if workers <= 1 or len(configs) <= 1:
        records = [_run(c) for c in configs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run, configs))
    return list(zip(points, records))


def sweep_table(rows):
    """Flatten sweep rows to dictionaries: axis values, max_concurrence, t_of_max."""
    table = []
    for point, record in rows:
        row = dict(point)
        row["max_concurrence"] = record.max_concurrence
        row["t_of_max"] = record.t_of_max
        table.append(row)
    return table
