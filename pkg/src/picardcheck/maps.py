from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .metric import MetricSpaceHandle, Point


@dataclass(frozen=True)
class MapUnderTest:
    """A self-map T: X -> X on a metric space.

    `apply` takes and returns coordinate tuples. `expression` records the
    config-syntax form when the map has one.
    """

    space: MetricSpaceHandle
    apply: Callable[[Point], Point] = field(compare=False)
    name: str = "T"
    expression: str | None = None

    def __call__(self, x: Point) -> Point:
        return self.apply(x)
