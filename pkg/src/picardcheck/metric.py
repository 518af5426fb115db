"""Points, metric spaces and seeded pair sampling.

Points are plain tuples of floats. A space knows its dimension, a box of
admissible coordinates and which metric to use; samplers draw reproducible
pairs (and triples) from that box so that universally quantified conditions
can be probed on finite data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Sequence

import numpy as np

from .report import FAIL, CheckReport, Condition, PASS

Point = tuple[float, ...]

METRIC_KINDS = ("euclidean", "sup", "p_metric", "discrete", "weighted_sup", "custom")
SAMPLER_STRATEGIES = ("uniform", "grid", "boundary", "orbit")

# Below this two points (or two images) are treated as equal.
ZERO_DISTANCE = 1e-300


def make_point(coords) -> Point:
    if isinstance(coords, (int, float)):
        coords = (coords,)
    pt = tuple(float(c) for c in coords)
    if not pt:
        raise ValueError("a point needs at least one coordinate")
    if not all(math.isfinite(c) for c in pt):
        raise ValueError(f"non-finite coordinate in {pt!r}")
    return pt


@dataclass(frozen=True)
class MetricSpaceHandle:
    """A box (or finite subset of it) in R^dimension together with a metric.

    `support`, when given, turns the space into the finite metric space made
    of exactly those points. `reach` is how far samplers go on an unbounded
    upper side. Completeness is a declared flag only.
    """

    dimension: int
    bounds: tuple[tuple[float, float], ...]
    metric_kind: str = "euclidean"
    p: float = 2.0
    weights: tuple[float, ...] | None = None
    completeness_declared: bool = True
    reach: float = 100.0
    support: tuple[Point, ...] | None = None
    metric_fn: Callable[[Point, Point], float] | None = field(default=None, compare=False)
    name: str = ""

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        if len(self.bounds) != self.dimension:
            raise ValueError(f"expected {self.dimension} bounds, got {len(self.bounds)}")
        for lo, hi in self.bounds:
            if math.isnan(lo) or math.isnan(hi) or lo == -math.inf:
                raise ValueError(f"bad bound ({lo}, {hi}); lower bounds must be finite")
        if self.metric_kind not in METRIC_KINDS:
            raise ValueError(f"unknown metric kind {self.metric_kind!r}")
        if self.metric_kind == "p_metric" and not self.p >= 1:
            raise ValueError("p_metric needs p >= 1")
        if self.metric_kind == "weighted_sup":
            if self.weights is None or len(self.weights) != self.dimension:
                raise ValueError("weighted_sup needs one weight per coordinate")
            if any(not w > 0 for w in self.weights):
                raise ValueError("weights must be positive")
        if self.metric_kind == "custom" and self.metric_fn is None:
            raise ValueError("custom metric needs metric_fn")
        if self.support is not None:
            object.__setattr__(self, "support", tuple(make_point(p) for p in self.support))

    @classmethod
    def interval(cls, lower: float, upper: float, **kw) -> "MetricSpaceHandle":
        return cls(1, ((float(lower), float(upper)),), **kw)

    @classmethod
    def box(cls, lower: float, upper: float, dimension: int, **kw) -> "MetricSpaceHandle":
        return cls(dimension, ((float(lower), float(upper)),) * dimension, **kw)

    @property
    def is_empty(self) -> bool:
        return any(lo > hi for lo, hi in self.bounds)

    def sampling_bounds(self) -> tuple[tuple[float, float], ...]:
        return tuple((lo, lo + self.reach if hi == math.inf else hi) for lo, hi in self.bounds)

    def contains(self, x: Point, tol: float = 0.0) -> bool:
        if len(x) != self.dimension or not all(math.isfinite(c) for c in x):
            return False
        if self.support is not None:
            return any(self.d(x, s) <= tol for s in self.support)
        return all(lo - tol <= c <= hi + tol for c, (lo, hi) in zip(x, self.bounds))

    def scalable(self) -> bool:
        """Whether the metric is induced by a norm (so d(x, x + s v) = s d(0, v))."""
        return self.metric_kind in ("euclidean", "sup", "p_metric", "weighted_sup")

    def d(self, x: Point, y: Point) -> float:
        """Unchecked distance; hot loops call this directly."""
        kind = self.metric_kind
        if kind == "euclidean":
            return math.dist(x, y)
        if kind == "sup":
            return max(abs(a - b) for a, b in zip(x, y))
        if kind == "discrete":
            return 0.0 if x == y else 1.0
        if kind == "weighted_sup":
            return max(w * abs(a - b) for w, a, b in zip(self.weights, x, y))
        if kind == "p_metric":
            diffs = [abs(a - b) for a, b in zip(x, y)]
            m = max(diffs)
            if m == 0.0:
                return 0.0
            return m * sum((t / m) ** self.p for t in diffs) ** (1.0 / self.p)
        return float(self.metric_fn(x, y))


def distance(space: MetricSpaceHandle, x, y) -> float:
    x, y = make_point(x), make_point(y)
    if len(x) != space.dimension or len(y) != space.dimension:
        raise ValueError(f"dimension mismatch: space has {space.dimension}, got {len(x)} and {len(y)}")
    return space.d(x, y)


@dataclass(frozen=True)
class PairSampler:
    strategy: str = "uniform"
    count: int = 1000
    seed: int = 0
    include_diagonal: bool = False
    orbit: tuple[Point, ...] | None = None

    def __post_init__(self):
        if self.strategy not in SAMPLER_STRATEGIES:
            raise ValueError(f"unknown sampling strategy {self.strategy!r}")
        if self.count < 1:
            raise ValueError("count must be positive")
        if self.strategy == "orbit" and not self.orbit:
            raise ValueError("orbit sampling needs a trace")

    def with_seed(self, seed: int) -> "PairSampler":
        return PairSampler(self.strategy, self.count, seed, self.include_diagonal, self.orbit)


def sample_points(space: MetricSpaceHandle, n: int, rng: np.random.Generator, strategy: str = "uniform") -> list[Point]:
    if space.is_empty:
        raise ValueError("empty domain (lower > upper)")
    if space.support is not None:
        idx = rng.integers(0, len(space.support), size=n)
        return [space.support[i] for i in idx]
    bounds = np.array(space.sampling_bounds(), dtype=float)
    lo, hi = bounds[:, 0], bounds[:, 1]
    if strategy == "boundary":
        u = rng.beta(0.3, 0.3, size=(n, space.dimension))
    else:
        u = rng.random(size=(n, space.dimension))
    pts = lo + u * (hi - lo)
    np.clip(pts, lo, hi, out=pts)
    return [tuple(map(float, row)) for row in pts]


def _grid_points(space: MetricSpaceHandle, per_axis: int) -> list[Point]:
    if space.support is not None:
        return list(space.support)
    axes = [np.linspace(lo, hi, per_axis) if hi > lo else np.array([lo]) for lo, hi in space.sampling_bounds()]
    return [tuple(map(float, c)) for c in product(*axes)]


def sample_pairs(space: MetricSpaceHandle, sampler: PairSampler) -> list[tuple[Point, Point]]:
    """Reproducible pairs for `sampler`.

    The grid strategy enumerates the full lattice in X x X, diagonal included;
    the random strategies skip coincident pairs unless `include_diagonal`.
    """
    if space.is_empty:
        raise ValueError("empty domain (lower > upper)")
    if sampler.strategy == "orbit":
        pts = list(sampler.orbit)
        return [(pts[i], pts[i + 1]) for i in range(len(pts) - 1)]
    if sampler.strategy == "grid":
        if space.support is not None:
            pts = list(space.support)
        else:
            per_axis = max(2, int(math.floor(sampler.count ** (1.0 / (2 * space.dimension)) + 1e-9)))
            pts = _grid_points(space, per_axis)
        return [(x, y) for x in pts for y in pts]
    rng = np.random.default_rng(sampler.seed)
    pairs: list[tuple[Point, Point]] = []
    attempts = 0
    while len(pairs) < sampler.count and attempts < 50:
        need = sampler.count - len(pairs)
        xs = sample_points(space, need, rng, sampler.strategy)
        ys = sample_points(space, need, rng, sampler.strategy)
        for x, y in zip(xs, ys):
            if sampler.include_diagonal or x != y:
                pairs.append((x, y))
        attempts += 1
    return pairs


def sample_triples(space: MetricSpaceHandle, sampler: PairSampler) -> list[tuple[Point, Point, Point]]:
    if sampler.strategy == "grid":
        per_axis = max(2, int(math.floor(sampler.count ** (1.0 / (3 * space.dimension)) + 1e-9)))
        pts = _grid_points(space, per_axis)
        return [(x, y, z) for x in pts for y in pts for z in pts]
    if sampler.strategy == "orbit":
        pts = list(sampler.orbit)
        return [(pts[i], pts[i + 1], pts[i + 2]) for i in range(len(pts) - 2)]
    rng = np.random.default_rng(sampler.seed)
    xs, ys, zs = (sample_points(space, sampler.count, rng, sampler.strategy) for _ in range(3))
    return list(zip(xs, ys, zs))


def check_metric_axioms(space: MetricSpaceHandle, sampler: PairSampler) -> CheckReport:
    if sampler.count < 3:
        raise ValueError("need at least 3 samples to probe the triangle inequality")
    triples = sample_triples(space, sampler)
    d = space.d
    found: dict[str, dict] = {}
    for x, y, z in triples:
        dxy, dyz, dxz = d(x, y), d(y, z), d(x, z)
        if "nonnegativity" not in found and min(dxy, dyz, dxz) < 0:
            found["nonnegativity"] = {"x": x, "y": y, "d_xy": dxy}
        if "symmetry" not in found and dxy != d(y, x):
            found["symmetry"] = {"x": x, "y": y, "d_xy": dxy, "d_yx": d(y, x)}
        if "identity" not in found:
            if d(x, x) != 0.0:
                found["identity"] = {"x": x, "d_xx": d(x, x)}
            elif x != y and dxy == 0.0:
                found["identity"] = {"x": x, "y": y, "d_xy": dxy}
        if "triangle" not in found:
            tol = 1e-12 * (1.0 + max(dxy, dyz, dxz))
            if dxz > dxy + dyz + tol:
                found["triangle"] = {"x": x, "y": y, "z": z, "d_xy": dxy, "d_yz": dyz, "d_xz": dxz}
    conds = tuple(
        Condition(name, FAIL, found[name]) if name in found else Condition(name, PASS)
        for name in ("nonnegativity", "symmetry", "identity", "triangle")
    )
    return CheckReport("metric_axioms", conds, sample_size=len(triples), seed=sampler.seed)
