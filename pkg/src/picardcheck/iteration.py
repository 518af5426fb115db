"""Picard iteration with convergence, Cauchy and uniqueness diagnostics."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

from .maps import MapUnderTest
from .metric import ZERO_DISTANCE, Point, make_point
from .report import FAIL, INAPPLICABLE, PASS, CheckReport, Condition

TRACE_POINT_CAP = 100_000
CSV_VERSION = "picardcheck-trace/1"

CONVERGED = "converged"
CAUCHY_FAILED = "cauchy_failed"
DIVERGED = "diverged"
BUDGET_EXHAUSTED = "budget_exhausted"
ERROR = "error"


@dataclass(frozen=True)
class IterationConfig:
    max_iter: int = 10_000
    residual_tol: float = 1e-12
    cauchy_window: int = 16
    cauchy_tol: float = 1e-10
    divergence_bound: float = 1e12

    def __post_init__(self):
        for name in ("max_iter", "residual_tol", "cauchy_window", "cauchy_tol", "divergence_bound"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.cauchy_window >= self.max_iter:
            raise ValueError("cauchy_window must be smaller than max_iter")


@dataclass
class IterationTrace:
    points: list[Point]
    step_distances: list[float]
    verdict: str = BUDGET_EXHAUSTED
    limit: Point | None = None
    final_residual: float | None = None
    iterations_used: int = 0
    message: str = ""
    map_name: str = ""
    truncated_points: bool = False

    @property
    def converged(self) -> bool:
        return self.verdict == CONVERGED

    @property
    def last_point(self) -> Point:
        return self.points[-1]


def _out_of_bounds(space, x: Point) -> bool:
    return len(x) != space.dimension or not space.contains(x, tol=1e-9)


def picard_iterate(T: MapUnderTest, x0, config: IterationConfig = IterationConfig()) -> IterationTrace:
    """Iterate x_{n+1} = T x_n until the step and the fixed-point residual are tiny.

    The step a_n = d(x_n, x_{n+1}) triggers a convergence candidate; the
    candidate is accepted only if d(T u, u) < 10 * residual_tol as well.
    """
    space = T.space
    d = space.d
    x = make_point(x0)
    if _out_of_bounds(space, x):
        raise ValueError(f"starting point {x!r} is outside the domain")
    trace = IterationTrace([x], [], map_name=T.name)
    tol, bound = config.residual_tol, config.divergence_bound
    window = config.cauchy_window
    for n in range(config.max_iter):
        try:
            y = tuple(T.apply(x))
        except (ArithmeticError, ValueError) as exc:
            trace.verdict, trace.message = ERROR, f"map raised {type(exc).__name__}: {exc} at n={n}"
            break
        if not all(math.isfinite(c) for c in y):
            trace.verdict, trace.message = DIVERGED, f"non-finite iterate at n={n + 1}"
            break
        if _out_of_bounds(space, y):
            trace.verdict, trace.message = ERROR, f"iterate {y!r} left the domain at n={n + 1}"
            break
        a = d(x, y)
        trace.step_distances.append(a)
        if len(trace.points) < TRACE_POINT_CAP:
            trace.points.append(y)
        else:
            trace.points[-1] = y
            trace.truncated_points = True
        trace.iterations_used = n + 1
        if a == 0.0:
            trace.verdict, trace.limit, trace.final_residual = CONVERGED, y, 0.0
            break
        if max(abs(c) for c in y) > bound:
            trace.verdict, trace.message = DIVERGED, f"|x| exceeded {bound:g} at n={n + 1}"
            break
        if a < tol:
            try:
                r = d(tuple(T.apply(y)), y)
            except (ArithmeticError, ValueError):
                r = math.inf
            if r < 10 * tol:
                trace.verdict, trace.limit, trace.final_residual = CONVERGED, y, r
                break
        if (n + 1) % window == 0 and len(trace.points) > 3 * window and _cycling(trace.points, window, config, d):
            trace.verdict, trace.message = CAUCHY_FAILED, f"tail cycles without settling at n={n + 1}"
            break
        x = y
    else:
        trace.verdict = BUDGET_EXHAUSTED
    return trace


def _cycling(points, window, config, d) -> bool:
    tail = points[-window:]
    spread = max(d(p, q) for i, p in enumerate(tail) for q in tail[i + 1:])
    if spread <= config.cauchy_tol:
        return False
    # a genuine cycle repeats to within a tiny fraction of its own extent
    limit = min(config.cauchy_tol, 1e-3 * spread)
    for period in (2, 3):
        if all(d(points[-1 - i], points[-1 - i - period]) < limit for i in range(window)):
            return True
    return False


@dataclass(frozen=True)
class CauchyDiagnostics:
    is_cauchy: bool
    tail_spread: float
    tail_step_sum: float
    window: int


def detect_cauchy(trace: IterationTrace, window: int = 16, tol: float = 1e-10, space=None) -> CauchyDiagnostics:
    """Max pairwise distance among the last `window` points against `tol`."""
    pts = trace.points
    if window < 2 or len(pts) <= window:
        raise ValueError(f"trace of {len(pts)} points is too short for window {window}")
    if space is None:
        raise ValueError("detect_cauchy needs the space the trace lives in")
    tail = pts[-window:]
    spread = max(space.d(p, q) for i, p in enumerate(tail) for q in tail[i + 1:])
    step_sum = math.fsum(trace.step_distances[-(window - 1):])
    return CauchyDiagnostics(spread < tol, spread, step_sum, window)


def check_step_monotonicity(trace: IterationTrace) -> CheckReport:
    """Positive consecutive steps must strictly decrease."""
    steps = [(n, a) for n, a in enumerate(trace.step_distances) if a > ZERO_DISTANCE]
    witness, min_ratio_gap = None, math.inf
    for (m, prev), (n, cur) in zip(steps, steps[1:]):
        min_ratio_gap = min(min_ratio_gap, 1.0 - cur / prev)
        if not cur < prev:
            witness = {"n": n, "a_prev": prev, "a_n": cur}
            break
    if len(steps) < 2:
        cond = Condition("step_monotonicity", PASS, None, {"vacuous": True, "positive_steps": len(steps)})
    elif witness is not None:
        cond = Condition("step_monotonicity", FAIL, witness, {"positive_steps": len(steps)})
    else:
        cond = Condition("step_monotonicity", PASS, None,
                         {"positive_steps": len(steps), "min_relative_decrease": min_ratio_gap})
    return CheckReport("contractive", (cond,), sample_size=len(trace.step_distances))


def check_step_limit_zero(trace: IterationTrace, tail: int, tol: float = 1e-10) -> CheckReport:
    """Steps tend to zero: tail maximum below `tol`, or a steady decline.

    Sub-geometric decay such as a_n ~ n^(-1/2) never gets below `tol` within a
    desk-scale budget, so a tail that is non-increasing over the last two
    windows and at most half the early step size also counts as vanishing.
    """
    steps = trace.step_distances
    if len(steps) < 2 * tail:
        raise ValueError(f"trace has {len(steps)} steps, need at least {2 * tail}")
    tail_max = max(steps[-tail:])
    head_max = max(steps[-2 * tail:-tail])
    details = {"tail_max": tail_max, "previous_window_max": head_max, "first_step": steps[0]}
    if tail_max < tol:
        return CheckReport("cjmp", (Condition("step_limit_zero", PASS, None, details),), len(steps))
    decaying = tail_max < head_max and tail_max <= 0.5 * max(steps[:tail]) and \
        all(b <= a for a, b in zip(steps[-2 * tail:], steps[-2 * tail + 1:]))
    if decaying:
        return CheckReport("cjmp", (Condition("step_limit_zero", PASS, None, {**details, "decaying": True}),),
                           len(steps))
    return CheckReport("cjmp", (Condition("step_limit_zero", FAIL, {"tail_max": tail_max, "tol": tol}, details),),
                       len(steps))


def estimate_rate(trace: IterationTrace, tail: int = 8) -> float:
    """Geometric mean of a_{n+1}/a_n over the last `tail` ratios of positive steps."""
    steps = [a for a in trace.step_distances if a > ZERO_DISTANCE]
    if len(steps) < 2:
        raise ValueError("need at least two positive steps to estimate a rate")
    ratios = [b / a for a, b in zip(steps, steps[1:])][-tail:]
    return math.exp(math.fsum(math.log(r) for r in ratios) / len(ratios))


def fixed_point_residual(T: MapUnderTest, u) -> float:
    u = make_point(u)
    return T.space.d(tuple(T.apply(u)), u)


@dataclass
class UniquenessProbe:
    report: CheckReport
    traces: list[IterationTrace] = field(default_factory=list)
    starts: list[Point] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.report.verdict() == PASS


def _limit_tolerance(traces: Sequence[IterationTrace], config: IterationConfig) -> float:
    """10 * residual_tol, widened by 1 / (1 - q) for the slowest observed rate q.

    A run stopped at step a with rate q sits about a * q / (1 - q) from its
    limit, so slow linear convergence leaves limits further apart.
    """
    worst = 0.0
    for tr in traces:
        try:
            worst = max(worst, estimate_rate(tr))
        except ValueError:
            continue
    worst = min(worst, 0.999)
    return 10 * config.residual_tol / (1.0 - worst)


def uniqueness_probe(T: MapUnderTest, starts: Sequence, config: IterationConfig = IterationConfig()) -> UniquenessProbe:
    """Iterate from every start; pass iff all converge to one common limit."""
    starts = [make_point(s) for s in starts]
    if len(starts) < 2:
        raise ValueError("uniqueness probe needs at least two starts")
    traces = [picard_iterate(T, s, config) for s in starts]
    limits = [tr.limit for tr in traces if tr.converged]
    bad = [(s, tr.verdict) for s, tr in zip(starts, traces) if not tr.converged]
    spread = 0.0
    pair = None
    for i in range(len(limits)):
        for j in range(i + 1, len(limits)):
            dij = T.space.d(limits[i], limits[j])
            if dij > spread:
                spread, pair = dij, (limits[i], limits[j])
    details = {"starts": tuple(starts), "limit_spread": spread, "converged": len(limits),
               "spread_tol": _limit_tolerance(traces, config)}
    if bad:
        cond = Condition("unique_limit", FAIL, {"non_converged": tuple(bad)}, details)
    elif spread >= _limit_tolerance(traces, config):
        cond = Condition("unique_limit", FAIL, {"limits": pair, "spread": spread}, details)
    else:
        details["common_limit"] = limits[0]
        cond = Condition("unique_limit", PASS, None, details)
    return UniquenessProbe(CheckReport("picard", (cond,), sample_size=len(starts)), traces, starts)


def trace_to_csv(trace: IterationTrace, T: MapUnderTest | None = None) -> str:
    """CSV with one row per stored iterate: n, coordinates, step distance, fixed-point residual.

    The residual of x_n is d(T x_n, x_n), which equals the step for every row
    but the last; the last row's residual is the confirmation residual.
    """
    buf = io.StringIO()
    buf.write(f"# {CSV_VERSION} map={trace.map_name} verdict={trace.verdict} iterations={trace.iterations_used}\n")
    w = csv.writer(buf, lineterminator="\n")
    dim = len(trace.points[0])
    w.writerow(["n", *(f"x{i + 1}" for i in range(dim)), "step_distance", "residual"])
    offset = trace.iterations_used + 1 - len(trace.points)
    for k, p in enumerate(trace.points):
        n = k + offset if k == len(trace.points) - 1 else k
        step = trace.step_distances[n] if n < len(trace.step_distances) else None
        if step is not None:
            residual = step
        elif trace.final_residual is not None:
            residual = trace.final_residual
        elif T is not None:
            try:
                residual = fixed_point_residual(T, p)
            except (ArithmeticError, ValueError):
                residual = math.nan
        else:
            residual = math.nan
        w.writerow([n, *(repr(c) for c in p), "" if step is None else repr(step), repr(residual)])
    return buf.getvalue()
