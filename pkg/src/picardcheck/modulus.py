"""Real functions on (0, inf) and finite-sample limit estimators.

Every condition in the contraction taxonomy is phrased through some function
E, F, phi or delta on the positive half-line, plus one-sided limits, limsup
and liminf along sequences that approach a point from the right. Limits are
never computed exactly here: they are estimated on finite trailing windows
and used to *refute* claims, never to prove them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .report import FAIL, INAPPLICABLE, PASS, CheckReport, Condition

MONOTONE_KINDS = ("none", "nondecreasing", "strictly_increasing")
GENERATORS = ("dyadic", "harmonic", "custom")

DEFAULT_DYADIC_DEPTH = 40
DEFAULT_HARMONIC_DEPTH = 1000


@dataclass(frozen=True)
class ModulusFunction:
    name: str
    evaluator: Callable[[float], float] = field(compare=False)
    monotone: str = "none"
    right_continuous: bool = False

    def __post_init__(self):
        if self.monotone not in MONOTONE_KINDS:
            raise ValueError(f"unknown monotonicity {self.monotone!r}")

    def __call__(self, t: float) -> float:
        return eval_modulus(self, t)


def eval_modulus(f: ModulusFunction, t: float) -> float:
    if not t > 0:
        raise ValueError(f"{f.name} is defined on (0, inf) only, got t={t!r}")
    return float(f.evaluator(t))


# -- builtin registry -------------------------------------------------------


def _log(t: float) -> float:
    return math.log(t) if t < math.inf else math.inf


def _app4(t: float) -> float:
    if t < 0.25:
        return 2.5
    return (1.0 + t) / math.sqrt(t)


def _sine_gap(t: float) -> float:
    # sup of |cos x - cos y| over |x - y| = t
    return 2.0 * math.sin(min(t, math.pi) / 2.0)


def _kink_at_one(t: float) -> float:
    return t - 1.0 if t > 1.0 else t


def _step(t: float) -> float:
    return 1.0 if t <= 1.0 else 2.0


def _positive_part(t: float) -> float:
    return t / (1.0 + t)


def identity() -> ModulusFunction:
    return ModulusFunction("identity", lambda t: t, "strictly_increasing", True)


def affine(a: float, b: float) -> ModulusFunction:
    mono = "strictly_increasing" if a > 0 else "nondecreasing" if a == 0 else "none"
    return ModulusFunction(f"affine({a!r},{b!r})", lambda t: a * t + b, mono, True)


def power(p: float) -> ModulusFunction:
    mono = "strictly_increasing" if p > 0 else "nondecreasing" if p == 0 else "none"
    return ModulusFunction(f"power({p!r})", lambda t: t**p, mono, True)


def constant(c: float) -> ModulusFunction:
    return ModulusFunction(f"constant({c!r})", lambda t: c, "nondecreasing", True)


def scaled(alpha: float, f: ModulusFunction) -> ModulusFunction:
    mono = f.monotone if alpha > 0 else "nondecreasing" if alpha == 0 else "none"
    ev = f.evaluator
    return ModulusFunction(f"scaled({alpha!r},{f.name})", lambda t: alpha * ev(t), mono, f.right_continuous)


def difference(f: ModulusFunction, g: ModulusFunction) -> ModulusFunction:
    """t -> f(t) - g(t); used to build E = F - phi."""
    fe, ge = f.evaluator, g.evaluator
    return ModulusFunction(f"({f.name}-{g.name})", lambda t: fe(t) - ge(t), "none",
                           f.right_continuous and g.right_continuous)


_SIMPLE = {
    "identity": identity,
    "log": lambda: ModulusFunction("log", _log, "strictly_increasing", True),
    "app4_F": lambda: ModulusFunction("app4_F", _app4, "none", True),
    "sine_gap": lambda: ModulusFunction("sine_gap", _sine_gap, "nondecreasing", True),
    "kink_at_one": lambda: ModulusFunction("kink_at_one", _kink_at_one, "none", False),
    "step": lambda: ModulusFunction("step", _step, "nondecreasing", False),
    "saturating": lambda: ModulusFunction("saturating", _positive_part, "strictly_increasing", True),
}

_PARAMETRIC = {"affine": affine, "power": power, "constant": constant, "scaled": scaled}

BUILTIN_NAMES = tuple(_SIMPLE) + tuple(_PARAMETRIC)


def builtin(name: str, *params) -> ModulusFunction:
    """Look up a registry function; parametric ones take their parameters positionally.

    >>> builtin("scaled", 0.4, builtin("app4_F"))(1.0)
    0.8
    """
    if name in _SIMPLE:
        if params:
            raise ValueError(f"{name} takes no parameters")
        return _SIMPLE[name]()
    if name in _PARAMETRIC:
        return _PARAMETRIC[name](*params)
    raise ValueError(f"unknown modulus function {name!r}; known: {', '.join(BUILTIN_NAMES)}")


# -- right-approach sequences -----------------------------------------------


@dataclass(frozen=True)
class RightApproachSequence:
    anchor: float
    generator: str = "dyadic"
    depth: int = DEFAULT_DYADIC_DEPTH
    custom: tuple[float, ...] = ()

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise ValueError(f"unknown generator {self.generator!r}")
        if not (self.anchor >= 0 and math.isfinite(self.anchor)):
            raise ValueError("anchor must be a finite nonnegative number")
        if self.depth < 1:
            raise ValueError("depth must be positive")

    def terms(self) -> list[float]:
        """Strictly decreasing terms above the anchor; stops once rounding stalls."""
        t = self.anchor
        if self.generator == "custom":
            raw = list(self.custom)
            if any(not s > t for s in raw):
                raise ValueError("custom terms must lie strictly above the anchor")
            return raw
        out = []
        for k in range(1, self.depth + 1):
            s = t + (2.0**-k if self.generator == "dyadic" else 1.0 / k)
            if not s > t or (out and not s < out[-1]):
                break
            out.append(s)
        return out

    def gaps(self) -> list[float]:
        return [s - self.anchor for s in self.terms()]


def dyadic(anchor: float, depth: int = DEFAULT_DYADIC_DEPTH) -> RightApproachSequence:
    return RightApproachSequence(anchor, "dyadic", depth)


def harmonic(anchor: float, depth: int = DEFAULT_HARMONIC_DEPTH) -> RightApproachSequence:
    return RightApproachSequence(anchor, "harmonic", depth)


def sequence_family(anchor: float, family: Sequence[str] = ("dyadic", "harmonic")) -> list[RightApproachSequence]:
    return [dyadic(anchor) if g == "dyadic" else harmonic(anchor) for g in family]


# -- limit estimates --------------------------------------------------------


@dataclass(frozen=True)
class LimitEstimate:
    value: float
    window_tail: int
    refuted: bool = False
    reliable: bool = True
    oscillation: float = 0.0

    def __post_init__(self):
        if self.window_tail < 2:
            raise ValueError("window_tail must be at least 2")


def default_tail(n: int) -> int:
    return min(n, max(16, n // 10))


def estimate_limsup(values: Sequence[float], tail: int | None = None) -> LimitEstimate:
    """Largest value over the last `tail` terms, a finite stand-in for limsup."""
    n = len(values)
    tail = default_tail(n) if tail is None else tail
    if not 2 <= tail <= n:
        raise ValueError(f"need 2 <= tail <= len(values), got tail={tail}, len={n}")
    window = list(values[-tail:])
    return LimitEstimate(max(window), tail, oscillation=_spread(window))


def estimate_liminf(values: Sequence[float], tail: int | None = None) -> LimitEstimate:
    n = len(values)
    tail = default_tail(n) if tail is None else tail
    if not 2 <= tail <= n:
        raise ValueError(f"need 2 <= tail <= len(values), got tail={tail}, len={n}")
    window = list(values[-tail:])
    return LimitEstimate(min(window), tail, oscillation=_spread(window))


def _spread(window: Sequence[float]) -> float:
    finite = [v for v in window if math.isfinite(v)]
    if len(finite) != len(window):
        return math.inf if len(set(window)) > 1 else 0.0
    return max(finite) - min(finite)


def estimate_right_limit(f: ModulusFunction, t: float, seq: RightApproachSequence | None = None,
                         window_tail: int = 4, tol: float = 1e-6) -> LimitEstimate:
    """Estimate f(t+0) from the deepest terms of a right-approach sequence."""
    seq = dyadic(t) if seq is None else seq
    if seq.anchor != t:
        raise ValueError("sequence anchor must equal t")
    terms = seq.terms()
    if len(terms) < max(8, window_tail):
        raise ValueError("right-approach sequence too short (need depth >= 8)")
    window = [f(s) for s in terms[-window_tail:]]
    finite = [v for v in window if math.isfinite(v)]
    if not finite:
        same_sign = len({math.copysign(1.0, v) for v in window if not math.isnan(v)}) == 1
        value = window[-1] if same_sign else math.nan
        return LimitEstimate(value, window_tail, reliable=same_sign, oscillation=0.0 if same_sign else math.inf)
    if len(finite) != len(window):
        return LimitEstimate(window[-1], window_tail, reliable=False, oscillation=math.inf)
    osc = max(finite) - min(finite)
    return LimitEstimate(sum(finite) / len(finite), window_tail, reliable=osc <= tol, oscillation=osc)


def extrapolate_limit(values: Sequence[float], gaps: Sequence[float]) -> float:
    """Limit of `values` as the gaps shrink, assuming c + b * gap**a behaviour.

    Three window maxima are taken at gap scales spaced evenly in log(gap) and
    combined with Aitken's delta-squared rule. Falls back to the last window
    when the data does not support the model.
    """
    n = len(values)
    if n < 6:
        return max(values[-2:])
    g_first, g_last = gaps[0], gaps[-1]
    if not (g_first > g_last > 0):
        return max(values[-2:])
    log_span = math.log(g_first / g_last)
    # index whose gap is closest to g_last * exp(k * span / 3)
    anchors = []
    for k in (2, 1, 0):
        target = math.log(g_last) + k * log_span / 3.0
        idx = min(range(n), key=lambda i: abs(math.log(gaps[i]) - target))
        anchors.append(idx)
    i1, i2, i3 = anchors
    w = max(1, (i1 + 1) // 4)

    def wmax(i):
        return max(values[max(0, i - w + 1): i + 1])

    q1, q2, q3 = wmax(i1), wmax(i2), wmax(i3)
    if not all(math.isfinite(q) for q in (q1, q2, q3)):
        return q3
    d1, d2 = q2 - q1, q3 - q2
    denom = d2 - d1
    if d1 == 0.0 or d2 * d1 <= 0 or abs(denom) <= 1e-300:
        return q3
    return q3 - d2 * d2 / denom


def limsup_positive(values: Sequence[float], gaps: Sequence[float], tail: int | None = None) -> tuple[bool, LimitEstimate, float]:
    """Decide `limsup values > 0` along a right-approach sequence.

    Positive means the tail limsup is positive and the extrapolated limit keeps
    at least half of it, so a quantity still visibly shrinking toward 0 at the
    finest resolution is not accepted.
    """
    est = estimate_limsup(values, tail)
    if not est.value > 0:
        return False, est, est.value
    c = extrapolate_limit(values, gaps)
    if math.isnan(c):
        return False, est, c
    return c > 0.5 * est.value, est, c


def liminf_positive(values: Sequence[float], gaps: Sequence[float], tail: int | None = None) -> tuple[bool, LimitEstimate, float]:
    """Mirror of limsup_positive using the tail minimum and a lower extrapolation."""
    est = estimate_liminf(values, tail)
    if not est.value > 0:
        return False, est, est.value
    c = -extrapolate_limit([-v for v in values], gaps)
    if math.isnan(c):
        return False, est, c
    return c > 0.5 * est.value, est, c


def check_limsup_sum_rule(a: Sequence[float], b: Sequence[float], tail: int, tol: float = 1e-2) -> CheckReport:
    """limsup(a + b) = lim a + limsup b for convergent a and bounded b."""
    if len(a) != len(b) or len(a) < tail:
        raise ValueError("sequences must have equal length >= tail")
    a_tail = list(a[-tail:])
    a_osc = _spread(a_tail)
    b_bounded = all(math.isfinite(v) for v in b)
    if not (a_osc < tol and b_bounded):
        reason = "a does not settle on its tail" if a_osc >= tol else "b is not bounded"
        cond = Condition("limsup_sum_rule", INAPPLICABLE, None, {"reason": reason, "a_oscillation": a_osc})
        return CheckReport("lemma_limsup_sum", (cond,), sample_size=len(a))
    lhs = estimate_limsup([x + y for x, y in zip(a, b)], tail).value
    lim_a = sum(a_tail) / tail
    rhs = lim_a + estimate_limsup(b, tail).value
    details = {"lhs": lhs, "rhs": rhs, "lim_a": lim_a, "difference": abs(lhs - rhs)}
    if abs(lhs - rhs) < tol:
        cond = Condition("limsup_sum_rule", PASS, None, details)
    else:
        cond = Condition("limsup_sum_rule", FAIL, {"lhs": lhs, "rhs": rhs}, details)
    return CheckReport("lemma_limsup_sum", (cond,), sample_size=len(a))


def check_declared_monotone(f: ModulusFunction, grid: Sequence[float]) -> Condition:
    """Check f against its declared monotonicity on an ascending grid."""
    if f.monotone == "none":
        return Condition("declared_monotone", INAPPLICABLE, None, {"declared": "none"})
    return check_monotone(f, grid, strict=f.monotone == "strictly_increasing", name="declared_monotone")


def check_monotone(f: ModulusFunction, grid: Sequence[float], strict: bool, name: str = "monotone") -> Condition:
    prev_t = prev_v = None
    min_gap = math.inf
    for t in grid:
        v = f(t)
        if prev_v is not None:
            gap = v - prev_v
            min_gap = min(min_gap, gap)
            if gap < 0 or (strict and gap <= 0):
                return Condition(name, FAIL, {"t": prev_t, "s": t, "f_t": prev_v, "f_s": v},
                                 {"min_gap": gap, "strict": strict})
        prev_t, prev_v = t, v
    return Condition(name, PASS, None, {"min_gap": min_gap, "strict": strict})


def log_grid(lo: float, hi: float, n: int) -> list[float]:
    if not (0 < lo < hi) or n < 2:
        raise ValueError("log grid needs 0 < lo < hi and n >= 2")
    a, b = math.log10(lo), math.log10(hi)
    return [10 ** (a + (b - a) * i / (n - 1)) for i in range(n)]
