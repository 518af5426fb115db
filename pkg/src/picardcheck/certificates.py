"""Contraction certificates and their numerical condition checks.

Each certificate class carries the moduli its contraction notion needs. The
check_* functions test the corresponding inequalities on seeded samples and
return a CheckReport; a failed condition always carries a witness that
reproduces the violation. Conditions quantified over all right-approach
sequences can only ever earn ``refutation_only_pass``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar, Sequence

import numpy as np

from .maps import MapUnderTest
from .metric import ZERO_DISTANCE, MetricSpaceHandle, PairSampler, Point, sample_pairs, sample_triples
from .modulus import (
    ModulusFunction,
    RightApproachSequence,
    check_monotone,
    dyadic,
    estimate_liminf,
    estimate_limsup,
    estimate_right_limit,
    extrapolate_limit,
    identity,
    liminf_positive,
    limsup_positive,
    scaled,
    sequence_family,
)
from .report import (
    FAIL,
    FRAGILE_GAP,
    INAPPLICABLE,
    PASS,
    PASSING,
    REFUTATION_ONLY_PASS,
    CheckReport,
    Condition,
    strict_condition,
)

DEFAULT_FAMILY = ("dyadic", "harmonic")
DEFAULT_BAND_COUNT = 64
DEFAULT_DELTA_CANDIDATES = tuple(2.0**-k for k in range(1, 41))
C2_INTERIOR_SAMPLES = 64
C2_EDGE_EXPONENT = 20
UNBOUNDED_BELOW_DEPTH = 996  # 2**-996 is the last power of two above ZERO_DISTANCE
UNBOUNDED_BELOW_LEVEL = -100.0


# -- certificate kinds ------------------------------------------------------


@dataclass(frozen=True)
class Banach:
    lam: float
    kind: ClassVar[str] = "banach"

    def __post_init__(self):
        if not 0 <= self.lam < 1:
            raise ValueError(f"Banach constant must lie in [0, 1), got {self.lam}")


@dataclass(frozen=True)
class Contractive:
    kind: ClassVar[str] = "contractive"


@dataclass(frozen=True)
class MeirKeeler:
    delta: ModulusFunction
    kind: ClassVar[str] = "meir_keeler"


@dataclass(frozen=True)
class CJMP:
    delta: ModulusFunction
    table: tuple[tuple[float, float], ...] = ()
    kind: ClassVar[str] = "cjmp"


@dataclass(frozen=True)
class Wardowski:
    phi: ModulusFunction
    F: ModulusFunction
    condition_set: str = "i_ii_iii"
    kind: ClassVar[str] = "wardowski"

    def __post_init__(self):
        if self.condition_set not in ("i_ii_iii", "iii_prime", "iii_doubleprime"):
            raise ValueError(f"unknown Wardowski condition set {self.condition_set!r}")


@dataclass(frozen=True)
class Ri:
    phi: ModulusFunction
    kind: ClassVar[str] = "ri"


@dataclass(frozen=True)
class CompatiblePairEF:
    E: ModulusFunction
    F: ModulusFunction
    kind: ClassVar[str] = "compatible_pair_ef"


@dataclass(frozen=True)
class AlphaF:
    alpha: float
    F: ModulusFunction
    kind: ClassVar[str] = "alpha_f"

    def __post_init__(self):
        if not 0 <= self.alpha < 1:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")


@dataclass(frozen=True)
class Proinov:
    E: ModulusFunction
    F: ModulusFunction
    kind: ClassVar[str] = "proinov"


Certificate = Banach | Contractive | MeirKeeler | CJMP | Wardowski | Ri | CompatiblePairEF | AlphaF | Proinov
CERTIFICATE_KINDS = tuple(c.kind for c in (Banach, Contractive, MeirKeeler, CJMP, Wardowski, Ri,
                                           CompatiblePairEF, AlphaF, Proinov))


# -- pair bookkeeping -------------------------------------------------------


@dataclass(frozen=True)
class PairData:
    x: Point
    y: Point
    d: float
    dT: float


def pair_data(T: MapUnderTest, pairs: Sequence[tuple[Point, Point]]) -> list[PairData]:
    d = T.space.d
    out = []
    for x, y in pairs:
        tx, ty = T.apply(x), T.apply(y)
        out.append(PairData(x, y, d(x, y), d(tx, ty)))
    return out


def sampled_pair_data(T: MapUnderTest, sampler: PairSampler) -> list[PairData]:
    return pair_data(T, sample_pairs(T.space, sampler))


def band_pairs(space: MetricSpaceHandle, lo: float, width: float, count: int,
               rng: np.random.Generator) -> list[tuple[Point, Point]]:
    """Pairs whose distance is drawn from the open band (lo, lo + width).

    Only norm-induced metrics on boxes support this; other spaces get no
    targeted pairs. The first and last pairs sit at the extreme ends of the
    admissible placement range.
    """
    if count <= 0 or not space.scalable() or space.support is not None:
        return []
    bounds = space.sampling_bounds()
    dim = space.dimension
    pairs = []
    for j in range(count):
        r = lo + width * rng.uniform(1e-3, 1.0 - 1e-3)
        v = rng.normal(size=dim) if dim > 1 else np.array([1.0 if rng.random() < 0.5 else -1.0])
        origin = (0.0,) * dim
        vn = space.d(origin, tuple(map(float, v)))
        if not vn > 0:
            continue
        disp = v * (r / vn)
        pos = 0.0 if j == 0 else 1.0 if j == count - 1 else rng.random()
        x = []
        for i, (blo, bhi) in enumerate(bounds):
            a = blo + max(0.0, -disp[i])
            b = bhi - max(0.0, disp[i])
            if a > b:
                break
            x.append(a + pos * (b - a))
        else:
            xp = tuple(x)
            yp = tuple(float(c + s) for c, s in zip(xp, disp))
            pairs.append((xp, yp))
    return pairs


def _band_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng([seed, *key])


# -- contractive / Banach ---------------------------------------------------


def check_contractive(T: MapUnderTest, sampler: PairSampler, data: list[PairData] | None = None) -> CheckReport:
    """d(Tx, Ty) < d(x, y) on every sampled pair with x != y."""
    data = sampled_pair_data(T, sampler) if data is None else data
    min_gap, witness, checked = math.inf, None, 0
    for p in data:
        if p.d <= ZERO_DISTANCE:
            continue
        checked += 1
        gap = p.d - p.dT
        if gap < min_gap:
            min_gap = gap
        if not gap > 0 and witness is None:
            witness = {"x": p.x, "y": p.y, "d_xy": p.d, "d_TxTy": p.dT}
    if checked == 0:
        cond = Condition("contractive", INAPPLICABLE, None, {"reason": "no pair with x != y"})
    else:
        cond = strict_condition("contractive", min_gap, witness, pairs_checked=checked)
    return CheckReport("contractive", (cond,), sample_size=len(data), seed=sampler.seed)


def estimate_banach_lambda(T: MapUnderTest, sampler: PairSampler, data: list[PairData] | None = None) -> float:
    """Largest observed ratio d(Tx, Ty) / d(x, y)."""
    data = sampled_pair_data(T, sampler) if data is None else data
    ratios = [p.dT / p.d for p in data if p.d > ZERO_DISTANCE]
    if not ratios:
        raise ValueError("no pair with x != y to estimate a ratio from")
    return max(ratios)


def check_banach(T: MapUnderTest, lam: float, sampler: PairSampler, data: list[PairData] | None = None) -> CheckReport:
    Banach(lam)
    data = sampled_pair_data(T, sampler) if data is None else data
    worst, witness, checked = -math.inf, None, 0
    min_gap = math.inf
    for p in data:
        if p.d <= ZERO_DISTANCE:
            continue
        checked += 1
        ratio = p.dT / p.d
        min_gap = min(min_gap, lam * p.d - p.dT)
        if ratio > worst:
            worst = ratio
            if p.dT > lam * p.d:
                witness = {"x": p.x, "y": p.y, "d_xy": p.d, "d_TxTy": p.dT, "ratio": ratio}
    details = {"lambda_claimed": lam, "lambda_hat": worst, "min_gap": min_gap, "pairs_checked": checked}
    if checked == 0:
        cond = Condition("lipschitz_bound", INAPPLICABLE, None, details)
    elif witness is not None:
        cond = Condition("lipschitz_bound", FAIL, witness, details)
    else:
        cond = Condition("lipschitz_bound", PASS, None, details)
    return CheckReport("banach", (cond,), sample_size=len(data), seed=sampler.seed)


# -- Meir-Keeler and Matkowski-Wegrzyk bands --------------------------------


def _band_data(T, sampler, base, eps, width, index, band_count, key=()):
    extra = band_pairs(T.space, eps, width, band_count, _band_rng(sampler.seed, index, *key))
    return base + pair_data(T, extra)


def _band_check(T, delta, eps_grid, sampler, band_count, meir_keeler: bool) -> CheckReport:
    name = "meir_keeler_band" if meir_keeler else "mw_band"
    base = sampled_pair_data(T, sampler)
    witness, empty, in_band, total = None, [], 0, len(base)
    min_gap = math.inf
    for i, eps in enumerate(eps_grid):
        dl = delta(eps)
        if not dl > 0:
            raise ValueError(f"delta({eps}) = {dl} is not positive")
        data = _band_data(T, sampler, base, eps, dl, i, band_count)
        total += len(data) - len(base)
        hits = 0
        for p in data:
            inside = (eps <= p.d < eps + dl) if meir_keeler else (eps < p.d < eps + dl)
            if not inside:
                continue
            hits += 1
            gap = eps - p.dT
            min_gap = min(min_gap, gap)
            bad = p.dT >= eps if meir_keeler else p.dT > eps
            if bad and witness is None:
                witness = {"eps": eps, "delta": dl, "x": p.x, "y": p.y, "d_xy": p.d, "d_TxTy": p.dT}
        in_band += hits
        if hits == 0:
            empty.append(eps)
    details = {"pairs_in_band": in_band, "empty_bands": tuple(empty), "vacuous": in_band == 0}
    if min_gap < math.inf:
        details["min_gap"] = min_gap
    if witness is not None:
        cond = Condition(name, FAIL, witness, details)
    else:
        cond = Condition(name, PASS, None, details)
    notes = ()
    if empty:
        notes = (f"no sampled pair fell in the band for eps in {tuple(empty)}; those bands pass vacuously",)
    return CheckReport("meir_keeler" if meir_keeler else "cjmp", (cond,), sample_size=total, seed=sampler.seed,
                       notes=notes)


def check_meir_keeler(T: MapUnderTest, delta: ModulusFunction, eps_grid: Sequence[float], sampler: PairSampler,
                      band_count: int = DEFAULT_BAND_COUNT) -> CheckReport:
    """eps <= d(x,y) < eps + delta(eps)  implies  d(Tx,Ty) < eps."""
    return _band_check(T, delta, eps_grid, sampler, band_count, meir_keeler=True)


def check_mw_condition(T: MapUnderTest, delta: ModulusFunction, eps_grid: Sequence[float], sampler: PairSampler,
                       band_count: int = DEFAULT_BAND_COUNT) -> CheckReport:
    """eps < d(x,y) < eps + delta(eps)  implies  d(Tx,Ty) <= eps."""
    return _band_check(T, delta, eps_grid, sampler, band_count, meir_keeler=False)


def tabulated_delta(table: dict[float, float], name: str = "delta") -> ModulusFunction:
    """delta(eps) from a search table; off-grid eps use the nearest grid point below (or the first)."""
    keys = sorted(table)

    def ev(eps: float) -> float:
        below = [k for k in keys if k <= eps]
        return table[below[-1] if below else keys[0]]

    return ModulusFunction(name, ev, "none", False)


@dataclass(frozen=True)
class MWSearch:
    table: dict[float, float]
    failures: dict[float, list[dict]] = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return not self.failures

    @property
    def delta(self) -> ModulusFunction | None:
        return tabulated_delta(self.table, "mw_delta") if self.found and self.table else None


def search_mw_modulus(T: MapUnderTest, eps_grid: Sequence[float], sampler: PairSampler,
                      delta_candidates: Sequence[float] = DEFAULT_DELTA_CANDIDATES,
                      band_count: int = DEFAULT_BAND_COUNT) -> MWSearch:
    """Largest candidate delta = c * eps per eps with no MW band violation.

    When every candidate fails for some eps the per-candidate violating pairs
    are kept: they are pairs with eps < d(x_n, y_n) < eps + c_n eps and
    d(Tx_n, Ty_n) > eps for shrinking c_n.
    """
    if list(delta_candidates) != sorted(delta_candidates, reverse=True):
        raise ValueError("delta candidates must be in descending order")
    base = sampled_pair_data(T, sampler)
    table: dict[float, float] = {}
    failures: dict[float, list[dict]] = {}
    for i, eps in enumerate(eps_grid):
        violations = []
        for k, c in enumerate(delta_candidates):
            dl = c * eps
            data = _band_data(T, sampler, base, eps, dl, i, band_count, key=(k, 7919))
            bad = next((p for p in data if eps < p.d < eps + dl and p.dT > eps), None)
            if bad is None:
                table[eps] = dl
                break
            violations.append({"eps": eps, "delta": dl, "x": bad.x, "y": bad.y, "d_xy": bad.d, "d_TxTy": bad.dT})
        else:
            failures[eps] = violations
    return MWSearch(table, failures)


def check_lemma1_triples(T: MapUnderTest, eps: float, delta: float, sampler: PairSampler,
                         targeted: int = 256) -> CheckReport:
    """d(x,y) < delta and d(y,z) <= eps  imply  d(Tx,Tz) <= eps."""
    space = T.space
    triples = list(sample_triples(space, sampler))
    if space.support is None:
        rng = np.random.default_rng([sampler.seed, 31337])
        bounds = space.sampling_bounds()
        lo = np.array([b[0] for b in bounds])
        hi = np.array([b[1] for b in bounds])
        for j in range(targeted):
            y = lo + rng.random(space.dimension) * (hi - lo)
            u = rng.normal(size=space.dimension)
            w = rng.normal(size=space.dimension)
            x = np.clip(y + u / np.max(np.abs(u)) * delta * rng.random(), lo, hi)
            z = x.copy() if j % 8 == 0 else np.clip(y + w / np.max(np.abs(w)) * eps * rng.random(), lo, hi)
            triples.append(tuple(tuple(map(float, p)) for p in (x, y, z)))
    d = space.d
    applicable, skipped, witness = 0, 0, None
    min_gap = math.inf
    for x, y, z in triples:
        if not (d(x, y) < delta and d(y, z) <= eps):
            skipped += 1
            continue
        applicable += 1
        dTxz = d(T.apply(x), T.apply(z))
        min_gap = min(min_gap, eps - dTxz)
        if dTxz > eps and witness is None:
            witness = {"x": x, "y": y, "z": z, "d_xy": d(x, y), "d_yz": d(y, z), "d_TxTz": dTxz}
    details = {"applicable": applicable, "inapplicable": skipped}
    if applicable == 0:
        cond = Condition("triple_lemma", INAPPLICABLE, None, details)
    elif witness is not None:
        cond = Condition("triple_lemma", FAIL, witness, {**details, "min_gap": min_gap})
    else:
        cond = Condition("triple_lemma", PASS, None, {**details, "min_gap": min_gap})
    return CheckReport("cjmp", (cond,), sample_size=len(triples), seed=sampler.seed)


# -- map inequalities driven by moduli --------------------------------------


def wardowski_pair_verdicts(data: Sequence[PairData], phi: ModulusFunction, F: ModulusFunction) -> list[bool | None]:
    """Per pair: True/False for phi(d) + F(dT) <= F(d), None when Tx = Ty (vacuous)."""
    out: list[bool | None] = []
    for p in data:
        if p.dT <= ZERO_DISTANCE or p.d <= ZERO_DISTANCE:
            out.append(None)
            continue
        lhs = phi(p.d) + F(p.dT)
        out.append(bool(lhs <= F(p.d)) and lhs != math.inf)
    return out


def _inequality_condition(name, data, lhs_rhs, skip_equal_images=True):
    """Non-strict lhs <= rhs over pairs; lhs_rhs(p) gives (lhs, rhs)."""
    min_gap, witness, checked, vacuous = math.inf, None, 0, 0
    for p in data:
        if p.d <= ZERO_DISTANCE:
            continue
        if skip_equal_images and p.dT <= ZERO_DISTANCE:
            vacuous += 1
            continue
        lhs, rhs = lhs_rhs(p)
        checked += 1
        gap = rhs - lhs if not (lhs == math.inf or rhs == -math.inf) else -math.inf
        if math.isnan(gap):
            gap = -math.inf
        min_gap = min(min_gap, gap)
        if gap < 0 and witness is None:
            witness = {"x": p.x, "y": p.y, "d_xy": p.d, "d_TxTy": p.dT, "lhs": lhs, "rhs": rhs}
    details = {"pairs_checked": checked, "vacuous_pairs": vacuous}
    if checked:
        details["min_gap"] = min_gap
    if witness is not None:
        return Condition(name, FAIL, witness, details)
    if checked == 0:
        details["vacuous"] = True
    return Condition(name, PASS, None, details)


def check_wardowski(T: MapUnderTest, phi: ModulusFunction, F: ModulusFunction, sampler: PairSampler,
                    data: list[PairData] | None = None) -> CheckReport:
    """phi(d(x,y)) + F(d(Tx,Ty)) <= F(d(x,y)) whenever Tx != Ty."""
    data = sampled_pair_data(T, sampler) if data is None else data
    cond = _inequality_condition("wardowski_inequality", data, lambda p: (phi(p.d) + F(p.dT), F(p.d)))
    return CheckReport("wardowski", (cond,), sample_size=len(data), seed=sampler.seed)


def check_ef_contraction(T: MapUnderTest, E: ModulusFunction, F: ModulusFunction, sampler: PairSampler,
                         data: list[PairData] | None = None) -> CheckReport:
    """F(d(Tx,Ty)) <= E(d(x,y)) whenever Tx != Ty."""
    data = sampled_pair_data(T, sampler) if data is None else data
    cond = _inequality_condition("ef_inequality", data, lambda p: (F(p.dT), E(p.d)))
    return CheckReport("compatible_pair_ef", (cond,), sample_size=len(data), seed=sampler.seed)


def check_modulus_bound(T: MapUnderTest, phi: ModulusFunction, sampler: PairSampler,
                        data: list[PairData] | None = None) -> CheckReport:
    """d(Tx,Ty) <= phi(d(x,y)) for all sampled pairs with x != y."""
    data = sampled_pair_data(T, sampler) if data is None else data
    cond = _inequality_condition("modulus_bound", data, lambda p: (p.dT, phi(p.d)), skip_equal_images=False)
    return CheckReport("ri", (cond,), sample_size=len(data), seed=sampler.seed)


# -- limit conditions on moduli ---------------------------------------------


def _sequences(anchors, family):
    for t in anchors:
        for seq in sequence_family(t, family):
            yield t, seq


def _upper_limit(values, gaps):
    """Conservative (large) estimate of limsup values along the sequence."""
    est = estimate_limsup(values).value
    c = extrapolate_limit(values, gaps)
    return max(est, c) if not math.isnan(c) else est


def _lower_limit(values, gaps):
    est = estimate_liminf(values).value
    c = -extrapolate_limit([-v for v in values], gaps)
    return min(est, c) if not math.isnan(c) else est


def _refutation_condition(name, min_gap, witness, **details):
    details = {"min_gap": min_gap, **details}
    if witness is not None:
        return Condition(name, FAIL, witness, details)
    details["fragile"] = bool(min_gap < FRAGILE_GAP)
    return Condition(name, REFUTATION_ONLY_PASS, None, details)


def _positive_limsup_condition(name, phi, anchors, family, liminf=False):
    """limsup (or liminf) of phi along every generated sequence is positive."""
    witness, worst, checked = None, math.inf, 0
    for t, seq in _sequences(anchors, family):
        terms, gaps = seq.terms(), seq.gaps()
        values = [phi(s) for s in terms]
        if liminf:
            ok, est, c = liminf_positive(values, gaps)
        else:
            ok, est, c = limsup_positive(values, gaps)
        checked += 1
        worst = min(worst, est.value)
        if not ok and witness is None:
            witness = {"anchor": t, "generator": seq.generator, "tail_estimate": est.value, "extrapolated": c,
                       "last_term": terms[-1], "last_value": values[-1]}
    return _refutation_condition(name, worst, witness, sequences=checked)


def check_iii_prime(phi: ModulusFunction, t_grid: Sequence[float], family=DEFAULT_FAMILY) -> Condition:
    return _positive_limsup_condition("iii_prime", phi, t_grid, family)


def check_iii_doubleprime(phi: ModulusFunction, t_grid: Sequence[float], family=DEFAULT_FAMILY) -> Condition:
    """Strictly decreasing t_n with phi(t_n) -> 0 must have t_n -> 0.

    Sequences anchored at t > 0 are the refuting candidates; sequences
    anchored at 0 satisfy the conclusion trivially.
    """
    witness, checked, vanishing = None, 0, 0
    for t, seq in _sequences([0.0, *t_grid], family):
        terms, gaps = seq.terms(), seq.gaps()
        values = [phi(s) for s in terms]
        positive, est, c = limsup_positive(values, gaps)
        checked += 1
        if positive:
            continue
        vanishing += 1
        if t > 0 and witness is None:
            witness = {"anchor": t, "generator": seq.generator, "tail_estimate": est.value, "extrapolated": c,
                       "last_term": terms[-1], "last_value": values[-1]}
    details = {"sequences": checked, "vanishing_sequences": vanishing}
    if witness is not None:
        return Condition("iii_doubleprime", FAIL, witness, details)
    return Condition("iii_doubleprime", REFUTATION_ONLY_PASS, None, details)


def check_wardowski_side_conditions(phi: ModulusFunction, F: ModulusFunction, condition_set: str,
                                    t_grid: Sequence[float], family=DEFAULT_FAMILY,
                                    anchors: Sequence[float] | None = None) -> CheckReport:
    Wardowski(phi, F, condition_set)
    grid = sorted(t_grid)
    anchors = grid if anchors is None else sorted(anchors)
    conds = []
    if condition_set == "i_ii_iii":
        conds.append(check_monotone(F, grid, strict=True, name="i_F_strictly_increasing"))
        conds.append(_check_unbounded_below(F))
        conds.append(_positive_limsup_condition("iii_liminf_phi_positive", phi, [0.0, *anchors], family,
                                                liminf=True))
    else:
        conds.append(check_monotone(F, grid, strict=False, name="F_nondecreasing"))
        if condition_set == "iii_prime":
            conds.append(check_iii_prime(phi, anchors, family))
        else:
            conds.append(check_iii_doubleprime(phi, anchors, family))
    return CheckReport("wardowski", tuple(conds), sample_size=len(grid))


def _check_unbounded_below(F: ModulusFunction) -> Condition:
    prev, witness = math.inf, None
    for k in range(1, UNBOUNDED_BELOW_DEPTH + 1):
        v = F(2.0**-k)
        if v > prev and witness is None:
            witness = {"k": k, "F_prev": prev, "F_k": v}
        prev = v
        if v == -math.inf:
            break
    details = {"depth": k, "F_at_depth": prev}
    if witness is None and not prev < UNBOUNDED_BELOW_LEVEL:
        witness = {"k": k, "F_k": prev, "threshold": UNBOUNDED_BELOW_LEVEL}
    if witness is not None:
        return Condition("ii_F_to_minus_infinity", FAIL, witness, details)
    return Condition("ii_F_to_minus_infinity", REFUTATION_ONLY_PASS, None, details)


def check_iii_doubleprime_implies_iii_prime(phi: ModulusFunction, t_grid: Sequence[float],
                                            family=DEFAULT_FAMILY) -> CheckReport:
    """Both checks on identical sequence families; a (iii'') pass beside a (iii') fail is a checker defect."""
    dp = check_iii_doubleprime(phi, t_grid, family)
    pr = check_iii_prime(phi, t_grid, family)
    inconsistent = dp.passed and pr.verdict == FAIL
    # sequence-level: whatever refutes (iii') at an anchor t > 0 must also refute (iii'')
    if pr.verdict == FAIL and dp.verdict != FAIL:
        inconsistent = True
    if inconsistent:
        cons = Condition("consistency", FAIL, {"iii_doubleprime": dp.verdict, "iii_prime": pr.verdict,
                                               "iii_prime_witness": pr.witness})
    else:
        cons = Condition("consistency", PASS, None, {"iii_doubleprime": dp.verdict, "iii_prime": pr.verdict})
    return CheckReport("wardowski", (dp, pr, cons), sample_size=len(t_grid))


def check_ri(phi: ModulusFunction, t_grid: Sequence[float], family=DEFAULT_FAMILY,
             anchors: Sequence[float] | None = None) -> CheckReport:
    """phi(t) < t pointwise and limsup_{s -> t+} phi(s) < t."""
    pointwise = _pointwise_below(phi, identity(), t_grid, "phi_below_identity")
    limit = _limit_vs_anchor("right_limsup_below_anchor", phi, t_grid if anchors is None else anchors, family,
                             upper=True)
    return CheckReport("ri", (pointwise, limit), sample_size=len(t_grid))


def check_thm8_E(E: ModulusFunction, t_grid: Sequence[float], family=DEFAULT_FAMILY,
                 anchors: Sequence[float] | None = None) -> CheckReport:
    """E(t) < t pointwise and liminf E(t_n) < t along right approaches."""
    pointwise = _pointwise_below(E, identity(), t_grid, "E_below_identity")
    limit = _limit_vs_anchor("right_liminf_below_anchor", E, t_grid if anchors is None else anchors, family,
                             upper=False)
    return CheckReport("ri", (pointwise, limit), sample_size=len(t_grid))


def _pointwise_below(f, g, grid, name):
    min_gap, witness = math.inf, None
    for t in grid:
        gap = g(t) - f(t)
        min_gap = min(min_gap, gap)
        if not gap > 0 and witness is None:
            witness = {"t": t, "lower": f(t), "upper": g(t)}
    return strict_condition(name, min_gap, witness)


def _limit_vs_anchor(name, f, anchors, family, upper):
    min_gap, witness, checked = math.inf, None, 0
    for t, seq in _sequences(anchors, family):
        terms, gaps = seq.terms(), seq.gaps()
        values = [f(s) for s in terms]
        lim = _upper_limit(values, gaps) if upper else _lower_limit(values, gaps)
        checked += 1
        gap = t - lim
        min_gap = min(min_gap, gap)
        if not gap > 0 and witness is None:
            witness = {"anchor": t, "generator": seq.generator, "limit_estimate": lim}
    return _refutation_condition(name, min_gap, witness, sequences=checked)


# -- compatible pairs -------------------------------------------------------


def check_C1(E: ModulusFunction, F: ModulusFunction, grid: Sequence[float]) -> CheckReport:
    """t <= s  implies  E(t) < F(s), over all ordered grid pairs."""
    ts = list(grid)
    if ts != sorted(ts):
        raise ValueError("grid must be ascending")
    Ev = [E(t) for t in ts]
    Fv = [F(s) for s in ts]
    run_max, arg = -math.inf, -1
    min_gap, at, witness = math.inf, None, None
    for j, s in enumerate(ts):
        if Ev[j] > run_max:
            run_max, arg = Ev[j], j
        gap = Fv[j] - run_max
        if gap < min_gap:
            min_gap, at = gap, (ts[arg], s)
        if not gap > 0 and witness is None:
            witness = {"t": ts[arg], "s": s, "E_t": Ev[arg], "F_s": Fv[j]}
    cond = strict_condition("C1", min_gap, witness, min_gap_t=at[0], min_gap_s=at[1],
                            pairs=len(ts) * (len(ts) + 1) // 2)
    return CheckReport("compatible_pair_ef", (cond,), sample_size=len(ts))


def adversarial_s(F: ModulusFunction, t: float, tn: float) -> tuple[float, float]:
    """Point of (t, tn) with the smallest sampled F value (interior grid plus a right-edge probe)."""
    width = tn - t
    cands = [t + width * j / (C2_INTERIOR_SAMPLES + 1) for j in range(1, C2_INTERIOR_SAMPLES + 1)]
    cands.append(t + width * 2.0**-C2_EDGE_EXPONENT)
    best_s, best_v = None, math.inf
    for s in cands:
        if not t < s < tn:
            continue
        v = F(s)
        if best_s is None or v < best_v:
            best_s, best_v = s, v
    if best_s is None:
        best_s = tn
        best_v = F(tn)
    return best_s, best_v


def check_C2(E: ModulusFunction, F: ModulusFunction, anchors: Sequence[float], family=DEFAULT_FAMILY) -> CheckReport:
    """limsup (F(s_n) - E(t_n)) > 0 with s_n chosen to make F small on (t, t_n)."""
    witness, worst, checked, unreliable = None, math.inf, 0, []
    for t, seq in _sequences(anchors, family):
        terms, gaps = seq.terms(), seq.gaps()
        qs, ss = [], []
        for tn in terms:
            s, fv = adversarial_s(F, t, tn)
            ss.append(s)
            qs.append(fv - E(tn))
        checked += 1
        if all(q == -math.inf for q in qs):
            unreliable.append(t)
        positive, est, c = limsup_positive(qs, gaps)
        worst = min(worst, est.value)
        if not positive and witness is None:
            witness = {"anchor": t, "generator": seq.generator, "tail_limsup": est.value, "extrapolated": c,
                       "t_n": terms[-1], "s_n": ss[-1], "F_s_minus_E_t": qs[-1]}
    cond = _refutation_condition("C2", worst, witness, sequences=checked, unreliable_anchors=tuple(unreliable))
    return CheckReport("compatible_pair_ef", (cond,), sample_size=checked)


def check_alpha_f(T: MapUnderTest, alpha: float, F: ModulusFunction, sampler: PairSampler,
                  grid: Sequence[float], anchors: Sequence[float], data: list[PairData] | None = None) -> CheckReport:
    AlphaF(alpha, F)
    E = scaled(alpha, F)
    ineq = check_ef_contraction(T, E, F, sampler, data).conditions[0]
    ineq = Condition("alpha_inequality", ineq.verdict, ineq.witness, ineq.details)
    c1 = check_C1(E, F, sorted(grid)).conditions[0]
    c1 = Condition("C1_prime", c1.verdict, c1.witness, c1.details)
    min_val, witness, unreliable = math.inf, None, []
    for t in anchors:
        est = estimate_right_limit(F, t)
        if not est.reliable:
            unreliable.append(t)
        min_val = min(min_val, est.value)
        if not est.value > 0 and witness is None:
            witness = {"anchor": t, "right_limit": est.value}
    c2 = _refutation_condition("C2_prime", min_val, witness, unreliable_anchors=tuple(unreliable))
    return CheckReport("alpha_f", (ineq, c1, c2), sample_size=len(data) if data else sampler.count, seed=sampler.seed)


def check_proinov(E: ModulusFunction, F: ModulusFunction, grid: Sequence[float], anchors: Sequence[float],
                  family=DEFAULT_FAMILY) -> CheckReport:
    grid = sorted(grid)
    p1 = check_monotone(F, grid, strict=False, name="p1_F_nondecreasing")
    p2 = _pointwise_below(E, F, grid, "p2_E_below_F")
    min_gap, witness, checked = math.inf, None, 0
    for t, seq in _sequences(anchors, family):
        terms, gaps = seq.terms(), seq.gaps()
        lim_E = _lower_limit([E(s) for s in terms], gaps)
        F_right = estimate_right_limit(F, t, dyadic(t)).value
        checked += 1
        gap = F_right - lim_E
        min_gap = min(min_gap, gap)
        if not gap > 0 and witness is None:
            witness = {"anchor": t, "generator": seq.generator, "liminf_E": lim_E, "F_right_limit": F_right}
    p3 = _refutation_condition("p3_liminf_E_below_F_right", min_gap, witness, sequences=checked)
    return CheckReport("proinov", (p1, p2, p3), sample_size=len(grid))


# -- CJMP derivation --------------------------------------------------------


@dataclass(frozen=True)
class CJMPDerivation:
    certificate: CJMP | None
    search: MWSearch
    premise_hint: str | None = None

    @property
    def found(self) -> bool:
        return self.certificate is not None


def _evidence_passed(evidence: Sequence[CheckReport], name: str) -> bool:
    for rep in evidence:
        for c in rep.conditions:
            if c.name == name:
                return c.verdict in PASSING
    return False


def derive_cjmp_certificate(T: MapUnderTest, evidence: Sequence[CheckReport], eps_grid: Sequence[float],
                            sampler: PairSampler, relaxed: bool = False, **search_kw) -> CJMPDerivation:
    """Turn passing (E, F) evidence into an explicit delta(eps) table.

    The strict variant needs C1, C2, the (E, F) inequality and contractivity;
    the relaxed variant drops C1 but insists on contractivity.
    """
    required = ["contractive", "C2", "ef_inequality"] + ([] if relaxed else ["C1"])
    missing = [r for r in required if not _evidence_passed(evidence, r)]
    if missing:
        raise ValueError(f"premise evidence missing or not passing: {', '.join(missing)}")
    search = search_mw_modulus(T, eps_grid, sampler, **search_kw)
    if search.found:
        table = tuple(sorted(search.table.items()))
        return CJMPDerivation(CJMP(search.delta, table), search)
    bad = sorted(search.failures)
    hint = (f"no delta found for eps in {tuple(bad)}: either the samples hit a floating-point artefact near the "
            f"band edge or a premise is violated; re-examine C2 at anchors near {bad[0]!r} and the (E, F) "
            f"inequality on pairs at distance just above it")
    return CJMPDerivation(None, search, hint)
