"""Theorem-level verification: premises checked, Picard behaviour exercised.

A TheoremCase pairs a map with a certificate and a theorem id. verify_picard
runs the premise checks that theorem needs, in the order its proof uses
them, then iterates from every start. Nothing here is ever "proved": the
best overall verdict is ``verified_empirically``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

from . import certificates as C
from .iteration import (
    IterationConfig,
    UniquenessProbe,
    check_step_limit_zero,
    detect_cauchy,
    estimate_rate,
    uniqueness_probe,
)
from .maps import MapUnderTest
from .metric import PairSampler
from .modulus import ModulusFunction, builtin, constant, difference, identity, log_grid
from .report import FAIL, INAPPLICABLE, PASS, CheckReport, Condition

VERIFIED = "verified_empirically"
PREMISE_FAILED = "premise_failed"
CONCLUSION_FAILED = "conclusion_failed"
INCONCLUSIVE = "inconclusive"

THEOREM_IDS = ("banach", "meir_keeler", "cjmp", "wardowski", "ri", "ef_main", "ef_relaxed", "thm8_ri_improved",
               "app2_phiF", "app3_iii_doubleprime", "app4_alphaF", "app5_proinov")

EXPECTED_KIND = {
    "banach": "banach", "meir_keeler": "meir_keeler", "cjmp": "cjmp", "wardowski": "wardowski", "ri": "ri",
    "ef_main": "compatible_pair_ef", "ef_relaxed": "compatible_pair_ef", "thm8_ri_improved": "ri",
    "app2_phiF": "wardowski", "app3_iii_doubleprime": "wardowski", "app4_alphaF": "alpha_f",
    "app5_proinov": "proinov",
}

WARDOWSKI_SET = {"wardowski": "i_ii_iii", "app2_phiF": "iii_prime", "app3_iii_doubleprime": "iii_doubleprime"}


@dataclass(frozen=True)
class CheckParams:
    sampler: PairSampler = PairSampler("uniform", 2000, 0)
    eps_grid: tuple[float, ...] = (0.05, 0.1, 0.5, 1.0, 2.0)
    grid: tuple[float, ...] = tuple(log_grid(1e-6, 1e6, 200))
    anchors: tuple[float, ...] = (0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0)
    family: tuple[str, ...] = ("dyadic", "harmonic")
    iteration: IterationConfig = IterationConfig()
    band_count: int = C.DEFAULT_BAND_COUNT

    def with_seed(self, seed: int) -> "CheckParams":
        return replace(self, sampler=self.sampler.with_seed(seed))


@dataclass(frozen=True)
class TheoremCase:
    theorem_id: str
    map: MapUnderTest
    certificate: object
    starts: tuple
    params: CheckParams = CheckParams()
    name: str = ""

    def __post_init__(self):
        if self.theorem_id not in THEOREM_IDS:
            raise ValueError(f"unknown theorem id {self.theorem_id!r}")
        expected = EXPECTED_KIND[self.theorem_id]
        if getattr(self.certificate, "kind", None) != expected:
            raise ValueError(f"theorem {self.theorem_id} needs a {expected} certificate, "
                             f"got {getattr(self.certificate, 'kind', type(self.certificate).__name__)}")
        if self.theorem_id in WARDOWSKI_SET and self.certificate.condition_set != WARDOWSKI_SET[self.theorem_id]:
            raise ValueError(f"theorem {self.theorem_id} needs condition set {WARDOWSKI_SET[self.theorem_id]}")


@dataclass
class VerificationReport:
    case_name: str
    theorem_id: str
    premise_reports: list[CheckReport]
    consequence_reports: list[CheckReport] = field(default_factory=list)
    conclusion: UniquenessProbe | None = None
    overall: str = INCONCLUSIVE
    failed_premise: str | None = None
    certificate: object = None

    @property
    def refutation_only_premises(self) -> tuple[str, ...]:
        return tuple(n for r in self.premise_reports for n in r.refutation_only)

    def worst_margin(self) -> float | None:
        margins = [m for r in self.premise_reports + self.consequence_reports
                   if (m := r.worst_margin()) is not None and math.isfinite(m)]
        return min(margins) if margins else None

    def to_text(self) -> str:
        head = self.overall if self.failed_premise is None else f"{self.overall}({self.failed_premise})"
        lines = [f"case {self.case_name} theorem={self.theorem_id} overall={head}"]
        if self.refutation_only_premises:
            lines.append("refutation-only premises: " + ", ".join(self.refutation_only_premises))
        lines.append("premises:")
        lines += ["  " + ln for r in self.premise_reports for ln in r.to_text().splitlines()]
        if self.consequence_reports:
            lines.append("consequences:")
            lines += ["  " + ln for r in self.consequence_reports for ln in r.to_text().splitlines()]
        if self.conclusion is not None:
            lines.append("conclusion:")
            lines += ["  " + ln for ln in self.conclusion.report.to_text().splitlines()]
            for s, tr in zip(self.conclusion.starts, self.conclusion.traces):
                lines.append(f"    start={s!r} verdict={tr.verdict} iterations={tr.iterations_used} limit={tr.limit!r}")
        return "\n".join(lines) + "\n"


def _settle(rep: VerificationReport) -> VerificationReport:
    for r in rep.premise_reports:
        bad = r.failed
        if bad:
            rep.overall, rep.failed_premise = PREMISE_FAILED, bad[0].name
            return rep
    if any(r.verdict() == INAPPLICABLE for r in rep.premise_reports):
        rep.overall = INCONCLUSIVE
        return rep
    if any(r.failed for r in rep.consequence_reports):
        rep.overall = CONCLUSION_FAILED
        return rep
    if rep.conclusion is not None and not rep.conclusion.passed:
        rep.overall = CONCLUSION_FAILED
        return rep
    rep.overall = VERIFIED
    return rep


def _derivation_report(deriv: C.CJMPDerivation) -> CheckReport:
    if deriv.found:
        cond = Condition("mw_delta_found", PASS, None, {"delta_table": deriv.certificate.table})
    else:
        eps = min(deriv.search.failures)
        cond = Condition("mw_delta_found", FAIL, {"eps": eps, "violations": len(deriv.search.failures[eps]),
                                                  "first": deriv.search.failures[eps][0],
                                                  "hint": deriv.premise_hint})
    return CheckReport("cjmp", (cond,))


def verify_picard(case: TheoremCase) -> VerificationReport:
    T, cert, p = case.map, case.certificate, case.params
    tid, sampler = case.theorem_id, p.sampler
    data = C.sampled_pair_data(T, sampler)
    premises: list[CheckReport] = []
    consequences: list[CheckReport] = []
    derived_cert = None

    if tid == "banach":
        premises.append(C.check_banach(T, cert.lam, sampler, data))
    elif tid == "meir_keeler":
        premises.append(C.check_meir_keeler(T, cert.delta, p.eps_grid, sampler, p.band_count))
    elif tid == "cjmp":
        premises.append(C.check_contractive(T, sampler, data))
        premises.append(C.check_mw_condition(T, cert.delta, p.eps_grid, sampler, p.band_count))
    elif tid in WARDOWSKI_SET:
        premises.append(C.check_wardowski(T, cert.phi, cert.F, sampler, data))
        premises.append(C.check_wardowski_side_conditions(cert.phi, cert.F, cert.condition_set, p.grid,
                                                          p.family, anchors=p.anchors))
    elif tid == "ri":
        premises.append(C.check_ri(cert.phi, p.grid, p.family, anchors=p.anchors))
        premises.append(C.check_modulus_bound(T, cert.phi, sampler, data))
    elif tid == "thm8_ri_improved":
        premises.append(C.check_thm8_E(cert.phi, p.grid, p.family, anchors=p.anchors))
        premises.append(C.check_modulus_bound(T, cert.phi, sampler, data))
    elif tid in ("ef_main", "ef_relaxed", "app5_proinov"):
        E, F = cert.E, cert.F
        relaxed = tid == "ef_relaxed"
        c1 = C.check_C1(E, F, p.grid)
        c2 = C.check_C2(E, F, p.anchors, p.family)
        ef = C.check_ef_contraction(T, E, F, sampler, data)
        contr = C.check_contractive(T, sampler, data)
        if tid == "ef_main":
            premises += [c1, c2, ef]
            consequences.append(contr)
        elif relaxed:
            premises += [contr, c2, ef]
        else:
            premises += [C.check_proinov(E, F, p.grid, p.anchors, p.family), ef]
            consequences += [c1, c2, contr]
        evidence = [c1, c2, ef, contr]
        if all(not r.failed for r in premises + consequences):
            try:
                deriv = C.derive_cjmp_certificate(T, evidence, p.eps_grid, sampler, relaxed=relaxed,
                                                  band_count=p.band_count)
            except ValueError as exc:
                consequences.append(CheckReport("cjmp", (Condition("mw_delta_found", INAPPLICABLE, None,
                                                                   {"reason": str(exc)}),)))
            else:
                consequences.append(_derivation_report(deriv))
                derived_cert = deriv.certificate
    elif tid == "app4_alphaF":
        premises.append(C.check_alpha_f(T, cert.alpha, cert.F, sampler, p.grid, p.anchors, data))
    rep = VerificationReport(case.name or f"{T.name}:{tid}", tid, premises, consequences, certificate=derived_cert)
    if not any(r.failed for r in premises):
        rep.conclusion = uniqueness_probe(T, case.starts, p.iteration)
    return _settle(rep)


def verify_counterexample(T: MapUnderTest, starts: Sequence, config: IterationConfig = IterationConfig(),
                          sampler: PairSampler = PairSampler("uniform", 10_000, 0), name: str = "") -> VerificationReport:
    """A contractive map that is nonetheless not a Picard operator.

    verified_empirically means: contractive on every sample, steps shrink,
    yet the orbits are not Cauchy and no common limit is reached.
    """
    contr = C.check_contractive(T, sampler)
    rep = VerificationReport(name or f"{T.name}:counterexample", "counterexample", [contr])
    if contr.failed:
        rep.overall, rep.failed_premise = PREMISE_FAILED, "contractive"
        return rep
    probe = uniqueness_probe(T, starts, config)
    rep.conclusion = probe
    tr = probe.traces[0]
    tail = max(2, min(100, len(tr.step_distances) // 2))
    if len(tr.step_distances) >= 2 * tail:
        rep.consequence_reports.append(check_step_limit_zero(tr, tail, config.cauchy_tol))
    if len(tr.points) > config.cauchy_window:
        cd = detect_cauchy(tr, config.cauchy_window, config.cauchy_tol, T.space)
        details = {"tail_spread": cd.tail_spread, "tail_step_sum": cd.tail_step_sum}
        rep.consequence_reports.append(CheckReport("picard", (Condition("orbit_not_cauchy", PASS if not cd.is_cauchy
                                       else FAIL, None if not cd.is_cauchy else details, details),)))
    if probe.passed:
        rep.overall = CONCLUSION_FAILED
    elif any(r.failed for r in rep.consequence_reports):
        rep.overall = CONCLUSION_FAILED
    else:
        rep.overall = VERIFIED
    return rep


def classify(T: MapUnderTest, params: CheckParams = CheckParams(),
             moduli: dict[str, object] | None = None) -> list[tuple[str, str, dict]]:
    """Run every checker against one map; classes needing unsupplied moduli are not attempted."""
    moduli = moduli or {}
    sampler = params.sampler
    data = C.sampled_pair_data(T, sampler)
    rows: list[tuple[str, str, dict]] = []
    lam = C.estimate_banach_lambda(T, sampler, data)
    note = {"lambda_hat": lam}
    if any(hi == math.inf for _, hi in T.space.bounds):
        note["caveat"] = f"sampled on a reach of {T.space.reach:g}; lambda_hat < 1 need not hold on the whole space"
    rows.append(("banach", PASS if lam < 1 else FAIL, note))
    contr = C.check_contractive(T, sampler, data)
    rows.append(("contractive", contr.verdict(), {"min_gap": contr.worst_margin()}))
    if "meir_keeler" in moduli:
        mk = C.check_meir_keeler(T, moduli["meir_keeler"], params.eps_grid, sampler, params.band_count)
        rows.append(("meir_keeler", mk.verdict(), {}))
    else:
        rows.append(("meir_keeler", "not_attempted", {"reason": "needs a delta modulus"}))
    search = C.search_mw_modulus(T, params.eps_grid, sampler, band_count=params.band_count)
    cjmp_ok = contr.verdict() == PASS and search.found
    info = {"delta_table": tuple(sorted(search.table.items()))}
    if not search.found:
        eps = min(search.failures)
        info["failed_eps"] = tuple(sorted(search.failures))
        info["witness"] = search.failures[eps][-1]
    rows.append(("cjmp", PASS if cjmp_ok else FAIL, info))
    if 0 < lam < 1:
        tau = -math.log(lam) - 1e-9
        w = C.check_wardowski(T, constant(tau), builtin("log"), sampler, data)
        rows.append(("wardowski", w.verdict(), {"F": "log", "phi": tau}))
    elif lam == 0:
        rows.append(("wardowski", PASS, {"reason": "T is constant on the samples; all pairs vacuous"}))
    else:
        rows.append(("wardowski", FAIL, {"reason": "lambda_hat >= 1 rules out F=log with constant phi",
                                         "lambda_hat": lam}))
    for kind in ("ri", "compatible_pair_ef", "alpha_f", "proinov"):
        cert = moduli.get(kind)
        if cert is None:
            rows.append((kind, "not_attempted", {"reason": "needs user-supplied moduli"}))
            continue
        if kind == "ri":
            rep = C.check_modulus_bound(T, cert.phi, sampler, data)
        elif kind == "compatible_pair_ef":
            rep = C.check_ef_contraction(T, cert.E, cert.F, sampler, data)
        elif kind == "alpha_f":
            rep = C.check_alpha_f(T, cert.alpha, cert.F, sampler, params.grid, params.anchors, data)
        else:
            rep = C.check_ef_contraction(T, cert.E, cert.F, sampler, data)
        rows.append((kind, rep.verdict(), {}))
    return rows


def verify_implication_suite(params: CheckParams = CheckParams(), seeds: Sequence[int] = (0,)) -> CheckReport:
    """Implications between certificate classes on identical samples, over the gallery.

    A condition passes when the implied check does not fail wherever the
    implying check passed; it is inapplicable when the premise never passed.
    """
    from . import gallery

    conds: list[Condition] = []
    total = 0
    for seed in seeds:
        for name in gallery.list_entries():
            entry = gallery.instantiate(name)
            T = entry.map
            p = entry.params(params).with_seed(seed)
            sampler = p.sampler
            data = C.sampled_pair_data(T, sampler)
            total += len(data)
            contr = C.check_contractive(T, sampler, data)
            for cert in entry.recommended_certificates:
                tag = f"{name}/seed{seed}"
                if cert.kind == "banach":
                    premise = C.check_banach(T, cert.lam, sampler, data)
                    conds.append(_implication(f"{tag}/banach=>contractive", premise, [contr]))
                    tau = -math.log(cert.lam) if cert.lam > 0 else math.inf
                    if math.isfinite(tau):
                        conds.append(_wardowski_agreement(f"{tag}/banach<=>wardowski_log", data, cert.lam, tau))
                elif cert.kind == "compatible_pair_ef":
                    c1 = C.check_C1(cert.E, cert.F, p.grid)
                    c2 = C.check_C2(cert.E, cert.F, p.anchors, p.family)
                    ef = C.check_ef_contraction(T, cert.E, cert.F, sampler, data)
                    premise = _merge("ef_premises", [c1, c2, ef])
                    conds.append(_implication(f"{tag}/ef=>contractive", premise, [contr]))
                    if premise.passed and contr.passed:
                        d = C.derive_cjmp_certificate(T, [c1, c2, ef, contr], p.eps_grid, sampler,
                                                      band_count=p.band_count)
                        conds.append(_implication(f"{tag}/ef=>cjmp_certificate", premise, [_derivation_report(d)]))
                    else:
                        conds.append(_implication(f"{tag}/ef=>cjmp_certificate", premise, [contr]))
                elif cert.kind == "meir_keeler":
                    mk = C.check_meir_keeler(T, cert.delta, p.eps_grid, sampler, p.band_count)
                    mw = C.check_mw_condition(T, cert.delta, p.eps_grid, sampler, p.band_count)
                    conds.append(_implication(f"{tag}/meir_keeler=>mw_same_delta", mk, [mw]))
                elif cert.kind == "proinov":
                    pr = C.check_proinov(cert.E, cert.F, p.grid, p.anchors, p.family)
                    c1 = C.check_C1(cert.E, cert.F, p.grid)
                    c2 = C.check_C2(cert.E, cert.F, p.anchors, p.family)
                    conds.append(_implication(f"{tag}/proinov=>C1_C2", pr, [c1, c2]))
                elif cert.kind == "wardowski" and cert.F.right_continuous and seed == seeds[0]:
                    E = difference(cert.F, cert.phi)
                    c2 = C.check_C2(E, cert.F, p.anchors, p.family)
                    iii = C.check_iii_prime(cert.phi, p.anchors, p.family)
                    conds.append(_agreement(f"{name}/C2(F-phi,F)<=>iii_prime(phi)", c2.conditions[0], iii))
    return CheckReport("implication_suite", tuple(conds), sample_size=total, seed=seeds[0] if seeds else None)


def _merge(kind: str, reports: Sequence[CheckReport]) -> CheckReport:
    return CheckReport(kind, tuple(c for r in reports for c in r.conditions))


def _implication(name: str, premise: CheckReport, implied: Sequence[CheckReport]) -> Condition:
    if not premise.passed:
        return Condition(name, INAPPLICABLE, None, {"premise": premise.verdict()})
    bad = [c for r in implied for c in r.conditions if c.verdict == FAIL]
    if bad:
        return Condition(name, FAIL, {"inconsistent": bad[0].name, "witness": bad[0].witness},
                         {"premise": premise.verdict()})
    return Condition(name, PASS, None, {"premise": premise.verdict()})


def _agreement(name: str, a: Condition, b: Condition) -> Condition:
    if a.passed == b.passed:
        return Condition(name, PASS, None, {"left": a.verdict, "right": b.verdict})
    return Condition(name, FAIL, {"left": a.verdict, "right": b.verdict}, {})


def _wardowski_agreement(name: str, data, lam: float, tau: float) -> Condition:
    verdicts = C.wardowski_pair_verdicts(data, constant(tau), builtin("log"))
    disagree = None
    count = 0
    for p, w in zip(data, verdicts):
        if w is None:
            continue
        direct = p.dT <= lam * p.d
        count += 1
        if direct != w and disagree is None:
            disagree = {"x": p.x, "y": p.y, "d_xy": p.d, "d_TxTy": p.dT, "wardowski": w, "lipschitz": direct}
    if disagree is not None:
        return Condition(name, FAIL, disagree, {"pairs": count})
    return Condition(name, PASS, None, {"pairs": count})


# -- suites ------------------------------------------------------------------


def run_gallery_suite(params: CheckParams = CheckParams()) -> list[VerificationReport]:
    from . import gallery

    reports = []
    for name in gallery.list_entries():
        entry = gallery.instantiate(name)
        if entry.expected_behavior == "contractive_no_fixed_point":
            reports.append(verify_counterexample(entry.map, entry.starts, params.iteration,
                                                 params.sampler, name=f"{name}:counterexample"))
        for case in gallery.cases(name, params):
            reports.append(verify_picard(case))
    return reports


def summary_csv(reports: Sequence[VerificationReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["case", "theorem", "overall", "worst_margin"])
    for r in reports:
        m = r.worst_margin()
        overall = r.overall if r.failed_premise is None else f"{r.overall}({r.failed_premise})"
        w.writerow([r.case_name, r.theorem_id, overall, "" if m is None else repr(m)])
    return buf.getvalue()
