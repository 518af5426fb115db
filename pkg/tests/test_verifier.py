import math

import pytest

from conftest import scalar_map
from picardcheck.certificates import Banach, CompatiblePairEF, Contractive, MeirKeeler, Ri, Wardowski
from picardcheck.metric import PairSampler
from picardcheck.modulus import affine, builtin, constant, identity
from picardcheck.report import FAIL, INAPPLICABLE, PASS, CheckReport, Condition
from picardcheck.verifier import (
    CONCLUSION_FAILED,
    INCONCLUSIVE,
    PREMISE_FAILED,
    VERIFIED,
    CheckParams,
    TheoremCase,
    classify,
    VerificationReport,
    _settle,
    summary_csv,
    verify_counterexample,
    verify_picard,
)

FAST = CheckParams(sampler=PairSampler("uniform", 500, 0), band_count=16)
STARTS = ((-5.0,), (0.3,), (7.0,))


def test_banach_halving_verified(halving):
    rep = verify_picard(TheoremCase("banach", halving, Banach(0.6), STARTS, FAST))
    assert rep.overall == VERIFIED and rep.failed_premise is None
    assert rep.conclusion.passed and abs(rep.conclusion.report.conditions[0].details["common_limit"][0]) < 1e-11


def test_banach_with_too_small_lambda(halving):
    rep = verify_picard(TheoremCase("banach", halving, Banach(0.4), STARTS, FAST))
    assert rep.overall == PREMISE_FAILED and rep.failed_premise == "lipschitz_bound"
    # no probe after a failed premise
    assert rep.conclusion is None


def test_ef_main_verified_and_derives_cjmp(halving):
    cert = CompatiblePairEF(affine(0.75, 0.0), identity())
    rep = verify_picard(TheoremCase("ef_main", halving, cert, STARTS, FAST))
    assert rep.overall == VERIFIED
    assert rep.certificate is not None and rep.certificate.kind == "cjmp"
    again = verify_picard(TheoremCase("cjmp", halving, rep.certificate, STARTS, FAST))
    assert again.overall == VERIFIED


def test_ef_main_with_E_equal_F_fails_C1(halving):
    cert = CompatiblePairEF(identity(), identity())
    rep = verify_picard(TheoremCase("ef_main", halving, cert, STARTS, FAST))
    assert rep.overall == PREMISE_FAILED and rep.failed_premise == "C1"


def test_ef_relaxed_skips_C1(halving):
    cert = CompatiblePairEF(affine(0.75, 0.0), identity())
    rep = verify_picard(TheoremCase("ef_relaxed", halving, cert, STARTS, FAST))
    names = [c.name for r in rep.premise_reports for c in r.conditions]
    assert "C1" not in names and "contractive" in names and rep.overall == VERIFIED


def test_ri_and_improved_variant(cos_map):
    p = CheckParams(sampler=PairSampler("uniform", 500, 0), family=("dyadic",))
    for tid in ("ri", "thm8_ri_improved"):
        rep = verify_picard(TheoremCase(tid, cos_map, Ri(builtin("sine_gap")), ((0.0,), (3.0,)), p))
        assert rep.overall == VERIFIED, rep.to_text()


def test_ri_identity_fails(halving):
    rep = verify_picard(TheoremCase("ri", halving, Ri(identity()), STARTS, FAST))
    assert rep.overall == PREMISE_FAILED and rep.failed_premise == "phi_below_identity"


def test_wardowski_case():
    T = scalar_map(lambda x: math.exp(-0.1) * math.sin(x), -3, 3)
    cert = Wardowski(constant(0.1), builtin("log"))
    rep = verify_picard(TheoremCase("wardowski", T, cert, ((-3.0,), (3.0,)), FAST))
    assert rep.overall == VERIFIED


def test_constant_map_is_vacuously_wardowski():
    T = scalar_map(lambda x: 1.0, -10, 10)
    rep = verify_picard(TheoremCase("wardowski", T, Wardowski(constant(0.1), builtin("log")), STARTS, FAST))
    assert rep.overall == VERIFIED
    assert rep.premise_reports[0].conditions[0].details["vacuous"]


def test_settle_precedence():
    undecided = CheckReport("ri", (Condition("x", INAPPLICABLE),))
    ok = CheckReport("ri", (Condition("y", PASS),))
    bad = CheckReport("ri", (Condition("z", FAIL, {"t": 1.0}),))
    assert _settle(VerificationReport("c", "ri", [ok, undecided])).overall == INCONCLUSIVE
    rep = _settle(VerificationReport("c", "ri", [undecided, bad]))
    assert rep.overall == PREMISE_FAILED and rep.failed_premise == "z"
    assert _settle(VerificationReport("c", "ri", [ok], [bad])).overall == CONCLUSION_FAILED
    assert _settle(VerificationReport("c", "ri", [ok], [ok])).overall == VERIFIED


def test_mismatched_certificate_rejected(halving):
    with pytest.raises(ValueError, match="banach"):
        TheoremCase("banach", halving, Contractive(), STARTS)
    with pytest.raises(ValueError):
        TheoremCase("app2_phiF", halving, Wardowski(constant(0.1), builtin("log")), STARTS)
    with pytest.raises(ValueError):
        TheoremCase("nope", halving, Banach(0.5), STARTS)


def test_meir_keeler_case(halving):
    rep = verify_picard(TheoremCase("meir_keeler", halving, MeirKeeler(identity()), STARTS, FAST))
    assert rep.overall == VERIFIED


class TestCounterexample:
    def test_x_plus_inv_x(self, x_plus_inv_x):
        rep = verify_counterexample(x_plus_inv_x, ((1.0,), (2.0,), (10.0,)))
        assert rep.overall == VERIFIED
        names = {c.name: c.verdict for r in rep.consequence_reports for c in r.conditions}
        assert names == {"step_limit_zero": "pass", "orbit_not_cauchy": "pass"}
        assert not rep.conclusion.passed

    def test_halving_is_not_a_counterexample(self, halving):
        assert verify_counterexample(halving, STARTS).overall == CONCLUSION_FAILED

    def test_identity_is_not_contractive(self):
        rep = verify_counterexample(scalar_map(lambda x: x, 0, 1), ((0.1,), (0.9,)))
        assert rep.overall == PREMISE_FAILED and rep.failed_premise == "contractive"


class TestClassify:
    def test_halving(self, halving):
        rows = {k: (v, info) for k, v, info in classify(halving, FAST)}
        assert rows["banach"][0] == "pass" and rows["banach"][1]["lambda_hat"] == pytest.approx(0.5)
        assert rows["contractive"][0] == "pass" and rows["cjmp"][0] == "pass"
        assert rows["wardowski"][0] == "pass"
        assert rows["meir_keeler"][0] == "not_attempted" and rows["ri"][0] == "not_attempted"

    def test_with_moduli(self, halving):
        rows = {k: v for k, v, _ in classify(halving, FAST, {"meir_keeler": identity(), "ri": Ri(affine(0.6, 0))})}
        assert rows["meir_keeler"] == "pass" and rows["ri"] == "pass"

    def test_doubling(self):
        rows = {k: v for k, v, _ in classify(scalar_map(lambda x: 2 * x, 0, 1), FAST)}
        assert rows["banach"] == "fail" and rows["contractive"] == "fail" and rows["wardowski"] == "fail"

    def test_unbounded_space_caveat(self):
        T = scalar_map(lambda x: x + 1 / x, 1, math.inf, reach=100.0)
        rows = {k: info for k, _, info in classify(T, FAST)}
        assert "caveat" in rows["banach"]


def test_replay_is_deterministic(halving):
    cert = CompatiblePairEF(affine(0.75, 0.0), identity())
    a = verify_picard(TheoremCase("ef_main", halving, cert, STARTS, FAST))
    b = verify_picard(TheoremCase("ef_main", halving, cert, STARTS, FAST))
    assert a.to_text() == b.to_text()
    assert summary_csv([a]) == summary_csv([b])
    assert summary_csv([a]).splitlines()[0] == "case,theorem,overall,worst_margin"
