import math

import pytest

from picardcheck.modulus import (
    BUILTIN_NAMES,
    ModulusFunction,
    RightApproachSequence,
    builtin,
    check_declared_monotone,
    check_limsup_sum_rule,
    dyadic,
    estimate_liminf,
    estimate_limsup,
    estimate_right_limit,
    extrapolate_limit,
    harmonic,
    liminf_positive,
    limsup_positive,
    log_grid,
)
from picardcheck.report import FAIL, INAPPLICABLE, PASS


def test_eval_examples():
    assert builtin("log")(1.0) == 0.0
    assert builtin("app4_F")(1.0) == 2.0
    assert builtin("app4_F")(0.1) == 2.5
    assert builtin("app4_F")(4.0) == 2.5
    assert builtin("app4_F")(0.25) == 2.5
    assert builtin("scaled", 2 / 5, builtin("app4_F"))(1.0) == pytest.approx(0.8, abs=1e-15)
    assert builtin("power", 0.5)(9.0) == 3.0


@pytest.mark.parametrize("t", [0.0, -1.0])
def test_nonpositive_argument_rejected(t):
    with pytest.raises(ValueError):
        builtin("identity")(t)


def test_unknown_builtin_rejected():
    with pytest.raises(ValueError):
        builtin("no_such_thing")
    with pytest.raises(ValueError):
        builtin("log", 2.0)


def test_app4_metadata():
    f = builtin("app4_F")
    assert f.monotone == "none" and f.right_continuous


def test_registry_contains_required_names():
    for name in ("identity", "log", "affine", "power", "constant", "app4_F", "scaled"):
        assert name in BUILTIN_NAMES


def test_log_is_minus_infinity_free_but_very_negative():
    assert builtin("log")(1e-300) == pytest.approx(-690.7755, rel=1e-6)


class TestSequences:
    def test_dyadic_terms(self):
        seq = dyadic(1.0, 30)
        terms = seq.terms()
        assert len(terms) == 30
        assert all(s > 1.0 for s in terms)
        assert all(a > b for a, b in zip(terms, terms[1:]))
        assert terms[-1] - 1.0 < 2.0**-29

    def test_dyadic_stops_at_resolution(self):
        # past 2**-52 the sum rounds back to the anchor
        assert len(dyadic(1.0, 80).terms()) == 52

    def test_harmonic_terms(self):
        terms = harmonic(2.0, 10).terms()
        assert terms[0] == 3.0 and terms[-1] == 2.1

    def test_custom_terms_validated(self):
        assert RightApproachSequence(1.0, "custom", custom=(1.5, 1.1)).terms() == [1.5, 1.1]
        with pytest.raises(ValueError):
            RightApproachSequence(1.0, "custom", custom=(0.5,)).terms()

    def test_anchor_validation(self):
        with pytest.raises(ValueError):
            RightApproachSequence(-1.0)
        with pytest.raises(ValueError):
            RightApproachSequence(1.0, "spiral")


class TestRightLimit:
    def test_app4_at_quarter(self):
        est = estimate_right_limit(builtin("app4_F"), 0.25, dyadic(0.25, 30))
        assert abs(est.value - 2.5) < 1e-6 and est.reliable

    def test_identity(self):
        for t in (0.1, 1.0, 7.0):
            assert estimate_right_limit(builtin("identity"), t).value == pytest.approx(t, abs=1e-9)

    def test_step_right_limit(self):
        assert estimate_right_limit(builtin("step"), 1.0).value == 2.0

    def test_oscillating_flagged_unreliable(self):
        f = ModulusFunction("osc", lambda t: math.sin(1.0 / (t - 1.0)) if t > 1 else 0.0)
        assert not estimate_right_limit(f, 1.0).reliable

    def test_mixed_infinities_unreliable(self):
        f = ModulusFunction("pm", lambda t: math.inf if int(round(math.log2(t - 1.0))) % 2 else -math.inf)
        est = estimate_right_limit(f, 1.0)
        assert not est.reliable

    def test_anchor_mismatch_and_short_sequence(self):
        with pytest.raises(ValueError):
            estimate_right_limit(builtin("identity"), 1.0, dyadic(2.0))
        with pytest.raises(ValueError):
            estimate_right_limit(builtin("identity"), 1.0, dyadic(1.0, 4))


class TestLimsup:
    def test_sum_rule_sequence(self):
        vals = [2 + 1 / n + (-1) ** n for n in range(1, 1001)]
        assert estimate_limsup(vals, 100).value == pytest.approx(3.0, abs=1e-2)

    def test_constant(self):
        assert estimate_limsup([5.0] * 50).value == 5.0
        assert estimate_liminf([5.0] * 50).value == 5.0

    def test_null_sequence(self):
        vals = [(-1) ** n / n for n in range(1, 1001)]
        assert estimate_limsup(vals).value == pytest.approx(0.0, abs=1e-2)
        assert estimate_liminf(vals).value == pytest.approx(0.0, abs=1e-2)

    def test_tail_validation(self):
        with pytest.raises(ValueError):
            estimate_limsup([1.0, 2.0], 3)
        with pytest.raises(ValueError):
            estimate_limsup([1.0, 2.0, 3.0], 1)


class TestSumRule:
    def test_convergent_plus_alternating(self):
        a = [2 + 1 / n for n in range(1, 1001)]
        b = [(-1) ** n for n in range(1, 1001)]
        rep = check_limsup_sum_rule(a, b, 100)
        c = rep.conditions[0]
        assert c.verdict == PASS
        assert c.details["lhs"] == pytest.approx(3.0, abs=1e-2)
        assert c.details["rhs"] == pytest.approx(3.0, abs=1e-2)

    def test_sine_winding(self):
        n = range(1, 5001)
        rep = check_limsup_sum_rule([1 / k for k in n], [math.sin(k) for k in n], 500, tol=5e-2)
        assert rep.verdict() == PASS
        # brute-force oracle: the suffix maximum of sin over the tail is within 1e-3 of 1
        assert max(math.sin(k) for k in range(4501, 5001)) > 0.999

    def test_constants(self):
        rep = check_limsup_sum_rule([3.0] * 200, [(-1) ** k for k in range(200)], 100)
        c = rep.conditions[0]
        assert c.details["lhs"] == 4.0 and c.details["rhs"] == 4.0

    def test_divergent_a_inapplicable(self):
        rep = check_limsup_sum_rule([(-1) ** k for k in range(1000)], [0.0] * 1000, 100)
        assert rep.conditions[0].verdict == INAPPLICABLE

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            check_limsup_sum_rule([1.0] * 10, [1.0] * 9, 5)


class TestApp4Function:
    grid = log_grid(1e-6, 1e6, 2001)

    def test_minimum_at_one(self):
        F = builtin("app4_F")
        vals = [(F(t), t) for t in self.grid]
        vmin, tmin = min(vals)
        assert vmin == pytest.approx(2.0, abs=1e-5)
        assert tmin == pytest.approx(1.0, rel=2e-2)
        assert F(1.0) == 2.0

    def test_continuity_at_quarter(self):
        F = builtin("app4_F")
        left = F(0.25 - 2.0**-40)
        right = estimate_right_limit(F, 0.25, dyadic(0.25, 40)).value
        assert F(0.25) == 2.5
        assert abs(left - right) < 1e-9 and abs(right - 2.5) < 1e-9

    def test_scaled_below_everywhere(self):
        F = builtin("app4_F")
        grid = log_grid(1e-6, 1e6, 200)
        vals = [F(t) for t in grid]
        # brute force over ordered pairs t <= s
        gaps = [vals[j] - 0.4 * vals[i] for i in range(len(grid)) for j in range(i, len(grid))]
        assert min(gaps) > 0


def test_declared_monotone_check():
    assert check_declared_monotone(builtin("log"), log_grid(1e-3, 1e3, 50)).verdict == PASS
    assert check_declared_monotone(builtin("app4_F"), log_grid(1e-3, 1e3, 50)).verdict == INAPPLICABLE
    liar = ModulusFunction("liar", lambda t: -t, "strictly_increasing")
    c = check_declared_monotone(liar, [1.0, 2.0])
    assert c.verdict == FAIL and c.witness == {"t": 1.0, "s": 2.0, "f_t": -1.0, "f_s": -2.0}


class TestExtrapolation:
    def test_geometric_approach(self):
        gaps = [2.0**-k for k in range(1, 41)]
        vals = [3.0 - 5.0 * g for g in gaps]
        assert extrapolate_limit(vals, gaps) == pytest.approx(3.0, abs=1e-9)

    def test_vanishing_quantity_not_positive(self):
        gaps = [2.0**-k for k in range(1, 41)]
        ok, est, c = limsup_positive(gaps, gaps)
        assert est.value > 0 and not ok

    def test_positive_limit_accepted(self):
        gaps = [1.0 / k for k in range(1, 1001)]
        ok, _, _ = limsup_positive([0.5 + g for g in gaps], gaps)
        assert ok

    def test_liminf_of_shrinking_values_not_positive(self):
        # suffix minima of a truncated decreasing sequence look constant
        gaps = [2.0**-k for k in range(1, 41)]
        ok, _, _ = liminf_positive(gaps, gaps)
        assert not ok

    def test_liminf_positive_accepted(self):
        gaps = [1.0 / k for k in range(1, 1001)]
        ok, _, _ = liminf_positive([0.5 + g for g in gaps], gaps)
        assert ok
