import math

import pytest

from picardcheck import certificates as C
from picardcheck.expr import parse_map_expression
from picardcheck.gallery import (
    NO_FIXED_POINT,
    PICARD,
    cases,
    instantiate,
    list_entries,
    pl_nodes,
)
from picardcheck.iteration import CONVERGED, estimate_rate, picard_iterate
from picardcheck.metric import PairSampler, sample_pairs
from picardcheck.modulus import builtin
from picardcheck.verifier import VERIFIED, verify_counterexample, verify_picard

REQUIRED = ("halving", "dottie_cos", "babylonian_sqrt2", "x_plus_inv_x", "log_wardowski", "app4_alpha_f_map",
            "picard_lindelof_exp")
PICARD_ENTRIES = [n for n in list_entries() if instantiate(n).expected_behavior == PICARD]


def test_registry_contents():
    names = list_entries()
    for n in REQUIRED:
        assert n in names
    assert instantiate("x_plus_inv_x").expected_behavior == NO_FIXED_POINT


def test_unknown_entry():
    with pytest.raises(KeyError, match="halving"):
        instantiate("no_such_map")


@pytest.mark.parametrize("name", PICARD_ENTRIES)
def test_picard_entries_verified(name):
    for case in cases(name):
        rep = verify_picard(case)
        assert rep.overall == VERIFIED, rep.to_text()


@pytest.mark.parametrize("name", PICARD_ENTRIES)
def test_reaches_expected_fixed_point_from_every_start(name):
    e = instantiate(name)
    for x0 in e.starts:
        tr = picard_iterate(e.map, x0)
        assert tr.verdict == CONVERGED
        err = max(abs(a - b) for a, b in zip(tr.limit, e.expected_fixed_point))
        assert err <= e.fixed_point_tol


def test_counterexample_entry():
    e = instantiate("x_plus_inv_x")
    assert verify_counterexample(e.map, e.starts).overall == VERIFIED


@pytest.mark.parametrize("name", list_entries())
def test_expression_round_trip_bit_identical(name):
    e = instantiate(name)
    parsed = parse_map_expression(e.expression, e.map.space)
    pts = {p for pair in sample_pairs(e.map.space, PairSampler("uniform", 200, 7)) for p in pair}
    pts |= set(e.starts)
    for x in sorted(pts):
        assert parsed(x) == e.map(x)


def test_babylonian_lambda_hat():
    e = instantiate("babylonian_sqrt2")
    lam = C.estimate_banach_lambda(e.map, PairSampler("uniform", 10_000, 0))
    # |1/2 - 1/(xy)| < 1/2 on [1, 100]
    assert lam <= 0.5 + 1e-12


def test_app4_map_pairs_by_hand():
    e = instantiate("app4_alpha_f_map")
    F = builtin("app4_F")
    pts = [p[0] for p in e.starts]
    checked = 0
    for i, x in enumerate(pts):
        for y in pts[i + 1:]:
            tx, ty = e.map((x,))[0], e.map((y,))[0]
            if tx == ty:
                continue
            checked += 1
            assert F(abs(tx - ty)) <= 0.4 * F(abs(x - y))
    # 0, 1 and 100 share the image 0; the other 7 of the 10 pairs are genuine
    assert checked == 7


def test_picard_lindelof_against_exponential():
    e = instantiate("picard_lindelof_exp")
    tr = picard_iterate(e.map, e.starts[0])
    exact = [math.exp(t) for t in pl_nodes()]
    assert tr.verdict == CONVERGED and tr.iterations_used <= 60
    assert max(abs(a - b) for a, b in zip(tr.limit, exact)) < 5e-4
    assert estimate_rate(tr) <= 0.55


def test_constructed_pairings_are_labelled():
    for name in list_entries():
        e = instantiate(name)
        if any(c.kind in ("compatible_pair_ef", "proinov") for c in e.recommended_certificates):
            assert "constructed" in e.notes
