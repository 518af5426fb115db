import math

from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import scalar_map
from picardcheck import certificates as C
from picardcheck.iteration import IterationConfig, picard_iterate
from picardcheck.metric import MetricSpaceHandle, PairSampler, distance, sample_pairs
from picardcheck.modulus import (
    affine,
    dyadic,
    estimate_liminf,
    estimate_limsup,
    harmonic,
    identity,
    liminf_positive,
    limsup_positive,
)

coord = st.floats(-1e3, 1e3, allow_nan=False)
KINDS = ("euclidean", "sup", "p_metric", "weighted_sup", "discrete")


def point(dim):
    return st.tuples(*[coord] * dim)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(KINDS), st.data())
def test_metric_axioms(kind, data):
    space = MetricSpaceHandle.box(-1e3, 1e3, 3, metric_kind=kind, p=3.0,
                                  weights=(1.0, 2.0, 0.5) if kind == "weighted_sup" else None)
    x, y, z = (data.draw(point(3)) for _ in range(3))
    dxy, dyx = distance(space, x, y), distance(space, y, x)
    assert dxy >= 0 and dxy == dyx
    assert distance(space, x, x) == 0
    if x != y:
        assert dxy > 0
    scale = max(dxy, distance(space, y, z), 1.0)
    assert distance(space, x, z) <= dxy + distance(space, y, z) + 1e-12 * scale


@given(point(4), point(4))
def test_p2_matches_euclidean(x, y):
    e = distance(MetricSpaceHandle.box(-1e3, 1e3, 4), x, y)
    p = distance(MetricSpaceHandle.box(-1e3, 1e3, 4, metric_kind="p_metric", p=2.0), x, y)
    assert math.isclose(e, p, rel_tol=1e-12, abs_tol=1e-300)


@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=4, max_size=200))
def test_limsup_not_below_liminf(vals):
    tail = max(2, len(vals) // 2)
    assert estimate_limsup(vals, tail).value >= estimate_liminf(vals, tail).value


@given(st.floats(1e-6, 1e6), st.integers(5, 60))
def test_dyadic_strictly_decreasing_to_anchor(t, k):
    terms = dyadic(t, k).terms()
    assert all(s > t for s in terms)
    assert all(a > b for a, b in zip(terms, terms[1:]))


@given(st.floats(1e-6, 1e6), st.integers(5, 500))
def test_harmonic_strictly_decreasing(t, k):
    terms = harmonic(t, k).terms()
    assert all(s > t for s in terms) and all(a > b for a, b in zip(terms, terms[1:]))


@given(st.floats(0.01, 10.0), st.floats(-5.0, 5.0))
def test_limsup_positive_agrees_with_sign_of_limit(c, noise):
    gaps = [2.0**-k for k in range(1, 41)]
    vals = [c + noise * g for g in gaps]
    assert limsup_positive(vals, gaps)[0]
    assert liminf_positive(vals, gaps)[0]
    assert not limsup_positive([abs(noise) * g for g in gaps], gaps)[0]


@settings(deadline=None)
@given(st.integers(0, 2**31), st.sampled_from(("uniform", "boundary", "grid")))
def test_sampler_determinism(seed, strategy):
    space = MetricSpaceHandle.box(-2, 2, 2)
    s = PairSampler(strategy, 64, seed)
    assert sample_pairs(space, s) == sample_pairs(space, s)


@settings(deadline=None)
@given(st.floats(-10, 10), st.floats(0.05, 0.95))
def test_trace_determinism(x0, lam):
    T = scalar_map(lambda x: lam * math.sin(x), -10, 10)
    a = picard_iterate(T, (x0,), IterationConfig(max_iter=500))
    b = picard_iterate(T, (x0,), IterationConfig(max_iter=500))
    assert a.points == b.points and a.step_distances == b.step_distances


@settings(deadline=None)
@given(st.floats(0.05, 0.95))
def test_banach_implies_contractive_on_same_samples(lam):
    T = scalar_map(lambda x: lam * x, -10, 10)
    s = PairSampler("uniform", 300, 1)
    data = C.sampled_pair_data(T, s)
    if C.check_banach(T, lam * (1 + 1e-9), s, data).passed:
        assert C.check_contractive(T, s, data).passed


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 0.9), st.integers(0, 1000))
def test_meir_keeler_implies_mw(lam, seed):
    # for a lam-Lipschitz map delta(eps) = eps*(1-lam)/lam works for both conditions
    T = scalar_map(lambda x: lam * x, -10, 10)
    delta = affine((1 - lam) / lam * 0.99, 0.0)
    s = PairSampler("uniform", 200, seed)
    mk = C.check_meir_keeler(T, delta, (0.1, 1.0), s, 8)
    if mk.passed:
        assert C.check_mw_condition(T, delta, (0.1, 1.0), s, 8).passed


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 0.95))
def test_scaled_identity_compatible(lam):
    E, F = affine(lam, 0.0), identity()
    grid = [10.0**k for k in range(-3, 4)]
    assert C.check_C1(E, F, grid).passed
    assert C.check_C2(E, F, (0.1, 1.0, 5.0)).passed
