"""Registry of worked maps with known behaviour and the certificates they carry.

Every entry also has an expression form; the registry callables evaluate in
the same operation order as the expression, so both paths agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

from .certificates import (
    AlphaF,
    Banach,
    CompatiblePairEF,
    Contractive,
    MeirKeeler,
    Proinov,
    Ri,
    Wardowski,
)
from .maps import MapUnderTest
from .metric import MetricSpaceHandle
from .modulus import affine, builtin, constant, identity, scaled
from .verifier import CheckParams, TheoremCase

PICARD = "picard"
NO_FIXED_POINT = "contractive_no_fixed_point"
NON_CONTRACTIVE = "non_contractive"

PL_NODES = 33
PL_HORIZON = 0.5
APP4_SUPPORT = (0.0, 1.0, 100.0, 10100.0, 1010100.0)
LOG_WARDOWSKI_TAU = 0.1
CONSTRUCTED = "the (E, F) and Proinov pairings here are constructed for this registry"


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    map: MapUnderTest
    recommended_certificates: tuple
    expected_behavior: str
    starts: tuple
    expected_fixed_point: tuple | None = None
    fixed_point_tol: float = 1e-10
    notes: str = ""
    param_overrides: dict = field(default_factory=dict, compare=False)

    @property
    def expression(self) -> str | None:
        return self.map.expression

    def params(self, base: CheckParams | None = None) -> CheckParams:
        base = CheckParams() if base is None else base
        return replace(base, **self.param_overrides) if self.param_overrides else base


# -- native maps --------------------------------------------------------------


def _scalar(f: Callable[[float], float]):
    return lambda x: (f(x[0]),)


def _pl_expression(n: int = PL_NODES, horizon: float = PL_HORIZON) -> str:
    h = horizon / (n - 1)
    comps = ["1"]
    for k in range(2, n + 1):
        terms = ["x1/2"] + [f"x{j}" for j in range(2, k)] + [f"x{k}/2"]
        comps.append(f"1 + {h!r}*(" + " + ".join(terms) + ")")
    return "; ".join(comps)


def _pl_apply(n: int = PL_NODES, horizon: float = PL_HORIZON):
    h = horizon / (n - 1)

    def apply(x):
        out = [1.0]
        prefix = x[0] / 2
        for k in range(1, n):
            out.append(1 + h * (prefix + x[k] / 2))
            prefix = prefix + x[k]
        return tuple(out)

    return apply


def pl_nodes(n: int = PL_NODES, horizon: float = PL_HORIZON) -> list[float]:
    return [horizon * k / (n - 1) for k in range(n)]


def _build() -> dict[str, GalleryEntry]:
    entries: dict[str, GalleryEntry] = {}

    def add(e: GalleryEntry):
        entries[e.name] = e

    sym = MetricSpaceHandle.interval(-10, 10)
    add(GalleryEntry(
        "halving",
        MapUnderTest(sym, _scalar(lambda x: x / 2), "halving", "x1/2"),
        (Banach(0.5), Contractive(), MeirKeeler(identity()), CompatiblePairEF(affine(0.75, 0.0), identity()),
         Proinov(affine(0.75, 0.0), identity()), Wardowski(constant(0.5), builtin("log")),
         Ri(affine(0.6, 0.0))),
        PICARD, ((-5.0,), (0.3,), (7.0,)), (0.0,), 1e-11, notes=CONSTRUCTED,
    ))
    add(GalleryEntry(
        "dottie_cos",
        MapUnderTest(sym, _scalar(math.cos), "dottie_cos", "cos(x1)"),
        (Contractive(), Ri(builtin("sine_gap")), CompatiblePairEF(builtin("sine_gap"), identity()),
         Proinov(builtin("sine_gap"), identity())),
        PICARD, ((-10.0,), (0.0,), (1.0,), (1.5,), (3.0,), (10.0,)), (0.739085133215161,), 1e-10,
        notes="the sharp modulus 2 sin(t/2) is within t^3/24 of t near 0; harmonic approach sequences "
              "cannot resolve that gap, so only dyadic ones are used; " + CONSTRUCTED,
        param_overrides={"family": ("dyadic",)},
    ))
    add(GalleryEntry(
        "babylonian_sqrt2",
        MapUnderTest(MetricSpaceHandle.interval(1, 100), _scalar(lambda x: x / 2 + 1 / x), "babylonian_sqrt2",
                     "x1/2 + 1/x1"),
        (Banach(0.5), MeirKeeler(identity()), CompatiblePairEF(affine(0.75, 0.0), identity()),
         Proinov(affine(0.75, 0.0), identity())),
        PICARD, ((1.0,), (2.0,), (50.0,), (100.0,)), (math.sqrt(2),), 1e-12, notes=CONSTRUCTED,
    ))
    add(GalleryEntry(
        "x_plus_inv_x",
        MapUnderTest(MetricSpaceHandle.interval(1, math.inf, reach=100.0), _scalar(lambda x: x + 1 / x),
                     "x_plus_inv_x", "x1 + 1/x1"),
        (Contractive(),),
        NO_FIXED_POINT, ((1.0,), (2.0,), (10.0,)),
        notes="contractive on [1, inf) yet fixed-point free; orbits grow like sqrt(2n)",
    ))
    c = math.exp(-LOG_WARDOWSKI_TAU)
    tau = constant(LOG_WARDOWSKI_TAU)
    add(GalleryEntry(
        "log_wardowski",
        MapUnderTest(MetricSpaceHandle.interval(-3, 3), _scalar(lambda x: math.exp(-0.1) * math.sin(x)),
                     "log_wardowski", "exp(-0.1)*sin(x1)"),
        (Wardowski(tau, builtin("log")), Wardowski(tau, builtin("log"), "iii_prime"),
         Wardowski(tau, builtin("log"), "iii_doubleprime"), Banach(c), MeirKeeler(scaled(0.1, identity()))),
        PICARD, ((-3.0,), (-1.0,), (0.5,), (3.0,)), (0.0,), 1e-10,
    ))
    app4 = MetricSpaceHandle.interval(0, APP4_SUPPORT[-1], support=tuple((v,) for v in APP4_SUPPORT),
                                      name="app4_points")
    add(GalleryEntry(
        "app4_alpha_f_map",
        MapUnderTest(app4, _scalar(lambda x: max(0, x / 100 - 1)), "app4_alpha_f_map", "max(0, x1/100 - 1)"),
        (AlphaF(0.4, builtin("app4_F")), Banach(0.05)),
        PICARD, tuple((v,) for v in APP4_SUPPORT), (0.0,), 0.0,
        notes="F >= 2 on (0, inf) forces every pair with Tx != Ty to be at distance about 22 or more, "
              "so the map lives on a finite metric space",
        param_overrides={"anchors": (0.1, 0.25, 1.0, 4.0)},
    ))
    pl_space = MetricSpaceHandle.box(-10, 10, PL_NODES, metric_kind="sup", name="pl_grid")
    add(GalleryEntry(
        "picard_lindelof_exp",
        MapUnderTest(pl_space, _pl_apply(), "picard_lindelof_exp", _pl_expression()),
        (Banach(0.5), MeirKeeler(identity()), CompatiblePairEF(affine(0.75, 0.0), identity())),
        PICARD,
        ((0.0,) * PL_NODES, (5.0,) * PL_NODES, tuple(3.0 * (-1) ** k for k in range(PL_NODES))),
        tuple(math.exp(t) for t in pl_nodes()), 5e-4,
        notes="trapezoid discretisation of x' = x, x(0) = 1 on [0, 1/2]; the fixed point approximates e^t; "
              + CONSTRUCTED,
    ))
    add(GalleryEntry(
        "doubling",
        MapUnderTest(MetricSpaceHandle.interval(0, 1), _scalar(lambda x: 2 * x), "doubling", "2*x1"),
        (), NON_CONTRACTIVE, ((0.0,), (0.25,)),
        notes="expands distances; iterates leave [0, 1]",
    ))
    return entries


_ENTRIES = _build()


def list_entries() -> list[str]:
    return list(_ENTRIES)


def instantiate(name: str) -> GalleryEntry:
    try:
        return _ENTRIES[name]
    except KeyError:
        raise KeyError(f"unknown gallery entry {name!r}; known: {', '.join(_ENTRIES)}") from None


THEOREMS_FOR_KIND = {
    "banach": ("banach",),
    "meir_keeler": ("meir_keeler",),
    "cjmp": ("cjmp",),
    "ri": ("ri", "thm8_ri_improved"),
    "compatible_pair_ef": ("ef_main", "ef_relaxed"),
    "alpha_f": ("app4_alphaF",),
    "proinov": ("app5_proinov",),
}
WARDOWSKI_THEOREM = {"i_ii_iii": "wardowski", "iii_prime": "app2_phiF", "iii_doubleprime": "app3_iii_doubleprime"}


def cases(name: str, params: CheckParams | None = None) -> list[TheoremCase]:
    """One TheoremCase per (recommended certificate, theorem it feeds)."""
    entry = instantiate(name)
    p = entry.params(params)
    out = []
    for cert in entry.recommended_certificates:
        if cert.kind == "wardowski":
            tids = (WARDOWSKI_THEOREM[cert.condition_set],)
        else:
            tids = THEOREMS_FOR_KIND.get(cert.kind, ())
        for tid in tids:
            out.append(TheoremCase(tid, entry.map, cert, entry.starts, p, name=f"{name}:{tid}"))
    return out
