"""Command-line front-end.

Exit status: 0 verified or pass, 1 inconclusive, 2 premise failure,
3 conclusion failure, 64 usage or input error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
from dataclasses import fields, replace

from . import certificates as C
from . import gallery
from .config import (
    COMMANDS,
    CONVERTERS,
    OUT_ENV,
    ConfigError,
    ExperimentConfig,
    build_config,
    load_config,
)
from .expr import ExpressionError, parse_map_expression, parse_modulus
from .iteration import IterationConfig, picard_iterate, trace_to_csv
from .maps import MapUnderTest
from .metric import MetricSpaceHandle, PairSampler
from .modulus import log_grid
from .report import FAIL, INAPPLICABLE, CheckReport
from .verifier import (
    CONCLUSION_FAILED,
    EXPECTED_KIND,
    INCONCLUSIVE,
    PREMISE_FAILED,
    VERIFIED,
    CheckParams,
    TheoremCase,
    VerificationReport,
    classify,
    run_gallery_suite,
    summary_csv,
    verify_counterexample,
    verify_picard,
)

EXIT_OK, EXIT_INCONCLUSIVE, EXIT_PREMISE, EXIT_CONCLUSION, EXIT_USAGE = 0, 1, 2, 3, 64

HELP = {
    "gallery": "gallery entry name", "expr": "map expression over x1..xk, components separated by ';'",
    "name": "label used in output file names", "dim": "dimension of an expression target",
    "lower": "lower bound of every coordinate", "upper": "upper bound of every coordinate (inf allowed)",
    "metric": "metric kind", "p": "exponent for p_metric", "reach": "sampling reach on an unbounded side",
    "cert": "certificate kind", "theorem": "theorem id to verify", "mode": "verify as picard or counterexample",
    "lam": "Banach constant", "alpha": "alpha for alpha_f", "phi": "phi modulus", "E": "E modulus",
    "F": "F modulus", "delta": "delta modulus for meir_keeler / cjmp",
    "condition_set": "Wardowski condition set", "x0": "starting point, coordinates separated by ','",
    "starts": "starting points separated by ';'", "max_iter": "iteration budget",
    "residual_tol": "convergence tolerance", "cauchy_window": "tail window for Cauchy detection",
    "cauchy_tol": "Cauchy tolerance", "divergence_bound": "divergence bound on |x|",
    "strategy": "pair sampling strategy", "count": "number of sampled pairs", "seed": "sampler seed",
    "seeds": "seeds for sweep, comma separated", "grid": "log grid lo,hi,n for pointwise checks",
    "anchors": "anchors for limit checks, comma separated", "family": "sequence families, comma separated",
    "eps": "eps grid for band checks, comma separated", "out": f"output directory (env {OUT_ENV})",
}
FLAG_ALIASES = {"lam": ["--lambda", "--lam"], "mode": ["--as", "--mode"], "E": ["--E"], "F": ["--F"]}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _fmt_default(v) -> str:
    if isinstance(v, tuple):
        if v and isinstance(v[0], tuple):
            return ";".join(",".join(repr(c) for c in p) for p in v)
        return ",".join(str(c) for c in v)
    return str(v)


def build_parser() -> argparse.ArgumentParser:
    defaults = ExperimentConfig(out=f"${OUT_ENV} or picardcheck-out")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="INI-style experiment file; flags override it")
    for f in fields(ExperimentConfig):
        if f.name == "command":
            continue
        flags = FLAG_ALIASES.get(f.name, ["--" + f.name.replace("_", "-")])
        common.add_argument(*flags, dest=f.name, type=CONVERTERS[f.name], default=argparse.SUPPRESS,
                            help=f"{HELP[f.name]} (default: {_fmt_default(getattr(defaults, f.name))})")
    parser = _Parser(prog="picardcheck", description="Picard iteration and contraction-certificate checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    blurbs = {
        "iterate": "run Picard iteration and write a trace CSV",
        "certify": "check one certificate against a map",
        "verify": "verify a theorem case (or a counterexample) end to end",
        "classify": "run every checker against a map",
        "sweep": "repeat verification over several seeds",
        "gallery-run": "verify every gallery case and write a summary CSV",
    }
    for cmd in COMMANDS:
        sub.add_parser(cmd, parents=[common], help=blurbs[cmd], description=blurbs[cmd])
    return parser


def parse_args(argv: list[str] | None = None) -> ExperimentConfig:
    ns = vars(build_parser().parse_args(argv))
    values: dict[str, object] = {}
    if "config" in ns:
        values.update(load_config(ns.pop("config")))
    values.update(ns)
    return build_config(values)


# -- building blocks from a config -----------------------------------------


def _map_from(cfg: ExperimentConfig) -> MapUnderTest:
    if cfg.gallery:
        return gallery.instantiate(cfg.gallery).map
    upper = cfg.upper
    kw = {"metric_kind": cfg.metric, "p": cfg.p, "reach": cfg.reach}
    if cfg.metric == "weighted_sup":
        kw["weights"] = (1.0,) * cfg.dim
    space = MetricSpaceHandle.box(cfg.lower, upper, cfg.dim, **kw)
    return parse_map_expression(cfg.expr, space, cfg.name or None)


def _label(cfg: ExperimentConfig) -> str:
    if cfg.name:
        return cfg.name
    if cfg.gallery:
        return cfg.gallery
    return "expr"


def _params(cfg: ExperimentConfig, seed: int | None = None) -> CheckParams:
    lo, hi, n = cfg.grid
    return CheckParams(
        sampler=PairSampler(cfg.strategy, cfg.count, cfg.seed if seed is None else seed),
        eps_grid=tuple(cfg.eps),
        grid=tuple(log_grid(lo, hi, n)),
        anchors=tuple(cfg.anchors),
        family=tuple(cfg.family),
        iteration=_iteration(cfg),
    )


def _iteration(cfg: ExperimentConfig) -> IterationConfig:
    return IterationConfig(cfg.max_iter, cfg.residual_tol, cfg.cauchy_window, cfg.cauchy_tol, cfg.divergence_bound)


def _explicit(cfg: ExperimentConfig, name: str) -> bool:
    return getattr(cfg, name) is not None


def _gallery_cert(cfg: ExperimentConfig, kind: str):
    if not cfg.gallery:
        return None
    for cert in gallery.instantiate(cfg.gallery).recommended_certificates:
        if cert.kind == kind and (kind != "wardowski" or cert.condition_set == cfg.condition_set):
            return cert
    return None


def _modulus(cfg, key, fallback):
    text = getattr(cfg, key)
    if text is not None:
        return parse_modulus(text)
    if fallback is not None:
        return fallback
    raise UsageError(f"certificate needs {key}=<modulus>")


def _certificate(cfg: ExperimentConfig, kind: str):
    base = _gallery_cert(cfg, kind)
    g = lambda attr: getattr(base, attr, None)  # noqa: E731
    if kind == "banach":
        lam = cfg.lam if cfg.lam is not None else g("lam")
        if lam is None:
            raise UsageError("banach needs lambda")
        return C.Banach(lam)
    if kind == "contractive":
        return C.Contractive()
    if kind == "meir_keeler":
        return C.MeirKeeler(_modulus(cfg, "delta", g("delta")))
    if kind == "cjmp":
        delta = parse_modulus(cfg.delta) if cfg.delta else None
        return C.CJMP(delta) if delta else None
    if kind == "wardowski":
        return C.Wardowski(_modulus(cfg, "phi", g("phi")), _modulus(cfg, "F", g("F")), cfg.condition_set)
    if kind == "ri":
        return C.Ri(_modulus(cfg, "phi", g("phi")))
    if kind == "compatible_pair_ef":
        return C.CompatiblePairEF(_modulus(cfg, "E", g("E")), _modulus(cfg, "F", g("F")))
    if kind == "alpha_f":
        alpha = cfg.alpha if cfg.alpha is not None else g("alpha")
        if alpha is None:
            raise UsageError("alpha_f needs alpha")
        return C.AlphaF(alpha, _modulus(cfg, "F", g("F")))
    if kind == "proinov":
        return C.Proinov(_modulus(cfg, "E", g("E")), _modulus(cfg, "F", g("F")))
    raise UsageError(f"unknown certificate kind {kind!r}")


def _merge(kind: str, reports, sampler) -> CheckReport:
    conds = tuple(c for r in reports for c in r.conditions)
    notes = tuple(n for r in reports for n in r.notes)
    size = max((r.sample_size for r in reports), default=0)
    return CheckReport(kind, conds, size, sampler.seed, notes)


def certify(T: MapUnderTest, cert, kind: str, p: CheckParams) -> CheckReport:
    s = p.sampler
    data = C.sampled_pair_data(T, s)
    if kind == "banach":
        return C.check_banach(T, cert.lam, s, data)
    if kind == "contractive":
        return C.check_contractive(T, s, data)
    if kind == "meir_keeler":
        return C.check_meir_keeler(T, cert.delta, p.eps_grid, s, p.band_count)
    if kind == "cjmp":
        contr = C.check_contractive(T, s, data)
        if cert is not None:
            return _merge("cjmp", [contr, C.check_mw_condition(T, cert.delta, p.eps_grid, s, p.band_count)], s)
        from .verifier import _derivation_report
        search = C.search_mw_modulus(T, p.eps_grid, s, band_count=p.band_count)
        deriv = C.CJMPDerivation(C.CJMP(search.delta, tuple(sorted(search.table.items()))) if search.found
                                 else None, search, None if search.found else "band search failed")
        return _merge("cjmp", [contr, _derivation_report(deriv)], s)
    if kind == "wardowski":
        return _merge("wardowski", [C.check_wardowski(T, cert.phi, cert.F, s, data),
                                    C.check_wardowski_side_conditions(cert.phi, cert.F, cert.condition_set, p.grid,
                                                                      p.family, anchors=p.anchors)], s)
    if kind == "ri":
        return _merge("ri", [C.check_ri(cert.phi, p.grid, p.family, anchors=p.anchors),
                             C.check_modulus_bound(T, cert.phi, s, data)], s)
    if kind == "compatible_pair_ef":
        return _merge("compatible_pair_ef", [C.check_C1(cert.E, cert.F, p.grid),
                                             C.check_C2(cert.E, cert.F, p.anchors, p.family),
                                             C.check_ef_contraction(T, cert.E, cert.F, s, data)], s)
    if kind == "alpha_f":
        return C.check_alpha_f(T, cert.alpha, cert.F, s, p.grid, p.anchors, data)
    if kind == "proinov":
        return _merge("proinov", [C.check_proinov(cert.E, cert.F, p.grid, p.anchors, p.family),
                                  C.check_ef_contraction(T, cert.E, cert.F, s, data)], s)
    raise UsageError(f"unknown certificate kind {kind!r}")


def _write(path: str, text: str) -> None:
    """Atomic write: a temp file in the same directory, then rename."""
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _status(overall: str) -> int:
    return {VERIFIED: EXIT_OK, PREMISE_FAILED: EXIT_PREMISE, CONCLUSION_FAILED: EXIT_CONCLUSION,
            INCONCLUSIVE: EXIT_INCONCLUSIVE}[overall]


def _worst(statuses) -> int:
    order = [EXIT_OK, EXIT_INCONCLUSIVE, EXIT_CONCLUSION, EXIT_PREMISE]
    return max(statuses, key=order.index, default=EXIT_OK)


def _cases(cfg: ExperimentConfig, p: CheckParams) -> list[TheoremCase]:
    T = _map_from(cfg)
    starts = cfg.starts
    if cfg.theorem:
        kind = EXPECTED_KIND[cfg.theorem]
        if cfg.theorem in ("wardowski", "app2_phiF", "app3_iii_doubleprime"):
            cfg = replace(cfg, condition_set={"wardowski": "i_ii_iii", "app2_phiF": "iii_prime",
                                              "app3_iii_doubleprime": "iii_doubleprime"}[cfg.theorem])
        cert = _certificate(cfg, kind)
        if cert is None:
            raise UsageError(f"theorem {cfg.theorem} needs a delta modulus")
        if starts is None:
            if not cfg.gallery:
                raise UsageError("verify needs starts for an expression target")
            starts = gallery.instantiate(cfg.gallery).starts
        if cfg.gallery:
            p = gallery.instantiate(cfg.gallery).params(p)
        return [TheoremCase(cfg.theorem, T, cert, tuple(starts), p, name=f"{_label(cfg)}:{cfg.theorem}")]
    if not cfg.gallery:
        raise UsageError("verify on an expression target needs theorem=<id> or --as counterexample")
    out = gallery.cases(cfg.gallery, p)
    if starts is not None:
        out = [replace(c, starts=tuple(starts)) for c in out]
    return out


def _verify_reports(cfg: ExperimentConfig, p: CheckParams) -> list[VerificationReport]:
    counter = cfg.mode == "counterexample" or (
        cfg.gallery and cfg.theorem is None and
        gallery.instantiate(cfg.gallery).expected_behavior == gallery.NO_FIXED_POINT)
    if counter:
        T = _map_from(cfg)
        starts = cfg.starts or (gallery.instantiate(cfg.gallery).starts if cfg.gallery else None)
        if starts is None:
            raise UsageError("counterexample verification needs starts")
        sampler = p.sampler if cfg.count != ExperimentConfig.count else replace(p.sampler, count=10_000)
        return [verify_counterexample(T, starts, p.iteration, sampler, name=f"{_label(cfg)}:counterexample")]
    return [verify_picard(c) for c in _cases(cfg, p)]


def run(cfg: ExperimentConfig) -> int:
    """Execute one experiment; returns the exit status and writes output files."""
    out, label = cfg.out, _label(cfg)
    p = _params(cfg)
    if cfg.command == "iterate":
        T = _map_from(cfg)
        starts = cfg.x0 or (gallery.instantiate(cfg.gallery).starts[:1] if cfg.gallery else None)
        status = EXIT_OK
        for k, x0 in enumerate(starts):
            if len(x0) != T.space.dimension:
                raise UsageError(f"x0 has {len(x0)} coordinates, the space has {T.space.dimension}")
            tr = picard_iterate(T, x0, p.iteration)
            suffix = "" if len(starts) == 1 else f"_{k}"
            path = os.path.join(out, f"{label}_trace{suffix}.csv")
            _write(path, trace_to_csv(tr, T))
            final = tr.limit if tr.limit is not None else tr.points[-1]
            print(f"{label} x0={','.join(repr(c) for c in x0)} verdict={tr.verdict} "
                  f"iterations={tr.iterations_used} final={','.join(repr(c) for c in final)}")
            print(f"wrote {path}")
            if not tr.converged:
                status = EXIT_CONCLUSION
        return status
    if cfg.command == "certify":
        T = _map_from(cfg)
        if cfg.gallery:
            p = gallery.instantiate(cfg.gallery).params(p)
        cert = _certificate(cfg, cfg.cert)
        rep = certify(T, cert, cfg.cert, p)
        text = rep.to_text() + "\n"
        path = os.path.join(out, f"{label}_{cfg.cert}_report.txt")
        _write(path, text)
        print(text, end="")
        print(f"wrote {path}")
        v = rep.verdict()
        return EXIT_PREMISE if v == FAIL else EXIT_INCONCLUSIVE if v == INAPPLICABLE else EXIT_OK
    if cfg.command == "verify":
        reports = _verify_reports(cfg, p)
        text = "\n".join(r.to_text() for r in reports)
        _write(os.path.join(out, f"{label}_verify.txt"), text)
        _write(os.path.join(out, f"{label}_verify_summary.csv"), summary_csv(reports))
        print(text, end="")
        return _worst(_status(r.overall) for r in reports)
    if cfg.command == "classify":
        T = _map_from(cfg)
        rows = classify(T, p)
        lines = ["kind,verdict,detail"]
        for kind, verdict, info in rows:
            detail = ";".join(f"{k}={v!r}" for k, v in sorted(info.items()) if k != "witness")
            lines.append(f"{kind},{verdict},\"{detail}\"")
            print(f"{kind:20s} {verdict:22s} {detail}")
        _write(os.path.join(out, f"{label}_classify.csv"), "\n".join(lines) + "\n")
        return EXIT_OK
    if cfg.command == "sweep":
        rows = ["seed,case,theorem,overall,worst_margin"]
        statuses = []
        for seed in cfg.seeds:
            for r in _verify_reports(cfg, _params(cfg, seed)):
                m = r.worst_margin()
                overall = r.overall if r.failed_premise is None else f"{r.overall}({r.failed_premise})"
                rows.append(f"{seed},{r.case_name},{r.theorem_id},{overall},{'' if m is None else repr(m)}")
                statuses.append(_status(r.overall))
        text = "\n".join(rows) + "\n"
        _write(os.path.join(out, f"{label}_sweep.csv"), text)
        print(text, end="")
        return _worst(statuses)
    if cfg.command == "gallery-run":
        reports = run_gallery_suite(p)
        _write(os.path.join(out, "gallery_reports.txt"), "\n".join(r.to_text() for r in reports))
        summary = summary_csv(reports)
        _write(os.path.join(out, "gallery_summary.csv"), summary)
        print(summary, end="")
        return _worst(_status(r.overall) for r in reports)
    raise UsageError(f"unknown command {cfg.command!r}")


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_args(argv)
        return run(cfg)
    except (ConfigError, ExpressionError, UsageError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"picardcheck: error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"picardcheck: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
