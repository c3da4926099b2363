"""Command-line front end.

Exit codes: 0 all checks pass, 1 violations found, 2 configuration error,
3 runtime evaluation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import admiss, apps, domains, fncat, janowski, means, subord, thresholds, verify
from .errors import ConfigError, EvaluationError, ParameterError, SubordkitError
from .report import csv_text, dumps, write_json, write_text

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _complex(text):
    try:
        return complex(str(text).replace(" ", ""))
    except ValueError:
        raise UsageError(f"not a number: {text!r}")


def _number(text):
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a number: {text!r}")


def _load_json(text_or_path):
    """Inline JSON, or a path to a JSON file."""
    if text_or_path is None:
        return None
    p = Path(text_or_path)
    try:
        if p.exists():
            return json.loads(p.read_text(encoding="utf-8"))
        return json.loads(text_or_path)
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON in {text_or_path!r}: {exc}")


def _emit(args, name, payload):
    if args.out:
        write_json(Path(args.out) / f"{name}.json", payload)
    else:
        sys.stdout.write(dumps(payload))


# --------------------------------------------------------------------------
# subcommands


def cmd_means_eval(args):
    x, y = _complex(args.x), _complex(args.y)
    fn = {"arithmetic": means.arith_mean, "geometric": means.geo_mean,
          "harmonic": means.harm_mean}[args.mean]
    val = complex(fn(args.t, x, y))
    _emit(args, "means-eval", {"mean": args.mean, "t": args.t, "x": x, "y": y,
                               "value": val.real if val.imag == 0 else val})
    return EXIT_OK


def _pair(args):
    theta = fncat.from_json(_load_json(args.theta)) if args.theta else fncat.constant(1.0)
    phi = fncat.from_json(_load_json(args.phi)) if args.phi else fncat.constant(1.0)
    return means.ThetaPhiPair(theta, phi)


def _domain(spec):
    cfg = _load_json(spec) if spec.lstrip().startswith("{") else spec
    try:
        return domains.from_config(cfg)
    except KeyError as exc:
        raise UsageError(f"unknown domain {exc}")


def cmd_subcheck(args):
    pair = _pair(args)
    dom = _domain(args.domain)
    radii = tuple(_number(r) for r in args.radii.split(",")) if args.radii else subord.DEFAULT_RADII
    cfg = subord.SamplerConfig(seed=args.seed, radii=radii, n=args.n)
    out = {}
    if args.hypo:
        hyp = subord.hypo_check(pair, dom, fncat.DiskGrid(radii, args.n), 1024)
        out["hypo_check"] = hyp.to_json()
        if not hyp.holds:
            out.update(premise_rate=0.0, violations=[], grids={"radii": radii, "n": args.n},
                       note="condition on (Θ, Φ, h) fails; search skipped")
            _emit(args, "subcheck", out)
            return EXIT_VIOLATION
    rep = subord.falsify_lemma(pair, args.t, dom, cfg, budget=args.budget, threads=args.threads)
    out.update(rep.to_json())
    _emit(args, "subcheck", out)
    return EXIT_VIOLATION if rep.violations else EXIT_OK


def cmd_admissibility(args):
    theta = admiss.default_theta_grid(args.case, args.theta_n)
    m_grid = admiss.default_m_grid(args.m_max, args.m_step)
    targets = [domains.make_domain(o) for o in args.omega] if args.omega else None
    reports = admiss.admissibility_scan(args.case, targets, theta, m_grid)
    payload = {"case": args.case, "theta_n": args.theta_n, "m_max": args.m_max,
               "m_step": args.m_step, "reports": [r.to_json() for r in reports],
               "g_consistency": admiss.g_consistency(args.case, theta, m_grid)}
    _emit(args, "admissibility", payload)
    if args.out and args.csv:
        for r in reports:
            write_text(Path(args.out) / f"admissibility-{args.case}-{r.omega}.csv", r.to_csv())
    return EXIT_OK if all(r.clean for r in reports) else EXIT_VIOLATION


def _quad(args):
    return janowski.JanowskiQuad(args.A, args.B, args.D, args.E)


def cmd_janowski(args):
    if args.action == "check":
        quad = _quad(args)
        rep = janowski.check_conditions(quad, tuple(range(1, args.k_max + 1)), args.i_form)
        fb = janowski.final_bound(quad)
        payload = {"conditions": rep.to_json(), "final_bound": fb.to_json()}
        if args.contact:
            payload["contact_ratio"] = janowski.contact_ratio_min(quad)
        _emit(args, "janowski-check", payload)
        return EXIT_OK if rep.all_hold and fb.holds else EXIT_VIOLATION
    grid = None
    if args.grid:
        g = _load_json(args.grid)
        grid = dict(janowski.DEFAULT_GRID)
        for k, v in g.items():
            if k not in grid:
                raise UsageError(f"unknown grid axis {k!r}")
            grid[k] = (janowski.rational_range(*v["range"]) if isinstance(v, dict)
                       else [Fraction(str(x)) for x in v])
    res = janowski.feasibility_scan(grid, tuple(range(1, args.k_max + 1)), args.i_form)
    _emit(args, "janowski-scan", res)
    return EXIT_OK


def cmd_threshold(args):
    params = thresholds.ThresholdParams(args.alpha, args.rho, args.gamma, args.mu, args.delta)
    which = "thm29" if args.theorem == "29" else "thm210"
    out = {"params": {"alpha": args.alpha, "rho": args.rho, "gamma": args.gamma,
                      "delta": args.delta, "mu": args.mu}, "theorem": args.theorem,
           "threshold_sup": thresholds.threshold_sup(params, which)}
    if args.x is not None and args.my is not None:
        pt = thresholds.BoundaryPoint(args.x, args.my)
        flags = thresholds.case_flags(args.alpha, args.rho, pt)
        fn = thresholds.beta0 if which == "thm29" else thresholds.beta1
        beta, label = fn(args.alpha, args.rho, flags, True)
        out["point"] = {"x": args.x, "my": args.my, "flags": flags.label, "branch": label,
                        "beta": beta,
                        "combined": thresholds.combined_threshold(params, which, pt)}
    code = EXIT_OK
    if args.oracle:
        r = thresholds.regional_oracle(args.alpha, args.rho, "E0" if which == "thm29" else "E1",
                                       args.nx, args.nmy)
        out["oracle"] = r.to_json()
        code = EXIT_OK if r.passed else EXIT_VIOLATION
    _emit(args, "threshold", out)
    return code


def cmd_apply(args):
    f = fncat.from_json(_load_json(args.f))
    p = _load_json(args.params) or {}
    params = thresholds.ThresholdParams(*(_number(str(p.get(k, d))) for k, d in
                                          (("alpha", 0), ("rho", 0), ("gamma", 0),
                                           ("mu", 0), ("delta", 1))))
    res = apps.corollary_check(args.corollary, f, params)
    _emit(args, "apply", res)
    if res["verdict"] == "undefined":
        print(f"subordkit: runtime error: {res['error']}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_VIOLATION if res.get("implication_violated") else EXIT_OK


def cmd_verify(args):
    cfg = _load_json(args.config) or {}
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.criteria:
        cfg["criteria"] = [int(c) for c in args.criteria.split(",")]
    try:
        merged = verify.merge_config(cfg)
    except KeyError as exc:
        raise UsageError(str(exc))
    out = args.out or merged["out"]
    rep = verify.run_suite(merged)
    write_json(Path(out) / "verify-paper.json", rep)
    for k, ok in rep.criteria().items():
        print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {verify.CRITERIA[k]}")
    return EXIT_OK if rep.passed else EXIT_VIOLATION


def cmd_export(args):
    if args.what == "boundary":
        dom = _domain(args.domain)
        dom = domains.make_domain(dom.name, args.resolution, **dom.params)
        poly = dom.boundary
        if args.format == "csv":
            rows = [(t, w.real, w.imag) for t, w in zip(poly.theta, poly.points)]
            text = csv_text(["theta", "re", "im"], rows)
        else:
            text = dumps({"domain": dom.label, "theta": poly.theta, "re": poly.points.real,
                          "im": poly.points.imag})
        name = f"boundary-{dom.name}.{args.format}"
    elif args.what == "admissibility":
        reports = admiss.admissibility_scan(args.case)
        if args.format == "csv":
            text = "".join(r.to_csv() if i == 0 else r.to_csv().split("\n", 1)[1]
                           for i, r in enumerate(reports))
        else:
            text = dumps({"case": args.case, "reports": [r.to_json() for r in reports]})
        name = f"admissibility-{args.case}.{args.format}"
    else:
        res = janowski.feasibility_scan()
        if args.format == "csv":
            text = csv_text(["A", "B", "D", "E"], [tuple(janowski.fmt(x) for x in
                                                         (q.A, q.B, q.D, q.E))
                                                   for q in res["feasible"]])
        else:
            text = dumps(res)
        name = f"feasibility.{args.format}"
    if args.out:
        write_text(Path(args.out) / name, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def build_parser():
    p = _Parser(prog="subordkit", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--out", help="output directory (default: JSON to stdout)")

    s = sub.add_parser("means-eval", help="evaluate a weighted mean of two numbers")
    s.add_argument("--t", type=_number, required=True, help="weight in [0, 1]")
    s.add_argument("--x", required=True, help="complex number, e.g. 1+2j")
    s.add_argument("--y", required=True)
    s.add_argument("--mean", choices=("arithmetic", "geometric", "harmonic"), default="harmonic")
    common(s)
    s.set_defaults(func=cmd_means_eval)

    s = sub.add_parser("subcheck", help="falsification search for the harmonic-mean lemma")
    s.add_argument("--t", type=_number, default=0.5)
    s.add_argument("--theta", help="Θ as expression JSON (inline or file); default 1")
    s.add_argument("--phi", help="Φ as expression JSON (inline or file); default 1")
    s.add_argument("--domain", default="halfplane",
                   help='catalog id or JSON such as {"id": "janowski", "A": 0.5, "B": -0.5}')
    s.add_argument("--budget", type=int, default=10_000, help="premise-holding samples")
    s.add_argument("--seed", type=lambda v: int(v, 0), default=subord.DEFAULT_SEED)
    s.add_argument("--radii", help="comma-separated radii in (0, 1)")
    s.add_argument("--n", type=int, default=subord.DEFAULT_N, help="points per circle")
    s.add_argument("--threads", type=int, help="worker threads (env SUBORDKIT_THREADS)")
    s.add_argument("--hypo", action="store_true", help="run hypo_check first")
    common(s)
    s.set_defaults(func=cmd_subcheck)

    s = sub.add_parser("admissibility", help="scan Re ψ on the boundary data against Ω")
    s.add_argument("--case", choices=admiss.CASES, required=True)
    s.add_argument("--omega", action="append", help="target id (repeatable)")
    s.add_argument("--theta-n", type=int, default=admiss.DEFAULT_THETA_N)
    s.add_argument("--m-max", type=float, default=20.0)
    s.add_argument("--m-step", type=float, default=0.25)
    s.add_argument("--csv", action="store_true", help="also dump per-Ω CSV point files")
    common(s)
    s.set_defaults(func=cmd_admissibility)

    s = sub.add_parser("janowski", help="Janowski inequality system")
    s.add_argument("action", choices=("check", "scan"))
    for name, default in (("A", "3/8"), ("B", "0"), ("D", "1"), ("E", "123/128")):
        s.add_argument(f"--{name}", default=default, help="rational 'p/q' or decimal")
    s.add_argument("--k-max", type=int, default=100)
    s.add_argument("--i-form", choices=janowski.I_FORMS, default="derived")
    s.add_argument("--contact", action="store_true", help="also report the contact-ratio min")
    s.add_argument("--grid", help='scan grid JSON: {"E": {"range": ["-1", "1", "1/16"]}, "D": ["1"], ...}')
    common(s)
    s.set_defaults(func=cmd_janowski)

    s = sub.add_parser("threshold", help="threshold formulas and regional oracle")
    s.add_argument("--alpha", type=_number, required=True)
    s.add_argument("--rho", type=_number, required=True)
    s.add_argument("--gamma", type=_number, default=0.0)
    s.add_argument("--delta", type=_number, default=1.0)
    s.add_argument("--mu", type=_number, default=0.0)
    s.add_argument("--theorem", choices=("29", "210"), default="210")
    s.add_argument("--x", type=_number, help="contact data x > 0")
    s.add_argument("--my", type=_number, help="contact data my")
    s.add_argument("--oracle", action="store_true")
    s.add_argument("--nx", type=int, default=thresholds.DEFAULT_NX)
    s.add_argument("--nmy", type=int, default=thresholds.DEFAULT_NMY)
    common(s)
    s.set_defaults(func=cmd_threshold)

    s = sub.add_parser("apply", help="corollary verifier on a given f")
    s.add_argument("--corollary", choices=("starlike36", "univalent38", "fz39"), required=True)
    s.add_argument("--f", required=True, help="f as expression JSON (inline or file)")
    s.add_argument("--params", help='JSON {"alpha", "rho", "gamma", "delta", "mu"}')
    common(s)
    s.set_defaults(func=cmd_apply)

    s = sub.add_parser("verify-paper", help="run the full acceptance suite")
    s.add_argument("--config", help="JSON {suite, grids, tolerances, seed, out}")
    s.add_argument("--seed", type=lambda v: int(v, 0))
    s.add_argument("--criteria", help="comma-separated subset, e.g. 1,2,4")
    common(s)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("export", help="export boundary polylines or scan results")
    s.add_argument("what", choices=("boundary", "admissibility", "feasibility"))
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--domain", default="sigmoid")
    s.add_argument("--resolution", type=int, default=domains.DEFAULT_RESOLUTION)
    s.add_argument("--case", choices=admiss.CASES, default="sqrt")
    common(s)
    s.set_defaults(func=cmd_export)
    return p


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except EvaluationError as exc:
        print(f"subordkit: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (UsageError, ConfigError, ParameterError, KeyError, ValueError) as exc:
        # plain ValueError comes from rejected numeric inputs (weights, sizes, literals)
        print(f"subordkit: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SubordkitError, ArithmeticError) as exc:
        print(f"subordkit: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main():
    sys.exit(run())
