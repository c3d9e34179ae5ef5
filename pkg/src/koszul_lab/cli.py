"""koszul-lab: command line front end over problem files.

    koszul-lab cohomology --input p.json --module T
    koszul-lab verify --suite all --seed 42 --format json

Exit status: 0 when every requested check passes, 1 when a check fails,
2 for unusable input (bad file, unknown module, window too small).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from .bigraded import ComplexError, Window, cohomology, is_quasi_iso
from .dgmod import ModuleError, WindowError, module_cohomology, semifree_resolution, validate
from .geometry import (derived_intersection_cohomology, dual_setup, exchange_report,
                       honest_intersection_dims, tor_oracle)
from .koszul import kappa, kappa_inv
from .problem import ProblemError, module_to_json, parse
from .suites import SUITES, run_suites

COMMANDS = ("check", "cohomology", "dual", "resolve", "intersect", "verify", "hilbert")


class UsageError(Exception):
    pass


def thread_cap():
    """KOSZUL_LAB_THREADS, validated. Evaluation is sequential, so any cap is honoured."""
    raw = os.environ.get("KOSZUL_LAB_THREADS")
    if raw is None or raw == "":
        return None
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"KOSZUL_LAB_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"KOSZUL_LAB_THREADS must be a positive integer, got {raw!r}")
    return n


def _window(args, problem):
    if args.window:
        try:
            return Window.parse(args.window)
        except ValueError as exc:
            raise UsageError(f"bad --window {args.window!r}: {exc}") from None
    if problem is None:
        raise UsageError("a window is required (--window jmin:jmax or a problem file)")
    return problem.window


def _problem(args, required=True):
    if not args.input:
        if required:
            raise UsageError(f"{args.command} needs --input")
        return None
    return parse(args.input)


def _mirror(w):
    return Window(-w.j_max, -w.j_min)


def _table(t, w):
    return {"window": str(w), "table": t.records()}


# ---- commands ---------------------------------------------------------------------------


def cmd_check(args):
    p = _problem(args)
    w = _window(args, p)
    checks = []
    for name, M in p.modules().items():
        viol = validate(M, w) if M.j_lo is not None or M.j_hi is not None else []
        checks.append({"check": f"module {name} valid", "window": str(w), "pass": not viol,
                       "witnesses": viol[:5]})
    return {"kind": p.kind, "field": str(p.field), "checks": checks,
            "pass": all(c["pass"] for c in checks)}


def cmd_cohomology(args):
    p = _problem(args)
    w = _window(args, p)
    name = args.module or "T"
    t = module_cohomology(p.module(name), w)
    return {"module": name, **_table(t, w), "pass": True}


def cmd_hilbert(args):
    """Dimensions of the module itself (not its cohomology) plus the Euler characteristic."""
    p = _problem(args)
    w = _window(args, p)
    name = args.module or "T"
    M = p.module(name)
    rows, euler = [], {}
    for j in w:
        chi = 0
        for i in M.degrees(j):
            n = M.dim(i, j)
            if n:
                rows.append({"i": i, "j": j, "dim": n})
                chi += (-1) ** (i % 2) * n
        euler[str(j)] = chi
    return {"module": name, "window": str(w), "table": rows, "euler": euler, "pass": True}


def cmd_dual(args):
    p = _problem(args)
    w = _window(args, p)
    name = args.module or "T"
    M = p.module(name)
    ctx = p.context()
    if M.algebra is ctx.T:
        out, label = kappa(ctx, M), "kappa"
    elif M.algebra is ctx.R:
        out, label = kappa_inv(ctx, M), "kappa_inv"
    else:
        raise UsageError(f"dual takes a module over T or R; {name} is over {M.algebra.name}")
    t = cohomology(out, w, check=False)
    return {"module": name, "functor": label, **_table(t, w),
            "output": module_to_json(out, w), "pass": True}


def cmd_resolve(args):
    p = _problem(args)
    w = _window(args, p)
    name = args.module or "T"
    M = p.module(name)
    P, pi = semifree_resolution(M, w)
    gens = {}
    for g in P.gens:
        if g.j in w:
            key = f"({g.i},{g.j})"
            gens[key] = gens.get(key, 0) + 1
    viol = pi.violations(w)
    qi = is_quasi_iso(pi, w)
    return {"module": name, "window": str(w), "generators": gens,
            "generator count": sum(gens.values()),
            "checks": [{"check": "module map", "pass": not viol},
                       {"check": "quasi-isomorphism", "pass": qi}],
            "pass": qi and not viol}


def cmd_intersect(args):
    p = _problem(args)
    if p.kind != "setup":
        raise UsageError("intersect needs a problem file with a 'setup'")
    w = _window(args, p)
    s = p.data
    t_w = w if w.j_min >= 0 else _mirror(w) if w.j_max <= 0 else w
    r_w = _mirror(t_w)
    ctx = p.context()
    t_side = derived_intersection_cohomology(s, t_w)
    oracle = tor_oracle(s, t_w)
    r_side = cohomology(kappa(ctx, ctx.trivial("T")), r_w, check=False)
    h0 = {j: n for j, n in honest_intersection_dims(s, t_w).items() if n}
    h0_table = {b.j: n for b, n in t_side.dims.items() if b.i == 0}
    exch = exchange_report(s, r_w)
    checks = [{"check": "T side = Tor oracle", "pass": t_side == oracle},
              {"check": "H^0 = honest intersection", "pass": h0 == h0_table}]
    checks += [{"check": k, "pass": v["pass"]} for k, v in exch.items()]
    return {"T side": _table(t_side, t_w), "R side": _table(r_side, r_w),
            "dual setup": dual_setup(s).to_json(), "checks": checks,
            "pass": all(c["pass"] for c in checks)}


def cmd_verify(args):
    p = _problem(args, required=False)
    names = None
    if args.suite and args.suite != "all":
        names = [x.strip() for x in args.suite.split(",") if x.strip()]
        unknown = [x for x in names if x not in SUITES]
        if unknown:
            raise UsageError(f"unknown suite {unknown[0]!r}; available: all, {', '.join(SUITES)}")
    return run_suites(names, seed=args.seed, problem=p)


HANDLERS = {
    "check": cmd_check, "cohomology": cmd_cohomology, "dual": cmd_dual, "resolve": cmd_resolve,
    "intersect": cmd_intersect, "verify": cmd_verify, "hilbert": cmd_hilbert,
}


# ---- output ----------------------------------------------------------------------------


def _checks_of(report):
    if "suites" in report:
        return report["suites"]
    return report.get("checks", [])


def render(report, fmt):
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        if "table" in report:
            wr.writerow(["i", "j", "dim"])
            for r in report["table"]:
                wr.writerow([r["i"], r["j"], r["dim"]])
        else:
            wr.writerow(["check", "pass"])
            for c in _checks_of(report):
                wr.writerow([c["check"], "pass" if c["pass"] else "FAIL"])
        return buf.getvalue()
    return _text(report)


def _table_text(rows):
    if not rows:
        return "  (zero)\n"
    lines = [f"  {'i':>5} {'j':>5} {'dim':>5}"]
    lines += [f"  {r['i']:>5} {r['j']:>5} {r['dim']:>5}" for r in rows]
    return "\n".join(lines) + "\n"


def _text(report):
    out = []
    for key in ("module", "functor", "window"):
        if report.get(key) is not None:
            out.append(f"{key}: {report[key]}\n")
    if "table" in report:
        out.append(_table_text(report["table"]))
    if "euler" in report:
        out.append("euler: " + " ".join(f"{j}:{v}" for j, v in report["euler"].items()) + "\n")
    for side in ("T side", "R side"):
        if side in report:
            out.append(f"{side} (window {report[side]['window']}):\n")
            out.append(_table_text(report[side]["table"]))
    if "generators" in report:
        out.append("generators: " + (", ".join(f"{k} x{v}" for k, v in report["generators"].items())
                                     or "none") + "\n")
    for c in _checks_of(report):
        mark = "pass" if c["pass"] else "FAIL"
        win = f"  [{c['window']}]" if c.get("window") else ""
        out.append(f"{mark:4}  {c['check']}{win}\n")
        if not c["pass"] and c.get("witnesses"):
            out.append(f"      {json.dumps(c['witnesses'][:3], sort_keys=True)}\n")
    if "suites" in report or "checks" in report:
        out.append(("all checks pass" if report["pass"] else "some checks FAILED") + "\n")
    return "".join(out)


def build_parser():
    ap = argparse.ArgumentParser(prog="koszul-lab",
                                 description="Exact linear Koszul duality computations.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--input", "-i", help="problem file (JSON)")
    ap.add_argument("--module", "-m", help="module name (built-ins: T, S, R, k_T, k_S, k_R, "
                                           "T_dual, K1, K2, or a name from the file)")
    ap.add_argument("--window", "-w", help="internal degree window jmin:jmax")
    ap.add_argument("--format", "-f", choices=("table", "json", "csv"), default="table")
    ap.add_argument("--suite", "-s", default="all",
                    help="comma separated suite names, or all: " + ", ".join(SUITES))
    ap.add_argument("--seed", type=int, default=0)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        thread_cap()
        report = HANDLERS[args.command](args)
    except WindowError as exc:
        need = f" (required window {exc.required})" if exc.required is not None else ""
        print(f"error: {exc}{need}", file=sys.stderr)
        return 2
    except (ProblemError, UsageError, ModuleError, ComplexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(render(report, args.format))
    if not report["pass"]:
        failed = [c["check"] for c in _checks_of(report) if not c["pass"]]
        print(json.dumps({"failed": failed}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
