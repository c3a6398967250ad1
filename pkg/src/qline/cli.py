"""Command-line front end: ``qline eval|verify|dispersion|oscillator|distance|rep``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from typing import Dict, List, Optional

import numpy as np

from .exactnum import parse_cplx, parse_rat
from .params import Params

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def fmt(v: float) -> str:
    return f"{v:.12e}"


def pi_label(k: float) -> str:
    """``pi/2``-style label when ``k`` is a simple multiple of pi."""
    r = Fraction(k / math.pi).limit_denominator(12)
    if abs(float(r) * math.pi - k) > 1e-12:
        return f"{k:.6f}"
    if r == 0:
        return "0"
    num = "π" if abs(r.numerator) == 1 else f"{abs(r.numerator)}π"
    sign = "-" if r < 0 else ""
    return sign + (num if r.denominator == 1 else f"{num}/{r.denominator}")


# -----------------------------------------------------------------------------
# config
# -----------------------------------------------------------------------------

def parse_window(text: str):
    lo, sep, hi = text.partition("..")
    if not sep:
        raise UsageError(f"window must look like lo..hi, got {text!r}")
    try:
        return int(lo), int(hi)
    except ValueError:
        raise UsageError(f"window bounds must be integers, got {text!r}") from None


def params_from(args) -> Params:
    try:
        return Params(q=parse_rat(args.q), alpha=parse_cplx(args.alpha),
                      alphabar=parse_cplx(args.alphabar), beta=parse_cplx(args.beta),
                      betabar=parse_cplx(args.betabar))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def window_from(args, params: Params, units: str = "planck"):
    from .repspace import Window

    mode = "cyclic" if args.cyclic else "open"
    if args.dim is not None:
        if args.dim < 1:
            raise UsageError("--dim must be positive")
        lo = -(args.dim // 2)
        hi = lo + args.dim - 1
    else:
        lo, hi = parse_window(args.window)
    try:
        return Window(lo, hi, mode, params.q, units)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# -----------------------------------------------------------------------------
# eval
# -----------------------------------------------------------------------------

def cmd_eval(args) -> int:
    from .exprparse import EvalError, ParseError, canonical_text, evaluate_text
    from .algebra import NoExchangeRule

    p = params_from(args)
    try:
        value = evaluate_text(args.expr, p)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EvalError, NoExchangeRule, ZeroDivisionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = canonical_text(value)
    if args.format == "json":
        text = json.dumps({"expr": args.expr, "q": str(p.q), "value": text})
    emit(text, args.out)
    return EXIT_OK


# -----------------------------------------------------------------------------
# verify
# -----------------------------------------------------------------------------

def _suite_calculus(p: Params) -> List[dict]:
    from .algebra import AlgebraElement, DoubledElement
    from .calculus import (FormElement, check_centrality, check_module_relations,
                           check_reality, dirac_identity_check)

    q = p.q
    L, x = AlgebraElement.gen("L", q), AlgebraElement.gen("x", q)
    sample = [L, x, L * x + 2 * x * x, AlgebraElement.gen("L", q, -1) * x]
    out = []
    r = check_module_relations(q)
    out.append({"name": "module relations", "passed": r.passed})
    for basis in ("theta", "thetabar"):
        r = check_centrality(FormElement.basis_form(basis, q), sample)
        out.append({"name": f"centrality {basis}", "passed": r.passed})
    r = check_centrality(FormElement.basis_form("thetaR", q), [DoubledElement.diag(f) for f in sample])
    out.append({"name": "centrality thetaR", "passed": r.passed})
    for f in sample:
        out.append({"name": f"reality {f}", "passed": check_reality(f).passed})
        for which in ("d", "dbar", "dR"):
            out.append({"name": f"dirac {which} {f}", "passed": dirac_identity_check(f, which).passed})
    return out


def _suite_connections(p: Params) -> List[dict]:
    from .geometry import (ConnectionSpec, connection_check, expected_flat_D_dx,
                           metric_frame_component, real_nonlocal_star_check)

    q = p.q
    out = []
    for flavor in ("plain", "bar", "real"):
        c = ConnectionSpec.flat(q, flavor)
        r = connection_check(c, metric_frame_component("flat", q, flavor), expected_flat_D_dx(q, flavor))
        out.append({"name": f"flat {flavor}", "passed": r.passed, "D_dx": r.D_dx})
        c = ConnectionSpec.nonlocal_(q, flavor)
        g = metric_frame_component("nonLocal", q, flavor)
        zero = g - g
        r = connection_check(c, g, zero)
        out.append({"name": f"nonlocal {flavor}", "passed": r.passed, "D_dx": r.D_dx})
    out.append({"name": "nonlocal real omega*", "passed": real_nonlocal_star_check(q)})
    return out


def _suite_witness(p: Params) -> List[dict]:
    from .geometry import nonbilinearity_witness

    w = nonbilinearity_witness(p.q, "nonLocal")
    return [{"name": "non-bilinearity factor q^2", "passed": w.factor == p.q ** 2,
             "factor": str(w.factor)}]


def _suite_exactness(p: Params) -> List[dict]:
    from .calculus import exactness_witnesses

    return [{"name": k, "passed": v["passed"], "residual": fmt(v["residual"])}
            for k, v in exactness_witnesses(p).items()]


def _continuity_sample(q):
    from .algebra import AlgebraElement

    L, x = AlgebraElement.gen("L", q), AlgebraElement.gen("x", q)
    return [AlgebraElement.one(q), x, L * x + 2 * x * x, x * x]


def _suite_continuity(p: Params) -> List[dict]:
    from .fields import verify_continuity

    return [{"name": f"continuity psi={f}", "passed": verify_continuity(f, 1).passed}
            for f in _continuity_sample(p.q)]


def _suite_nonlocal_continuity(p: Params) -> List[dict]:
    from .fields import nonlocal_continuity

    out = []
    for f in _continuity_sample(p.q):
        r = nonlocal_continuity(f, 1)
        out.append({"name": f"nonlocal continuity psi={f}", "passed": r.passed, "residual": r.residual})
    return out


def _suite_plane_waves(p: Params) -> List[dict]:
    from .fields import plane_wave_identity

    out = []
    for k in (0.3, math.pi / 2, 2 * math.pi):
        r = plane_wave_identity(k, params=p)
        for key in ("e1", "eb1", "eR1 componentwise"):
            out.append({"name": f"plane wave {key} k={pi_label(k)}", "passed": r[key] <= 1e-12,
                        "residual": fmt(r[key])})
    return out


def _suite_integration(p: Params) -> List[dict]:
    from .algebra import AlgebraElement
    from .calculus import FormElement, differential
    from .integration import integrate
    from .repspace import Window

    q = p.q
    w = Window(-32, 32, "open", q)
    x = AlgebraElement.gen("x", q)
    r0 = integrate(differential(x, "d").to_frame_basis(), w)
    th = FormElement.basis_form("theta", q)
    r1 = integrate(th.lmul(AlgebraElement.gen("L", q, -1) * (q * AlgebraElement.gen("L", q) * x)), w)
    return [{"name": "integral of dx = 0", "passed": (not r0.divergent) and r0.value == 0},
            {"name": "integral of L^-1 dx divergent", "passed": r1.divergent}]


def _relation_suite(name: str):
    def run(p: Params) -> List[dict]:
        from .relations import verify_relation

        r = verify_relation(name, p)
        row = {"name": name, "passed": r.passed}
        row.update(r.constants)
        return [row]
    return run


def suites() -> Dict[str, object]:
    from .relations import relation_names

    s = {name: _relation_suite(name) for name in relation_names()}
    s.update({
        "calculus": _suite_calculus,
        "connections": _suite_connections,
        "witness": _suite_witness,
        "exactness": _suite_exactness,
        "continuity": _suite_continuity,
        "nonlocal-continuity": _suite_nonlocal_continuity,
        "plane-waves": _suite_plane_waves,
        "integration": _suite_integration,
    })
    return s


def cmd_verify(args) -> int:
    table = suites()
    if args.suite != "all" and args.suite not in table:
        print(f"unknown suite {args.suite!r}; known: all, {', '.join(table)}", file=sys.stderr)
        return EXIT_USAGE
    p = params_from(args)
    names = list(table) if args.suite == "all" else [args.suite]
    rows = []
    for n in names:
        try:
            rows.extend(table[n](p))
        except ValueError as exc:
            rows.append({"name": n, "passed": False, "error": str(exc)})
    ok = all(r["passed"] for r in rows)
    if args.format == "json":
        text = json.dumps({"q": str(p.q), "passed": ok, "results": rows}, indent=2)
    else:
        lines = []
        for r in rows:
            extra = " ".join(f"{k}={v}" for k, v in r.items() if k not in ("name", "passed"))
            lines.append(f"{'PASS' if r['passed'] else 'FAIL'}  {r['name']}" + (f"  {extra}" if extra else ""))
        lines.append(f"{sum(r['passed'] for r in rows)}/{len(rows)} passed")
        text = "\n".join(lines)
    emit(text, args.out)
    return EXIT_OK if ok else EXIT_FAIL


# -----------------------------------------------------------------------------
# dispersion
# -----------------------------------------------------------------------------

def cmd_dispersion(args) -> int:
    from .fields import dispersion_scan

    try:
        curve = dispersion_scan(args.m, args.kmax, args.samples)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = curve.to_csv() if args.format != "json" else json.dumps(curve.to_json())
    k, E = curve.argmax()
    summary = f"max E = {E:.6f} at k = {pi_label(k)}"
    if args.out:
        emit(text, args.out)
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return EXIT_OK


# -----------------------------------------------------------------------------
# oscillator
# -----------------------------------------------------------------------------

def cmd_oscillator(args) -> int:
    from . import oscillator as osc

    zs = args.z or list(osc.Z_SWEEP)
    for z in zs:
        if not 0 < z <= 0.25:
            print(f"error: z={z} outside (0, 0.25]", file=sys.stderr)
            return EXIT_USAGE
    if args.halfwidth is not None:
        bad = [z for z in zs if args.halfwidth < osc.min_halfwidth(z)]
        if bad:
            print(f"error: halfwidth {args.halfwidth} below 8/z for z={bad[0]}", file=sys.stderr)
            return EXIT_USAGE
    rep = osc.run_sweep(zs, args.halfwidth)
    data = rep.to_json()
    data["include_cr"] = bool(args.include_cr)
    if args.include_cr:
        data["laplacian_constants"] = _cr_constants_residual(zs)
    passed = all(data["passed"].values()) and len(zs) >= 3
    text = json.dumps(data, indent=2)
    emit(text, args.out)
    print(" ".join(f"{k}={'PASS' if v else 'FAIL'}" for k, v in data["passed"].items()), file=sys.stderr)
    return EXIT_OK if passed else EXIT_FAIL


def _cr_constants_residual(zs) -> List[float]:
    """With ``c_R`` the real Laplacian annihilates constants on interior rows."""
    from . import oscillator as osc
    from . import repspace as rs
    from .fields import LaplacianSpec, laplacian

    out = []
    for z in zs:
        q = osc.q_of_z(z)
        w = rs.Window(-16, 16, "open", q)
        D = laplacian(LaplacianSpec("realFlat", True), w, Params(q=q))
        ones = np.ones(w.dim)
        rows = D.first.valid_rows(D.margin)
        out.append(float(max(np.max(np.abs((D.first.matrix @ ones)[rows])),
                             np.max(np.abs((D.second.matrix @ ones)[rows])))))
    return out


# -----------------------------------------------------------------------------
# distance and representation export
# -----------------------------------------------------------------------------

def cmd_distance(args) -> int:
    from .geometry import distance

    p = params_from(args)
    w = window_from(args, p, args.units)
    rows = []
    try:
        for k in range(w.kmin + 2, w.kmax - 1):
            r = distance(args.metric, k, w, p)
            rows.append({"k": k, "ds": r.value, "alternatives": r.alternatives})
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "csv":
        text = "k,ds\n" + "".join(f"{r['k']},{fmt(r['ds'])}\n" for r in rows)
    else:
        text = json.dumps({"metric": args.metric, "q": str(p.q), "units": args.units,
                           "rows": [{"k": r["k"], "ds": fmt(r["ds"]),
                                     "alternatives": {a: fmt(v) for a, v in r["alternatives"].items()}}
                                    for r in rows]}, indent=2)
    emit(text, args.out)
    return EXIT_OK


def cmd_rep(args) -> int:
    from .repspace import rep_generator

    p = params_from(args)
    w = window_from(args, p)
    try:
        rep = rep_generator(args.name, w, p)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = rep.to_csv() if args.format == "csv" else json.dumps(rep.to_json())
    emit(text, args.out)
    return EXIT_OK


# -----------------------------------------------------------------------------
# parser
# -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", default="3/2", help="deformation parameter p/q > 1")
    common.add_argument("--alpha", default="1")
    common.add_argument("--alphabar", default="1")
    common.add_argument("--beta", default="1")
    common.add_argument("--betabar", default="-1")
    common.add_argument("--window", default="-16..16", help="lo..hi")
    common.add_argument("--cyclic", action="store_true")
    common.add_argument("--dim", type=int, default=None)
    common.add_argument("--out", default=None, help="write output to PATH")
    common.add_argument("--format", choices=("json", "csv", "text"), default=None)

    ap = argparse.ArgumentParser(prog="qline", description="q-deformed line: algebra, geometry and spectra")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="canonical form of an expression")
    p.add_argument("expr")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify", parents=[common], help="run identity suites")
    p.add_argument("suite", nargs="?", default="all")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dispersion", parents=[common], help="dispersion curve as CSV")
    p.add_argument("--m", type=float, default=0.0)
    p.add_argument("--kmax", type=float, default=math.pi)
    p.add_argument("--samples", type=int, default=100)
    p.set_defaults(func=cmd_dispersion)

    p = sub.add_parser("oscillator", parents=[common], help="oscillator z-sweep report")
    p.add_argument("--z", type=float, action="append")
    p.add_argument("--halfwidth", type=int, default=None)
    p.add_argument("--include-cr", action="store_true")
    p.set_defaults(func=cmd_oscillator)

    p = sub.add_parser("distance", parents=[common], help="line element per lattice site")
    p.add_argument("metric", choices=("local", "hermitian", "nonlocal"))
    p.add_argument("--units", choices=("planck", "laboratory"), default="planck")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("rep", parents=[common], help="export a generator matrix")
    p.add_argument("name")
    p.set_defaults(func=cmd_rep)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # negative bounds such as "--window -4..4" would otherwise parse as a flag
    for i, tok in enumerate(argv[:-1]):
        if tok == "--window":
            argv[i:i + 2] = [f"--window={argv[i + 1]}"]
            break
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
