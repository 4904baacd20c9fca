"""Command-line front end.

Every command prints one JSON document ``{"manifest": ..., "result": ...}``
(``path`` prints JSON lines instead, one waypoint per line and a trailer).
Rationals are written as ``"num/den"`` strings.

Exit codes: 0 success, 2 bad input, 3 numerical failure, 4 probe timeout.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from ._numbers import EXACT, FLOAT, parse_scalar, parse_vector, to_json, vector_to_json
from .errors import GSTError, InvalidInput, NumericalFailure
from .geometry import (
    ProbeParams,
    TimedOut,
    component_label,
    contraction,
    path_probe,
    segment_classify,
    surface_sample,
)
from .model import GameSpec, tequila
from .points import (
    CertifiedPoint,
    boundary_point,
    f_eval,
    influence_margin,
    involution,
    membership,
    theta_brackets,
    theta_point,
)
from .quadform import (
    hessian,
    inertia_from_eigen,
    inertia_from_ldl,
    hessian_float,
    psi,
)
from .sim import DEFAULT_CHUNK, SimConfig, independence_test, simulate

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_TIMEOUT = 0, 2, 3, 4


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


# -- manifests and output ------------------------------------------------------


def _config_dict(args: argparse.Namespace) -> dict:
    skip = {"func", "output"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def manifest(args: argparse.Namespace, argv: list[str], seeds: list, started: float) -> dict:
    canonical = json.dumps(_config_dict(args), sort_keys=True, separators=(",", ":"), default=str)
    return {
        "command": ["gstspace"] + list(argv),
        "config_digest": hashlib.sha256(canonical.encode()).hexdigest(),
        "seeds": seeds,
        "version": __version__,
        "wall_time_s": round(time.perf_counter() - started, 6),
    }


def _emit(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json(args, argv, started, result, seeds=()) -> int:
    doc = {"manifest": manifest(args, argv, list(seeds), started), "result": result}
    _emit(args, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _csv(args, header: list[str], rows: list[list]) -> int:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    _emit(args, buf.getvalue())
    return EXIT_OK


def _no_csv(args):
    if args.format == "csv":
        raise InvalidInput(f"--format csv is not available for '{args.command}'")


# -- point input -------------------------------------------------------------------


def _read_point(text: str | None, path: str | None, mode: str):
    if path:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidInput(f"cannot read point file: {exc}") from exc
        cert = data.get("certificates")
        if cert and mode == EXACT:
            i = int(cert["coordinate"]) - 1
            base = [Fraction(0) if k == i else parse_scalar(v, EXACT) for k, v in enumerate(data["p"])]
            lo, hi = (parse_scalar(v, EXACT) for v in cert["bracket"])
            return CertifiedPoint(tuple(base), i, tuple(int(c) for c in cert["polynomial"]), (lo, hi))
        text = data["p"]
    if text is None:
        raise InvalidInput("give a point with -p or --file")
    try:
        return parse_vector(text, mode)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInput(f"malformed point: {exc}") from exc


def _boundary_or_point(args, which: str):
    if getattr(args, "boundary", None):
        b = boundary_point(args.boundary)
        pt = b if which == "p" else involution(b)
        return pt if args.mode == EXACT else pt.floats()
    return _read_point(getattr(args, which), None, args.mode)


# -- commands ------------------------------------------------------------------------


def cmd_check(args, argv, started) -> int:
    p = _read_point(args.p, args.file, args.mode)
    rep = membership(p, tol=args.tol, margin_tol=args.margin_tol)
    d = rep.to_dict()
    if args.format == "csv":
        return _csv(args, ["in_box", "in_ind", "in_inf", "in_gst", "psi", "influence_witness"],
                    [[d["in_box"], d["in_ind"], d["in_inf"], d["in_gst"], d["psi"], d["influence_witness"]]])
    return _json(args, argv, started, d)


def cmd_find(args, argv, started) -> int:
    n = args.n
    points, seeds = [], []
    if args.family == "theta":
        tol = Fraction(args.root_tol)
        for a, b in theta_brackets(n, tol):
            theta = a if a == b else (a + b) / 2
            pt = theta_point(n, theta) if a == b else theta_point(n, float(theta))
            rep = membership(pt, tol=args.tol)
            points.append({"theta": to_json(theta) if a == b else float(theta),
                           "bracket": vector_to_json([a, b]), **rep.to_dict()})
    elif args.family == "boundary":
        b = boundary_point(n)
        for pt in (b, involution(b)):
            rep = membership(pt)
            d = rep.to_dict()
            d["psi_float"] = float(psi(pt.floats()))
            points.append(d)
    else:
        seeds = [args.seed]
        pts, attempts = surface_sample(n, args.count, args.radius, args.seed)
        for pt in pts:
            points.append(membership(pt, tol=args.tol).to_dict())
    if args.format == "csv":
        rows = [p["p"] + [p["in_gst"]] for p in points]
        return _csv(args, [f"p{k}" for k in range(1, n + 1)] + ["in_gst"], rows)
    return _json(args, argv, started, {"n": n, "family": args.family, "points": points}, seeds)


def cmd_inertia(args, argv, started) -> int:
    _no_csv(args)
    result = {"n": args.n, "method": args.method}
    if args.method in ("ldl", "both"):
        inert, eps = inertia_from_ldl(args.n)
        result["ldl"] = {**inert.to_dict(), "epsilons": vector_to_json(eps)}
    if args.method in ("eigen", "both"):
        result["eigen"] = inertia_from_eigen(hessian_float(args.n)).to_dict()
    if args.method == "both":
        agree = result["ldl"]["n_pos"] == result["eigen"]["n_pos"] and result["ldl"]["n_neg"] == result["eigen"]["n_neg"] \
            and result["ldl"]["n_zero"] == result["eigen"]["n_zero"]
        result["agree"] = agree
        if not agree:
            _json(args, argv, started, result)
            return EXIT_NUMERIC
    return _json(args, argv, started, result)


def cmd_hessian(args, argv, started) -> int:
    info = hessian(args.n)
    if args.format == "csv":
        return _csv(args, [f"c{k}" for k in range(1, args.n + 1)], info.X_scaled() if args.scaled else
                    [[to_json(v) for v in row] for row in info.H])
    return _json(args, argv, started, info.to_dict())


def cmd_ftheta(args, argv, started) -> int:
    n = args.n
    if args.roots:
        _no_csv(args)
        out = []
        for a, b in theta_brackets(n, Fraction(args.root_tol)):
            exact = a == b
            out.append({"root": to_json(a) if exact else float((a + b) / 2),
                        "exact": exact, "bracket": vector_to_json([a, b])})
        return _json(args, argv, started, {"n": n, "roots": out})
    m = args.grid
    rows = [[float(Fraction(k, m)), float(f_eval(n, Fraction(k, m)))] for k in range(m + 1)]
    if args.format == "csv":
        return _csv(args, ["theta", "f"], rows)
    return _json(args, argv, started, {"n": n, "grid": rows})


def cmd_segment(args, argv, started) -> int:
    _no_csv(args)
    p, q = _boundary_or_point(args, "p"), _boundary_or_point(args, "q")
    res = segment_classify(p, q, samples=args.samples, tol=args.tol)
    return _json(args, argv, started, res.to_dict())


def cmd_path(args, argv, started) -> int:
    _no_csv(args)
    p, q = _boundary_or_point(args, "p"), _boundary_or_point(args, "q")
    params = ProbeParams(step=args.step, budget=args.budget, seed=args.seed)
    res = path_probe(p, q, params)
    lines = []
    for i, w in enumerate(getattr(res, "waypoints", [])):
        lines.append(json.dumps({"i": i, "p": w, "psi": psi(w), "margin": influence_margin(w)[0]}))
    trailer = res.trailer()
    if trailer.get("experimental"):
        trailer["note"] = "experimental: connectivity for n = 5, 6, 7 is an open problem"
    lines.append(json.dumps({"trailer": trailer, "manifest": manifest(args, argv, [args.seed], started)}, sort_keys=True))
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_TIMEOUT if isinstance(res, TimedOut) else EXIT_OK


def cmd_component(args, argv, started) -> int:
    _no_csv(args)
    p = _boundary_or_point(args, "p")
    lab = component_label(p, tol=args.tol)
    out = {"label": lab.to_dict()}
    if args.with_involution:
        out["involution_label"] = component_label(involution(p), tol=args.tol).to_dict()
    return _json(args, argv, started, out)


def _spec_from_args(args) -> GameSpec:
    if args.spec:
        try:
            return GameSpec.from_json(Path(args.spec).read_text(encoding="utf-8"))
        except OSError as exc:
            raise InvalidInput(f"cannot read spec file: {exc}") from exc
    if args.p:
        return GameSpec.gst(parse_vector(args.p, args.mode))
    return tequila()


def cmd_simulate(args, argv, started) -> int:
    _no_csv(args)
    spec = _spec_from_args(args)
    cfg = SimConfig(spec, args.rounds, args.seed, args.chunk)
    rep = simulate(cfg, workers=args.workers)
    n = spec.n
    z = []
    for k in range(1, n + 1):
        for x in (0, 1):
            for i in range(1, n + 1):
                for j in range(i + 1, n + 1):
                    zs = independence_test(rep, i, j, k, x)
                    z.append({"i": i, "j": j, "k": k, "x": x, **zs.to_dict()})
    result = rep.to_dict()
    result["independence_z"] = z
    return _json(args, argv, started, result, [args.seed])


def cmd_homotopy(args, argv, started) -> int:
    _no_csv(args)
    p = _read_point(args.p, args.file, args.mode)
    n = len(p)
    c = parse_scalar(args.x, args.mode)
    x = [c] * n
    rows = []
    for k in range(args.steps + 1):
        t = Fraction(k, args.steps) if args.mode == EXACT else k / args.steps
        pt = contraction(p, t, x)
        rows.append({"t": to_json(t), "p": vector_to_json(pt), "psi": to_json(psi(pt))})
    return _json(args, argv, started, {"n": n, "target": vector_to_json(x), "samples": rows})


# -- parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=[EXACT, FLOAT], default=EXACT, help="rational or binary64 arithmetic")
    common.add_argument("--tol", type=float, default=1e-10, help="|psi| tolerance in float mode")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", default=None, help="write to this file instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default="json")

    ap = _ArgumentParser(prog="gstspace", description="Influence and independence in symmetric cause/effect games.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    s = sub.add_parser("check", parents=[common], help="membership in Ind_n, Inf_n, GST_n")
    s.add_argument("-p", help="comma-separated point, e.g. 1,1/2,1/3")
    s.add_argument("--file", help="point JSON file")
    s.add_argument("--margin-tol", type=float, default=1e-10)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("find", parents=[common], help="explicit points of GST_n")
    s.add_argument("n", type=int)
    s.add_argument("--family", choices=["theta", "boundary", "surface"], default="theta")
    s.add_argument("--count", type=int, default=10)
    s.add_argument("--radius", type=float, default=0.05)
    s.add_argument("--root-tol", default="1/1000000000000")
    s.set_defaults(func=cmd_find)

    s = sub.add_parser("inertia", parents=[common], help="inertia of the Hessian H_n")
    s.add_argument("n", type=int)
    s.add_argument("--method", choices=["ldl", "eigen", "both"], default="both")
    s.set_defaults(func=cmd_inertia)

    s = sub.add_parser("hessian", parents=[common], help="dump H_n")
    s.add_argument("n", type=int)
    s.add_argument("--scaled", action="store_true", help="csv: the integer matrix 2^(n-2) X")
    s.set_defaults(func=cmd_hessian)

    s = sub.add_parser("ftheta", parents=[common], help="f(theta) grid or roots")
    s.add_argument("n", type=int)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--emit-grid", action="store_true")
    g.add_argument("--roots", action="store_true")
    s.add_argument("--grid", type=int, default=256, help="grid intervals on [0, 1]")
    s.add_argument("--root-tol", default="1/1000000000000")
    s.set_defaults(func=cmd_ftheta)

    for name, func, helptext in (
        ("segment", cmd_segment, "classify the segment between two GST points"),
        ("path", cmd_path, "search a path inside GST_n"),
    ):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("-p")
        s.add_argument("-q")
        s.add_argument("--boundary", type=int, help="use boundary_point(n) and its involution")
        if name == "segment":
            s.add_argument("--samples", type=int, default=101)
        else:
            s.add_argument("--budget", type=int, default=100_000)
            s.add_argument("--step", type=float, default=0.01)
        s.set_defaults(func=func)

    s = sub.add_parser("component", parents=[common], help="component label (n = 3, 4)")
    s.add_argument("-p")
    s.add_argument("--boundary", type=int)
    s.add_argument("--with-involution", action="store_true")
    s.set_defaults(func=cmd_component)

    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo run of the game")
    s.add_argument("--spec", help="GameSpec JSON file (default: the three-player game)")
    s.add_argument("-p", help="GST vector instead of a spec file")
    s.add_argument("--rounds", type=int, default=100_000)
    s.add_argument("--chunk", type=int, default=DEFAULT_CHUNK)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("homotopy", parents=[common], help="contraction toward a constant point")
    s.add_argument("-p")
    s.add_argument("--file")
    s.add_argument("--x", default="1/2", help="constant value of the target point")
    s.add_argument("--steps", type=int, default=8)
    s.set_defaults(func=cmd_homotopy)
    return ap


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    started = time.perf_counter()
    try:
        return args.func(args, argv, started)
    except NumericalFailure as exc:
        print(f"gstspace: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (GSTError, ValueError, KeyError, TypeError) as exc:
        print(f"gstspace: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
