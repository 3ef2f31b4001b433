"""Command-line entry point: ``hecketrees <subcommand> ...``.

Exit status is 0 on success, 2 on a usage error and 1 on a domain error
(the error class name is printed on stderr).  Rationals are always written
as ``"num/den"`` and JSON keys are sorted, so identical invocations give
byte-identical output.
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import operator
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import bttree, equidist, hecke, modsurface, padic, solenoid
from .config import FORMATS, load_config
from .errors import HeckeError
from .modsurface import HPoint, TestFunction


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# serialisation helpers

def q(r) -> str:
    r = Fraction(r)
    return f"{r.numerator}/{r.denominator}"


def point_json(z: HPoint, **extra) -> dict:
    return {"x": q(z.x), "y": q(z.y), **extra}


def sphere_json(s: hecke.HeckeSphere) -> list[dict]:
    return [point_json(z, mult=m) for z, m in s.points.items()]


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def parse_point(text: str) -> HPoint:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected x,y, got {text!r}")
    x, y = (parse_rational(v) for v in parts)
    if y <= 0:
        raise argparse.ArgumentTypeError(f"y must be positive in {text!r}")
    return HPoint(x, y)


def parse_vertex(text: str) -> tuple[int, Fraction]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected m,u, got {text!r}")
    try:
        m = int(parts[0])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"scale must be an integer in {text!r}") from exc
    return m, parse_rational(parts[1])


def parse_test(text: str) -> TestFunction:
    kind, _, rest = text.partition(":")
    try:
        if kind == "ystrip":
            return TestFunction.ystrip(parse_rational(rest))
        if kind == "box":
            return TestFunction.box(*(parse_rational(v) for v in rest.split(",")))
        if kind == "domain" and not rest:
            return TestFunction.domain()
    except (TypeError, ValueError) as exc:
        raise argparse.ArgumentTypeError(f"bad test {text!r}: {exc}") from exc
    raise argparse.ArgumentTypeError(f"expected ystrip:c, box:x0,x1,y0,y1 or domain, got {text!r}")


def parse_n_list(text: str) -> list[int]:
    try:
        return equidist.parse_n_list(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def parse_primes(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated primes, got {text!r}") from exc


def _int_at_least(low: int):
    def parse(text: str) -> int:
        try:
            n = int(text)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
        if n < low:
            raise argparse.ArgumentTypeError(f"must be >= {low}: {text!r}")
        return n

    return parse


positive_int = _int_at_least(1)
nonnegative_int = _int_at_least(0)


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def eval_rational(expr: str) -> Fraction:
    """Evaluate ``+ - * / **`` over integer literals exactly."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return Fraction(node.value)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                exp = ev(node.right)
                if exp.denominator != 1:
                    raise ValueError("only integer exponents are allowed")
                return ev(node.left) ** int(exp)
            if type(node.op) in _BINOPS:
                return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(f"unsupported syntax in {expr!r}")

    try:
        return ev(ast.parse(expr, mode="eval"))
    except SyntaxError as exc:
        raise ValueError(f"cannot parse {expr!r}") from exc
    except ZeroDivisionError as exc:
        raise padic.DivisionByZero(f"division by zero in {expr!r}") from exc


# subcommands; each returns (json-able object, csv rows or None)

def cmd_padic(args, cfg):
    k = args.precision or cfg.default_precision
    if args.action == "eval":
        if args.p is None:
            raise UsageError("padic eval: --p is required")
        try:
            r = eval_rational(args.expr)
        except ValueError as exc:
            raise UsageError(f"padic eval: {exc}") from exc
        v = padic.from_rational(r, args.p, k)
        out = {
            "p": args.p,
            "precision": k,
            "value": q(r),
            "valuation": "inf" if v.is_zero else v.valuation,
            "unit_digits": v.unit_digits,
            "digits": [] if v.is_zero else v.digits(),
            "abs": q(v.norm()),
        }
        return out, [["p", "precision", "value", "valuation", "unit_digits", "abs"],
                     [out["p"], k, out["value"], out["valuation"], v.unit_digits, out["abs"]]]
    r = args.expr_fraction
    places = padic.local_absolute_values(r)
    product = padic.product_formula_check(r)
    out = {"value": q(r), "places": {str(p): q(a) for p, a in places.items()}, "product": q(product)}
    rows = [["place", "abs"]] + [[str(p), q(a)] for p, a in places.items()] + [["product", q(product)]]
    return out, rows


def cmd_reduce(args, cfg):
    z, m = modsurface.reduce(args.point)
    out = {"point": point_json(args.point), "reduced": point_json(z), "matrix": list(m.as_tuple())}
    return out, [["x", "y", "a", "b", "c", "d"], [q(z.x), q(z.y), *m.as_tuple()]]


def cmd_neighbors(args, cfg):
    raw = hecke.neighbors(args.point, args.p)
    red = hecke.reduced_neighbors(args.point, args.p)
    red_list = [point_json(z, mult=m) for z, m in sorted(red.items())]
    out = {"p": args.p, "point": point_json(args.point), "neighbors": [point_json(z) for z in raw], "reduced": red_list}
    return out, [["x", "y", "mult"]] + [[r["x"], r["y"], r["mult"]] for r in red_list]


def _raw_sphere(method: str, z: HPoint, n: int, order) -> list[dict]:
    if method == "tree":
        return [
            point_json(w, address={str(p): "".join(map(str, word)) if p < 10 else ".".join(map(str, word))
                                   for p, word in addr.words})
            for addr, w in hecke.iter_sphere_addresses(z, n, order)
        ]
    return [point_json(modsurface.moebius_apply(m, z), matrix=list(m.as_tuple()))
            for m in hecke.coset_representatives(n)]


def cmd_sphere(args, cfg):
    methods = ["tree", "coset"] if args.method == "both" else [args.method]
    if args.order is not None and "coset" in methods and args.method != "both":
        raise UsageError("sphere: --order applies to the tree method only")
    spheres = {}
    for method in methods:
        if method == "tree":
            spheres[method] = hecke.sphere_tree(args.point, args.N, args.order)
        else:
            spheres[method] = hecke.sphere_coset(args.point, args.N)
    out = {"N": args.N, "center": point_json(modsurface.reduced(args.point)), "size": hecke.psi(args.N)}
    rows = [["method", "x", "y", "mult"]]
    for method, s in spheres.items():
        entries = _raw_sphere(method, args.point, args.N, args.order) if args.raw else sphere_json(s)
        out[method] = entries
        rows.extend([method, e["x"], e["y"], e.get("mult", 1)] for e in entries)
    if len(spheres) == 2:
        out["equal"] = spheres["tree"] == spheres["coset"]
    return out, rows


def cmd_tree(args, cfg):
    p = args.p
    if args.action == "sphere":
        center = bttree.BTVertex(p, *args.center)
        verts = bttree.bt_sphere(center, args.n)
        out = {"p": p, "center": str(center), "n": args.n, "count": len(verts), "vertices": [str(v) for v in verts]}
        return out, [["m", "u"]] + [[v.scale, q(v.shift)] for v in verts]
    if args.action == "flow":
        v = bttree.flow_h_p(bttree.BTVertex(p, *args.v), args.n)
        out = {"p": p, "vertex": str(v), "m": v.scale, "u": q(v.shift)}
        return out, [["m", "u"], [v.scale, q(v.shift)]]
    v, w = bttree.BTVertex(p, *args.v), bttree.BTVertex(p, *args.w)
    d = bttree.bt_distance(v, w)
    return {"p": p, "v": str(v), "w": str(w), "distance": d}, [["distance"], [d]]


def _digits(r: int, p: int, depth: int) -> str:
    digits = []
    for _ in range(depth):
        r, d = divmod(r, p)
        digits.append(str(d))
    return ("" if p < 10 else ".").join(digits)


def cmd_solenoid(args, cfg):
    k = args.precision or cfg.default_precision
    x_inf, x_p = args.start
    pt = solenoid.canonicalize(x_inf, x_p, args.p, k, args.period)
    hist = solenoid.cylinder_histogram(pt, args.depth, args.steps)
    orbit = [
        [t, q(s.base), _digits(s.fiber_residue(args.depth), args.p, args.depth)]
        for t, s in solenoid.orbit(pt, args.steps)
    ]
    if args.orbit_csv:
        with open(args.orbit_csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["time", "base", "fiber_digits"])
            w.writerows(orbit)
    out = {
        "p": args.p,
        "depth": args.depth,
        "steps": args.steps,
        "start": {"base": q(pt.base), "fiber": q(pt.fiber_rational)},
        "histogram": {str(r): c for r, c in hist.items()},
        "orbit": [dict(zip(("time", "base", "fiber_digits"), row)) for row in orbit],
    }
    return out, [["residue", "count"]] + [[r, c] for r, c in hist.items()]


def cmd_equidist(args, cfg):
    report = equidist.convergence_table(args.point, args.N_list, args.test, workers=args.threads)
    rows = [
        {
            "N": r.N,
            "size": r.size,
            "empirical": q(r.empirical),
            "empirical_float": float(r.empirical),
            "target": r.target,
            "abs_error": r.abs_error,
            "boundary_hits": r.boundary_hits,
        }
        for r in report.rows
    ]
    out = {"center": point_json(report.center), "test": report.test.spec(), "note": report.note, "rows": rows}
    csv_rows = [["N", "size", "empirical", "target", "abs_error"]]
    csv_rows.extend([r["N"], r["size"], r["empirical_float"], r["target"], r["abs_error"]] for r in rows)
    return out, csv_rows


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hecketrees", description="Hecke trees, spheres, p-adics, solenoids and Bruhat-Tits trees.")
    parser.add_argument("--precision", type=positive_int, help="p-adic working precision (digits)")
    parser.add_argument("--format", choices=FORMATS, help="output format")
    parser.add_argument("--out", help="write output to this file instead of stdout")
    parser.add_argument("--threads", type=positive_int, default=1, help="worker processes for equidist rows")
    parser.add_argument("--config", help="key=value config file")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("padic", help="p-adic evaluation and the product formula")
    p.add_argument("--p", type=int)
    p.add_argument("--precision", type=positive_int, dest="sub_precision")
    pa = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    e = pa.add_parser("eval")
    e.add_argument("expr")
    pf = pa.add_parser("product-formula")
    pf.add_argument("expr_fraction", metavar="rational", type=parse_rational)
    p.set_defaults(func=cmd_padic)

    r = sub.add_parser("reduce", help="reduce a point to the fundamental domain")
    r.add_argument("--point", type=parse_point, required=True)
    r.set_defaults(func=cmd_reduce)

    nb = sub.add_parser("neighbors", help="Hecke neighbours at a prime")
    nb.add_argument("--p", type=int, required=True)
    nb.add_argument("--point", type=parse_point, required=True)
    nb.set_defaults(func=cmd_neighbors)

    s = sub.add_parser("sphere", help="Hecke sphere of radius N")
    s.add_argument("--N", type=positive_int, required=True)
    s.add_argument("--point", type=parse_point, required=True)
    s.add_argument("--method", choices=("tree", "coset", "both"), default="tree")
    s.add_argument("--order", type=parse_primes, help="order in which the tree method visits the primes")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--raw", action="store_true", help="one unmerged entry per address or representative")
    g.add_argument("--reduced", action="store_true", help="reduced points with multiplicity (default)")
    s.set_defaults(func=cmd_sphere)

    t = sub.add_parser("tree", help="Bruhat-Tits tree of PGL(2, Q_p)")
    t.add_argument("--p", type=int, required=True)
    ta = t.add_subparsers(dest="action", required=True, parser_class=_Parser)
    ts = ta.add_parser("sphere")
    ts.add_argument("--n", type=nonnegative_int, required=True)
    ts.add_argument("--center", type=parse_vertex, default=(0, Fraction(0)))
    td = ta.add_parser("distance")
    td.add_argument("--v", type=parse_vertex, required=True)
    td.add_argument("--w", type=parse_vertex, required=True)
    tf = ta.add_parser("flow")
    tf.add_argument("--v", type=parse_vertex, default=(0, Fraction(0)))
    tf.add_argument("--n", type=int, required=True)
    t.set_defaults(func=cmd_tree)

    so = sub.add_parser("solenoid", help="orbit statistics on the p-adic solenoid")
    so.add_argument("--p", type=int, required=True)
    so.add_argument("--precision", type=positive_int, dest="sub_precision")
    so.add_argument("--period", type=nonnegative_int, default=0, help="use p^period Z_p as fiber (circle of length p^period)")
    soa = so.add_subparsers(dest="action", required=True, parser_class=_Parser)
    o = soa.add_parser("orbit")
    o.add_argument("--steps", type=nonnegative_int, required=True)
    o.add_argument("--depth", type=positive_int, required=True)
    o.add_argument("--start", type=lambda s: tuple(parse_rational(v) for v in s.split(",")),
                   default=(Fraction(0), Fraction(0)), help="x_inf,x_p")
    o.add_argument("--orbit-csv", help="also write (time, base, fiber digits) rows here")
    so.set_defaults(func=cmd_solenoid)

    eq = sub.add_parser("equidist", help="averages over Hecke spheres vs the hyperbolic measure")
    eq.add_argument("--point", type=parse_point, required=True)
    eq.add_argument("--N-list", dest="N_list", type=parse_n_list, required=True)
    eq.add_argument("--test", type=parse_test, required=True)
    eq.add_argument("--format", choices=FORMATS, dest="sub_format")
    eq.set_defaults(func=cmd_equidist)
    return parser


def render(obj, rows, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        return buf.getvalue()
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = load_config(args.config)
        args.precision = getattr(args, "sub_precision", None) or args.precision
        fmt = getattr(args, "sub_format", None) or args.format or cfg.default_format
        obj, rows = args.func(args, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return 2
    except SystemExit as exc:  # --help
        return exc.code or 0
    except HeckeError as exc:
        print(f"{type(exc).__name__}: {exc}", file=stderr)
        return 1
    except ValueError as exc:
        print(f"{type(exc).__name__}: {exc}", file=stderr)
        return 1
    text = render(obj, rows, fmt)
    if args.out:
        path = Path(args.out)
        if not path.is_absolute():
            path = cfg.output_dir / path
        path.write_text(text)
    else:
        stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
