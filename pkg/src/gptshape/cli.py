"""Command line pipeline: shapes -> GPT matrices -> recovery -> matching.

Stages communicate through files so each step can be rerun, inspected, or
replaced by externally generated data:

    gptshape gpt --shape ellipse:2,1 --n 512 --lambda 1.5 --d 2 --out M.json
    gptshape recover --gpt M.json --out g.json
    gptshape render --poly g.json --out g.svg
    gptshape match --ref g_ref.json --obs g.json

All JSON outputs carry ``"schema": 1``, sorted keys, and no timestamps, so
identical inputs give byte-identical files.  Exit codes: 0 success,
1 configuration error, 2 numerical failure, 3 I/O failure, 4 no match.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import replace

import numpy as np

from . import __version__
from .errors import ConfigError, GptShapeError, NumericError
from .geometry import DiscretizedBoundary, ShapeSpec, discretize
from .gpt import GptMatrix, assemble_gpt, lambda_of_k
from .npo import NpoMatrix, assemble, dump_npo
from .polynomial import Poly2
from .recovery import (
    estimate_lambda,
    recover,
    recover_crossvalidated,
    recover_minimal_degree,
)
from .render import export_svg, extract
from .transform import MatchOptions, Similarity, lift, match, push_forward

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2
EXIT_IO = 3
EXIT_NO_MATCH = 4


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; the pipeline reserves 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


# shape DSL -----------------------------------------------------------------


def _floats(text, what):
    try:
        return [float(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise ConfigError(f"could not parse {what} value list {text!r}") from None


def parse_shape(text: str) -> ShapeSpec:
    """Parse the compact shape syntax used by --shape.

    Forms: disk[:r[,cx,cy]], ellipse:a,b[,cx,cy[,tilt]],
    flower[:base,amplitude,petals[,missing]], triangle[:R], diamond[:a,b],
    polygon:x1,y1,x2,y2,..., lemniscate:a1,b1,...,ak,bk,level.
    """
    kind, _, rest = text.partition(":")
    args = _floats(rest, kind) if rest else []
    if kind == "disk":
        if len(args) not in (0, 1, 3):
            raise ConfigError("disk takes r or r,cx,cy")
        r = args[0] if args else 1.0
        center = tuple(args[1:3]) if len(args) == 3 else (0.0, 0.0)
        return ShapeSpec.disk(r, center)
    if kind == "ellipse":
        if len(args) not in (2, 4, 5):
            raise ConfigError("ellipse takes a,b or a,b,cx,cy or a,b,cx,cy,tilt")
        center = tuple(args[2:4]) if len(args) >= 4 else (0.0, 0.0)
        tilt = args[4] if len(args) == 5 else 0.0
        return ShapeSpec.ellipse(args[0], args[1], center, tilt)
    if kind == "flower":
        if len(args) not in (0, 3, 4):
            raise ConfigError("flower takes base,amplitude,petals[,missing]")
        if not args:
            return ShapeSpec.flower()
        return ShapeSpec.flower(args[0], args[1], int(args[2]),
                                missing_petal=bool(args[3]) if len(args) == 4 else False)
    if kind == "triangle":
        if len(args) not in (0, 1):
            raise ConfigError("triangle takes an optional circumradius")
        R = args[0] if args else 1.0
        verts = [(R * np.cos(a), R * np.sin(a))
                 for a in (np.pi / 2, np.pi / 2 + 2 * np.pi / 3,
                           np.pi / 2 + 4 * np.pi / 3)]
        return ShapeSpec.polygon(verts)
    if kind == "diamond":
        if len(args) not in (0, 2):
            raise ConfigError("diamond takes a,b half-diagonals")
        a, b = (args if args else (1.0, 1.0))
        return ShapeSpec.polygon([(a, 0.0), (0.0, b), (-a, 0.0), (0.0, -b)])
    if kind == "polygon":
        if len(args) < 6 or len(args) % 2:
            raise ConfigError("polygon takes x1,y1,...,xk,yk with k >= 3")
        return ShapeSpec.polygon(list(zip(args[::2], args[1::2])))
    if kind == "lemniscate":
        if len(args) < 3 or len(args) % 2 == 0:
            raise ConfigError(
                "lemniscate takes pole coordinates a1,b1,...,ak,bk "
                "followed by the level")
        poles = list(zip(args[:-1:2], args[1:-1:2]))
        return ShapeSpec.lemniscate(poles, args[-1])
    raise ConfigError(f"unknown shape kind {kind!r}")


def _load_shape(args) -> ShapeSpec:
    if getattr(args, "shape_file", None):
        with open(args.shape_file) as fh:
            return ShapeSpec.from_json(json.load(fh))
    if getattr(args, "shape", None):
        return parse_shape(args.shape)
    raise ConfigError("one of --shape or --shape-file is required")


def _lambda(args) -> float:
    if args.k is not None:
        if args.lam is not None:
            raise ConfigError("--lambda and --k are mutually exclusive")
        return lambda_of_k(args.k)
    return args.lam if args.lam is not None else 1.5


def _write_json(obj, path) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _read_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _load_poly(path) -> Poly2:
    """Read a polynomial from a bare Poly2 JSON or a recovery result."""
    obj = _read_json(path)
    if isinstance(obj, dict) and "g" in obj:
        obj = obj["g"]
    try:
        return Poly2.from_json(obj)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"{path} is not a Poly2 or recovery JSON") from exc


# subcommands ----------------------------------------------------------------


def cmd_gpt(args) -> int:
    spec = _load_shape(args)
    lam = _lambda(args)
    boundary = discretize(spec, args.n)
    npo = assemble(boundary)
    if args.dump_npo:
        dump_npo(npo, args.dump_npo)
    M = assemble_gpt(boundary, npo, lam, args.d, args.row_degree)
    M = replace(M, meta={
        "shape": spec.to_json(),
        "n": args.n,
        "version": __version__,
    })
    _write_json(M.to_json(), args.out)
    return EXIT_OK


def _boundary_from_meta(M: GptMatrix) -> DiscretizedBoundary:
    meta = M.meta or {}
    if "shape" not in meta or "n" not in meta:
        raise ConfigError(
            "the GPT file carries no shape metadata; it cannot be "
            "re-assembled at another lambda or degree"
        )
    return discretize(ShapeSpec.from_json(meta["shape"]), int(meta["n"]))


def cmd_recover(args) -> int:
    M = GptMatrix.from_json(_read_json(args.gpt))
    if args.scan_degrees:
        return _scan(M, args)
    if args.cross_lambda is not None:
        boundary = _boundary_from_meta(M)
        out = recover_crossvalidated(
            boundary, M.d, M.lam, args.cross_lambda, row_degree=M.row_degree)
    elif args.reduce_degree:
        out = recover_minimal_degree(M)
    else:
        out = recover(M)
    if "AmbiguousKernel" in out.flags and not args.force:
        print(
            f"error: ambiguous kernel (gap {out.kernel_gap:.3g}, residual "
            f"{out.residual:.3g}); rerun with --force to write the result anyway",
            file=sys.stderr,
        )
        return EXIT_NUMERIC
    _write_json(out.to_json(), args.out)
    return EXIT_OK


def _scan_rows(boundary, npo, lam, dmax, row_degree=None):
    rows = []
    for d in range(1, dmax + 1):
        M = assemble_gpt(boundary, npo, lam, d, row_degree)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            out = recover(M)
        rows.append({
            "d": d,
            "residual": out.residual,
            "kernel_gap": out.kernel_gap,
        })
    return rows


def _print_scan(rows) -> None:
    print(f"{'d':>3} {'residual':>12} {'kernel_gap':>12}")
    for row in rows:
        print(f"{row['d']:>3} {row['residual']:>12.3e} {row['kernel_gap']:>12.3e}")


def _scan(M: GptMatrix, args) -> int:
    boundary = _boundary_from_meta(M)
    rows = _scan_rows(boundary, assemble(boundary), M.lam, args.scan_degrees,
                      None)
    _print_scan(rows)
    if args.out != "-":
        _write_json({"schema": 1, "lambda": M.lam, "rows": rows}, args.out)
    return EXIT_OK


def cmd_scan_degrees(args) -> int:
    spec = _load_shape(args)
    lam = _lambda(args)
    boundary = discretize(spec, args.n)
    rows = _scan_rows(boundary, assemble(boundary), lam, args.dmax)
    _print_scan(rows)
    if args.out:
        _write_json({"schema": 1, "lambda": lam, "rows": rows}, args.out)
    return EXIT_OK


def cmd_match(args) -> int:
    ref = _load_poly(args.ref)
    obs = _load_poly(args.obs)
    d = max(ref.degree, obs.degree)
    opts = MatchOptions(threshold=args.threshold,
                        allow_reflection=args.allow_reflection)
    out = match(ref.padded(d), obs.padded(d), opts)
    _write_json(out.to_json(), args.out)
    print(
        f"s={out.best.s:.6g} theta={out.best.theta:.6g} sign={out.sign} "
        f"epsilon={out.epsilon_match:.3e} "
        f"{'match' if out.matched else 'no match'}",
        file=sys.stderr,
    )
    return EXIT_OK if out.matched else EXIT_NO_MATCH


def cmd_render(args) -> int:
    p = _load_poly(args.poly)
    box = _floats(args.box, "box")
    if len(box) != 4:
        raise ConfigError("--box takes xmin,xmax,ymin,ymax")
    curves = extract(p, box=tuple(box), grid=args.grid, level=args.level)
    overlays = None
    if args.overlay:
        boundary = DiscretizedBoundary.load_csv(args.overlay)
        overlays = [boundary.nodes[boundary.component_id == c]
                    for c in sorted(set(int(v) for v in boundary.component_id))]
    export_svg(curves, args.out, overlays=overlays)
    if args.csv:
        curves.save_csv(args.csv)
    flags = "".join("o" if c else "u" for c in curves.closed)
    print(f"{curves.n_components} component(s) [{flags}] -> {args.out}")
    return EXIT_OK


# verify -----------------------------------------------------------------------


def _verify_checks(quick: bool, corrupt_diagonal: bool):
    """Built-in oracle suite: (name, callable -> (ok, detail)) pairs."""

    def disk_gpt():
        b = discretize(ShapeSpec.disk(), 128)
        npo = assemble(b)
        if corrupt_diagonal:
            m = np.array(npo.matrix)
            np.fill_diagonal(m, np.diag(m) + 0.01)
            npo = NpoMatrix(m, b)
        M = assemble_gpt(b, npo, 1.5, 2)
        err = abs(M.entry((1, 0), (1, 0)) - np.pi / 1.5)
        off = abs(M.entry((1, 0), (0, 1)))
        return err <= 1e-8 and off <= 1e-8, f"first-order error {err:.2e}"

    def circle_identities():
        b = discretize(ShapeSpec.disk(), 128)
        A = assemble(b).matrix
        e1 = np.max(np.abs(A @ np.ones(b.n) - 0.5))
        t = np.arctan2(b.nodes[:, 1], b.nodes[:, 0])
        e2 = np.max(np.abs(A @ np.cos(t)))
        return e1 <= 1e-10 and e2 <= 1e-8, f"A1 error {e1:.2e}, mode-1 {e2:.2e}"

    def gauss_identity():
        b = discretize(ShapeSpec.ellipse(2.0, 1.0), 128)
        A = assemble(b).matrix
        err = np.max(np.abs(b.weights @ A - 0.5 * b.weights))
        return err <= 1e-8, f"weighted-row error {err:.2e}"

    def lift_oracle():
        rng = np.random.default_rng(0)
        worst = 0.0
        for _ in range(20):
            d = int(rng.integers(1, 6))
            A = rng.uniform(-2, 2, (2, 2))
            B = rng.uniform(-2, 2, (2, 2))
            diff = lift(A @ B, d).matrix - lift(A, d).matrix @ lift(B, d).matrix
            scale = 1 + np.max(np.abs(lift(A @ B, d).matrix))
            worst = max(worst, float(np.max(np.abs(diff)) / scale))
        return worst <= 1e-12, f"multiplicativity error {worst:.2e}"

    def push_forward_invariance():
        rng = np.random.default_rng(1)
        worst = 0.0
        for _ in range(20):
            p = Poly2(3, rng.uniform(-2, 2, 10))
            T = Similarity(float(rng.uniform(0.5, 2)), float(rng.uniform(0, 6.28)))
            x = rng.uniform(-1.5, 1.5, 2)
            worst = max(worst, abs(float(push_forward(p, T)(T(x)) - p(x))))
        return worst <= 1e-9, f"eval error {worst:.2e}"

    checks = [
        ("disk-gpt-analytic", disk_gpt),
        ("circle-npo-identities", circle_identities),
        ("gauss-weighted-row", gauss_identity),
        ("lift-multiplicative", lift_oracle),
        ("push-forward-invariance", push_forward_invariance),
    ]
    if quick:
        return checks

    def ellipse_pt():
        b = discretize(ShapeSpec.ellipse(2.0, 1.0), 512)
        M = assemble_gpt(b, assemble(b), 1.5, 1, row_degree=1)
        k = (2 * 1.5 + 1) / (2 * 1.5 - 1)
        want = (k - 1) * np.pi * 2 * 1 * (2 + 1) / (2 + k * 1)
        err = abs(M.entry((1, 0), (1, 0)) - want) / abs(want)
        return err <= 1e-6, f"relative error {err:.2e}"

    def traced_circle():
        from .geometry import trace_implicit
        p = Poly2.from_terms({(2, 0): 1.0, (0, 2): 1.0, (0, 0): -1.0})
        b = trace_implicit(p, box=(-2, 2, -2, 2), n=256)
        ea = abs(b.area() - np.pi)
        ep = abs(b.perimeter() - 2 * np.pi)
        return ea <= 1e-4 and ep <= 1e-4, f"area err {ea:.2e}, perim err {ep:.2e}"

    def far_field_check():
        from .gpt import far_field
        b = discretize(ShapeSpec.disk(), 256)
        npo = assemble(b)
        h = Poly2.from_terms({(1, 0): 1.0})
        out = far_field(b, npo, 1.5, h, (5.0, 0.0), truncation=4)
        err = abs(out.expansion - out.direct)
        return err <= 1e-6, f"expansion vs direct {err:.2e}"

    def ellipse_recovery():
        b = discretize(ShapeSpec.ellipse(2.0, 1.0), 512)
        out = recover(assemble_gpt(b, assemble(b), 1.5, 2))
        err = np.max(np.abs(out.g_hat.coeffs - np.array([-4, 0, 0, 4, 0, 1])))
        return err <= 1e-6, f"coefficient error {err:.2e}"

    def lambda_fit():
        b = discretize(ShapeSpec.disk(), 128)
        npo = assemble(b)
        M = assemble_gpt(b, npo, 1.5, 2)
        est = estimate_lambda(M, b, [0.75, 1.0, 1.25, 1.5, 2.0, 3.0], npo=npo)
        err = abs(est.lam - 1.5)
        return err <= 1e-4, f"lambda error {err:.2e}"

    return checks + [
        ("ellipse-first-order-pt", ellipse_pt),
        ("traced-circle-identities", traced_circle),
        ("far-field-two-routes", far_field_check),
        ("ellipse-recovery", ellipse_recovery),
        ("lambda-estimate", lambda_fit),
    ]


def cmd_verify(args) -> int:
    failures = 0
    for name, check in _verify_checks(args.quick, args.corrupt_diagonal):
        try:
            ok, detail = check()
        except GptShapeError as exc:
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        print(f"{'ok  ' if ok else 'FAIL'} {name:<28} {detail}")
        failures += 0 if ok else 1
    if failures:
        print(f"{failures} check(s) failed")
        return EXIT_NUMERIC
    print("all checks passed")
    return EXIT_OK


# parser --------------------------------------------------------------------


def _add_shape_args(sub):
    sub.add_argument("--shape", help="shape DSL, e.g. disk, ellipse:2,1, "
                     "flower:1,0.3,5, triangle, lemniscate:1,0,-1,0,0.2")
    sub.add_argument("--shape-file", help="path to a ShapeSpec JSON file")
    sub.add_argument("--n", type=int, default=512,
                     help="boundary nodes (default 512)")
    sub.add_argument("--lambda", dest="lam", type=float, default=None,
                     help="spectral parameter, |lambda| > 1/2 (default 1.5)")
    sub.add_argument("--k", type=float, default=None,
                     help="conductivity contrast instead of --lambda")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gptshape",
                     description="generalized polarization tensors, boundary "
                                 "polynomial recovery, and shape matching")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("gpt", help="assemble a GPT matrix for a shape")
    _add_shape_args(p)
    p.add_argument("--d", type=int, required=True, help="column degree bound")
    p.add_argument("--row-degree", type=int, default=None,
                   help="row degree bound (default 2*d)")
    p.add_argument("--dump-npo", default=None,
                   help="also dump the boundary operator matrix (binary)")
    p.add_argument("--out", default="-", help="output JSON path (default stdout)")
    p.set_defaults(func=cmd_gpt)

    p = sub.add_parser("recover", help="recover the boundary polynomial")
    p.add_argument("--gpt", required=True, help="GptMatrix JSON from `gpt`")
    p.add_argument("--cross-lambda", type=float, default=None,
                   help="cross-validate at a second lambda (needs shape metadata)")
    p.add_argument("--scan-degrees", type=int, default=None, metavar="DMAX",
                   help="scan degrees 1..DMAX instead of recovering once")
    p.add_argument("--reduce-degree", action="store_true",
                   help="on an ambiguous kernel, drop to the smallest column "
                        "degree that still has one (e.g. polygons)")
    p.add_argument("--force", action="store_true",
                   help="write the result even if the kernel is ambiguous")
    p.add_argument("--out", default="-", help="output JSON path (default stdout)")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("scan-degrees",
                       help="residual and kernel gap for d = 1..DMAX")
    _add_shape_args(p)
    p.add_argument("--dmax", type=int, required=True)
    p.add_argument("--out", default=None, help="optional JSON output path")
    p.set_defaults(func=cmd_scan_degrees)

    p = sub.add_parser("match", help="match an observed polynomial to a reference")
    p.add_argument("--ref", required=True, help="reference Poly2 or recovery JSON")
    p.add_argument("--obs", required=True, help="observed Poly2 or recovery JSON")
    p.add_argument("--threshold", type=float, default=0.01,
                   help="epsilon threshold declaring a match (default 0.01)")
    p.add_argument("--allow-reflection", action="store_true",
                   help="extend the search to orientation-reversing maps")
    p.add_argument("--out", default="-", help="output JSON path (default stdout)")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("render", help="export level-set curves to SVG")
    p.add_argument("--poly", required=True, help="Poly2 or recovery JSON file")
    p.add_argument("--box", default="-4,4,-4,4",
                   help="xmin,xmax,ymin,ymax (default -4,4,-4,4)")
    p.add_argument("--grid", type=int, default=512, help="samples per axis")
    p.add_argument("--level", type=float, default=0.0, help="level set value")
    p.add_argument("--overlay", default=None,
                   help="boundary CSV drawn under the curves")
    p.add_argument("--csv", default=None, help="also write vertices as CSV")
    p.add_argument("--out", required=True, help="output SVG path")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("verify", help="run the built-in oracle suite")
    p.add_argument("--quick", action="store_true", help="fast subset only")
    p.add_argument("--corrupt-diagonal", action="store_true",
                   help=argparse.SUPPRESS)  # failure-injection hook for tests
    p.set_defaults(func=cmd_verify)

    return parser


def _normalize_argv(argv):
    """Join '--box -4,4,-4,4' into '--box=-4,4,-4,4' so argparse does not
    mistake the negative coordinate list for an option."""
    out = []
    i = 0
    while i < len(argv):
        arg = argv[i]
        if (arg == "--box" and i + 1 < len(argv)
                and argv[i + 1].startswith("-") and "," in argv[i + 1]):
            out.append(f"{arg}={argv[i + 1]}")
            i += 2
        else:
            out.append(arg)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_normalize_argv(list(argv)))
    if not hasattr(args, "func"):
        parser.print_help()
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
