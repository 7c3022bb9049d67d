"""Recover one polynomial from a boundary with two separate components.

The sextic g = (x1^3 - x1)(x2^3 - x2) vanishes on a 3x3 grid of lines;
its +0.1 level set has exactly two bounded ovals (in the two cells of
the grid where g is positive and peaks above the level) plus unbounded
branches outside the unit square.  This script renders the levels -0.1,
0, and +0.1, discretizes the two ovals together as one two-component
boundary, computes its GPT matrix, and recovers the minimal vanishing
polynomial from the kernel.

The punchline is the last SVG: the recovery sees only the algebraic
curve the samples lie on, not which of its components were sampled, so
the recovered zero set reproduces the two ovals *and* the unbounded
branches that were never discretized.

Two small ovals are also a nice conditioning study.  A second sextic
exists that is ~1e-7 from vanishing on both of them, so the kernel gap
of the GPT matrix is ~1e-5 instead of the usual machine-precision
cliff, and the smallest singular vector picks up a ~1e-7 admixture of
that near-vanishing direction.  The *curve* is unaffected (the zero
set moves by the same ~1e-7), but a coefficient at an index where the
true polynomial has none can end up just above the default pivot
threshold of ``normalize``; the script therefore passes a pivot
threshold matched to its noise floor and reports scale-free errors.

Writes one SVG per level, the recovered-curve SVG with the sampled
ovals overlaid, and a JSON summary into --out.
"""

import argparse
import json
import pathlib

import numpy as np

from gptshape.geometry import trace_implicit
from gptshape.gpt import assemble_gpt
from gptshape.npo import assemble
from gptshape.polynomial import Poly2
from gptshape.recovery import normalize, recover
from gptshape.render import export_svg, extract


def product_cubic() -> Poly2:
    f1 = Poly2.from_terms({(3, 0): 1.0, (1, 0): -1.0})
    f2 = Poly2.from_terms({(0, 3): 1.0, (0, 1): -1.0})
    return f1 * f2


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=400, help="nodes per oval")
    ap.add_argument("--lam", type=float, default=1.5)
    ap.add_argument("--grid", type=int, default=768)
    ap.add_argument("--level", type=float, default=0.1)
    ap.add_argument("--out", default="out/nonconnected")
    args = ap.parse_args()

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    g = product_cubic()
    wide = (-1.6, 1.6, -1.6, 1.6)
    for tag, level in (("minus", -args.level), ("zero", 0.0),
                       ("plus", args.level)):
        curves = extract(g, box=wide, grid=args.grid, level=level)
        export_svg(curves, out / f"level_{tag}.svg")
        closed = sum(curves.closed)
        print(f"level {level:+.2f}: {len(curves.polylines)} polylines "
              f"({closed} closed) -> level_{tag}.svg")

    # The ovals live strictly inside the unit square, and on a slightly
    # larger box no unbounded branch of {g = level} intrudes yet, so the
    # trace returns exactly the two closed components.
    shifted = g - Poly2.from_terms({(0, 0): args.level})
    b = trace_implicit(shifted, box=(-1.1, 1.1, -1.1, 1.1),
                       grid=args.grid, n=args.n)
    if b.n_components != 2:
        raise SystemExit(f"expected the two ovals, traced {b.n_components} "
                         "components")
    print(f"traced both ovals: {b.n} nodes, perimeter {b.perimeter():.6f}, "
          f"area {b.area():.6f}")

    # eps_nz = 1e-6: keep the pivot off the ~1e-7 near-kernel admixture
    # (see the module docstring); the default 1e-8 threshold can latch
    # onto a noise coefficient here and wreck the normalization scale.
    M = assemble_gpt(b, assemble(b), args.lam, shifted.degree)
    res = recover(M, eps_nz=1e-6)
    want = normalize(shifted)
    err = float(np.max(np.abs(res.g_hat.coeffs - want.coeffs)))
    hu = shifted.coeffs / np.linalg.norm(shifted.coeffs)
    vu = res.g_hat.coeffs / np.linalg.norm(res.g_hat.coeffs)
    if float(np.dot(hu, vu)) < 0.0:
        vu = -vu
    unit_err = float(np.max(np.abs(hu - vu)))
    dist = np.abs(res.g_hat(b.nodes)) / np.linalg.norm(
        res.g_hat.gradient(b.nodes), axis=1)
    print(f"recovery: residual {res.residual:.3e}, gap {res.kernel_gap:.3e}, "
          f"flags {list(res.flags)}")
    print(f"coeff linf error vs the shifted sextic: {err:.3e} normalized, "
          f"{unit_err:.3e} as unit vectors")
    print(f"recovered curve passes within {dist.max():.3e} of every node")

    render_box = (-2.0, 2.0, -2.0, 2.0)
    curves = extract(res.g_hat, box=render_box, grid=1024)
    overlays = [b.nodes[b.component_id == i] for i in range(2)]
    export_svg(curves, out / "recovered.svg", overlays=overlays)
    n_open = sum(1 for c in curves.closed if not c)
    print(f"recovered zero set on {render_box}: {len(curves.polylines)} "
          f"polylines, {n_open} of them unbounded -> recovered.svg")

    summary = {
        "polynomial": "(x1^3 - x1)(x2^3 - x2)",
        "level": args.level,
        "nodes_per_oval": args.n,
        "lambda": args.lam,
        "residual": res.residual,
        "kernel_gap": res.kernel_gap,
        "coeff_linf_error": err,
        "coeff_linf_error_unit": unit_err,
        "max_node_to_curve_distance": float(dist.max()),
        "recovered": res.g_hat.to_json(),
        "unbounded_polylines_in_render": n_open,
    }
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    print(f"artifacts in {out}/")


if __name__ == "__main__":
    main()
