"""Level-set extraction and plotting for recovered polynomials.

This is the diagnostic tier: marching squares with linear edge
interpolation, no Newton polishing (the quadrature-grade tracer lives in
:mod:`gptshape.geometry`).  Vertices land within a cell of the true curve,
which is plenty for the visual comparisons the SVG export serves.  Open
polylines run into the clipping box and are styled differently — a zero
set with unbounded components is exactly what a failed or truncated
recovery looks like, so the distinction is worth a glance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._marching import marching_squares
from .errors import EmptyInputError, EmptyLevelSetError, TooCoarseError
from .polynomial import Poly2

DEFAULT_BOX = (-4.0, 4.0, -4.0, 4.0)
DEFAULT_GRID = 512
MIN_GRID = 32


@dataclass(frozen=True)
class LevelSetCurves:
    """Polylines approximating one level set of a polynomial."""

    polylines: tuple
    closed: tuple
    box: tuple
    level: float = 0.0

    def __post_init__(self):
        if len(self.polylines) != len(self.closed):
            raise ValueError("need one closed flag per polyline")
        frozen = []
        for pl in self.polylines:
            pl = np.array(pl, dtype=float, copy=True)
            if pl.ndim != 2 or pl.shape[1] != 2 or pl.shape[0] < 2:
                raise ValueError("each polyline must be an (m>=2, 2) array")
            pl.setflags(write=False)
            frozen.append(pl)
        object.__setattr__(self, "polylines", tuple(frozen))
        object.__setattr__(self, "closed", tuple(bool(c) for c in self.closed))
        object.__setattr__(self, "box", tuple(float(v) for v in self.box))

    @property
    def n_components(self) -> int:
        return len(self.polylines)

    def points(self) -> np.ndarray:
        """All vertices stacked, for distance computations."""
        return np.vstack(self.polylines)

    def save_csv(self, path) -> None:
        lines = ["component,x,y"]
        for ci, pl in enumerate(self.polylines):
            for x, y in pl:
                lines.append(f"{ci},{x:.17g},{y:.17g}")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def extract(p: Poly2, box=DEFAULT_BOX, grid: int = DEFAULT_GRID,
            level: float = 0.0) -> LevelSetCurves:
    """Marching-squares extraction of ``{p = level}`` inside ``box``.

    Saddle cells are resolved by evaluating ``p`` at the cell center.
    Polylines that end on the box boundary are reported open (their
    component is unbounded or clipped).
    """
    if grid < MIN_GRID:
        raise TooCoarseError(f"grid must be at least {MIN_GRID}, got {grid}")
    xmin, xmax, ymin, ymax = map(float, box)
    if not (xmin < xmax and ymin < ymax):
        raise ValueError(f"degenerate box {box}")
    xs = np.linspace(xmin, xmax, grid)
    ys = np.linspace(ymin, ymax, grid)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    values = p(np.stack([X, Y], axis=-1))

    def center(x, y):
        return float(p(np.array([x, y]))) - level

    chains = marching_squares(values, xs, ys, level, center)
    if not chains:
        raise EmptyLevelSetError(
            f"level set {{p = {level}}} does not cross the box {box} "
            f"at grid {grid}"
        )
    polylines = [np.asarray(pl) for pl, _ in chains]
    closed = [c for _, c in chains]
    return LevelSetCurves(tuple(polylines), tuple(closed), (xmin, xmax, ymin, ymax),
                          float(level))


def hausdorff(a, b, chunk: int = 1024) -> float:
    """Symmetric Hausdorff distance between two finite point sets."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise EmptyInputError("hausdorff distance needs two nonempty point sets")

    def directed(p, q):
        worst = 0.0
        for i in range(0, len(p), chunk):
            block = p[i:i + chunk]
            d2 = ((block[:, None, :] - q[None, :, :]) ** 2).sum(axis=2)
            worst = max(worst, float(np.sqrt(d2.min(axis=1).max())))
        return worst

    return max(directed(a, b), directed(b, a))


# SVG export ----------------------------------------------------------------

_CANVAS = 640.0
_MARGIN = 40.0

_STYLE_CLOSED = 'fill="none" stroke="#1f6fb2" stroke-width="1.6"'
_STYLE_OPEN = 'fill="none" stroke="#d4762c" stroke-width="1.4" stroke-dasharray="6,4"'
_STYLE_SOURCE = 'fill="none" stroke="#4a9d4a" stroke-width="1.2" stroke-dasharray="2,3"'
_STYLE_AXIS = 'stroke="#b0b0b0" stroke-width="0.8"'
_STYLE_FRAME = 'fill="none" stroke="#404040" stroke-width="1.0"'


def _mapper(box):
    xmin, xmax, ymin, ymax = box
    span = max(xmax - xmin, ymax - ymin)
    scale = (_CANVAS - 2 * _MARGIN) / span

    def to_px(x, y):
        # svg y axis points down
        px = _MARGIN + (x - xmin) * scale
        py = _CANVAS - _MARGIN - (y - ymin) * scale
        return px, py

    return to_px


def _path(points, to_px, closed):
    cmds = []
    for i, (x, y) in enumerate(points):
        px, py = to_px(x, y)
        cmds.append(f"{'M' if i == 0 else 'L'} {px:.3f} {py:.3f}")
    if closed:
        cmds.append("Z")
    return " ".join(cmds)


def export_svg(curves: LevelSetCurves, path, overlays=None) -> None:
    """Write a standalone SVG of the curves, deterministic byte-for-byte.

    ``overlays`` takes an optional sequence of (m, 2) point arrays (for
    example a source boundary's nodes) drawn in a distinct style under the
    extracted curves.
    """
    to_px = _mapper(curves.box)
    xmin, xmax, ymin, ymax = curves.box
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_CANVAS:.0f}" '
        f'height="{_CANVAS:.0f}" viewBox="0 0 {_CANVAS:.0f} {_CANVAS:.0f}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    fx0, fy0 = to_px(xmin, ymax)
    fx1, fy1 = to_px(xmax, ymin)
    parts.append(
        f'<rect x="{fx0:.3f}" y="{fy0:.3f}" width="{fx1 - fx0:.3f}" '
        f'height="{fy1 - fy0:.3f}" {_STYLE_FRAME}/>'
    )
    if xmin < 0 < xmax:
        (ax0, ay0), (ax1, ay1) = to_px(0, ymin), to_px(0, ymax)
        parts.append(
            f'<line x1="{ax0:.3f}" y1="{ay0:.3f}" x2="{ax1:.3f}" '
            f'y2="{ay1:.3f}" {_STYLE_AXIS}/>'
        )
    if ymin < 0 < ymax:
        (ax0, ay0), (ax1, ay1) = to_px(xmin, 0), to_px(xmax, 0)
        parts.append(
            f'<line x1="{ax0:.3f}" y1="{ay0:.3f}" x2="{ax1:.3f}" '
            f'y2="{ay1:.3f}" {_STYLE_AXIS}/>'
        )
    for pts in overlays or ():
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        parts.append(f'<path d="{_path(pts, to_px, True)}" {_STYLE_SOURCE}/>')
    for pl, closed in zip(curves.polylines, curves.closed):
        style = _STYLE_CLOSED if closed else _STYLE_OPEN
        parts.append(f'<path d="{_path(pl, to_px, closed)}" {style}/>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
