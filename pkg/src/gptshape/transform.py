"""Similarity transforms on polynomials and shape matching.

A similarity ``A = s R(theta)`` acts on the degree-``d`` monomial vector
``x_[d] = (x1^d, x1^{d-1} x2, ..., x2^d)`` through a lifted matrix
``A_[d]`` of size ``(d+1) x (d+1)``: row ``h`` of ``A_[d]`` holds the
coefficients of ``(a11 x1 + a12 x2)^{d-h} (a21 x1 + a22 x2)^h`` in the
same descending-power basis.  The lift is multiplicative, so transforming
a polynomial's zero set amounts to multiplying each homogeneous block by
the lift of the *inverse* matrix.

Matching asks the reverse question: which similarity carries a reference
zero set onto an observed one?  The objective compares unit-normalized
coefficient vectors,

    J(s, theta) = min over sign ||sign * obs_hat - push(s, theta)_hat||^2
                = 2 - 2 |<obs_hat, push(s, theta)_hat>|,

scanned on a coarse (theta, scale) grid and polished with Nelder-Mead in
(log s, theta).  Normalizing both sides makes the argmin invariant to any
rescaling of either polynomial; the sign branch absorbs the direction
ambiguity a singular-vector recovery leaves behind.  Shapes with discrete
rotational symmetry produce several equally good minima; all grid minima
within a factor of the best are refined and reported as alternates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import DegreeMismatchError, UnboundedInputError, ZeroPolynomialError
from .polynomial import (
    Boundedness,
    FormBlocks,
    Poly2,
    boundedness_check,
    from_forms,
    to_forms,
)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Similarity:
    """Rotation by ``theta`` composed with scaling by ``s > 0``."""

    s: float
    theta: float

    def __post_init__(self):
        if not (self.s > 0 and np.isfinite(self.s)):
            raise ValueError(f"scale must be positive and finite, got {self.s}")
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)

    @property
    def matrix(self) -> np.ndarray:
        c, sn = math.cos(self.theta), math.sin(self.theta)
        return self.s * np.array([[c, -sn], [sn, c]])

    def inverse(self) -> "Similarity":
        return Similarity(1.0 / self.s, -self.theta)

    def __call__(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return pts @ self.matrix.T


@dataclass(frozen=True)
class LiftedTransform:
    """Action of a 2x2 matrix on degree-``d`` form coefficients."""

    degree: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float, copy=True)
        if m.shape != (self.degree + 1, self.degree + 1):
            raise ValueError(
                f"lift of degree {self.degree} must be "
                f"{self.degree + 1}x{self.degree + 1}, got {m.shape}"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def lift(A, d: int) -> LiftedTransform:
    """Lift a 2x2 matrix to its action on degree-``d`` monomials.

    Row ``h`` expands ``(a11 x1 + a12 x2)^{d-h} (a21 x1 + a22 x2)^h`` by the
    binomial theorem; the two coefficient sequences are convolved to give
    the row in the basis ``x1^d, x1^{d-1} x2, ..., x2^d``.
    """
    if d < 0:
        raise ValueError(f"degree must be >= 0, got {d}")
    A = np.asarray(A, dtype=float)
    if A.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {A.shape}")
    rows = np.empty((d + 1, d + 1))
    for h in range(d + 1):
        top = np.array([
            math.comb(d - h, j) * A[0, 0] ** (d - h - j) * A[0, 1] ** j
            for j in range(d - h + 1)
        ])
        bot = np.array([
            math.comb(h, j) * A[1, 0] ** (h - j) * A[1, 1] ** j
            for j in range(h + 1)
        ])
        rows[h] = np.convolve(top, bot)
    return LiftedTransform(d, rows)


def _push_forward_matrix(p: Poly2, A: np.ndarray) -> Poly2:
    """Polynomial vanishing on ``A``-image of ``{p = 0}`` (A invertible)."""
    Ainv = np.linalg.inv(A)
    forms = to_forms(p)
    blocks = [b @ lift(Ainv, j).matrix for j, b in enumerate(forms.blocks)]
    return from_forms(FormBlocks(p.degree, tuple(blocks)))


def push_forward(p: Poly2, T: Similarity) -> Poly2:
    """Polynomial whose zero set is ``T`` applied to the zero set of ``p``."""
    return _push_forward_matrix(p, T.matrix)


# matching ----------------------------------------------------------------


@dataclass(frozen=True)
class MatchOptions:
    """Search controls for :func:`match`."""

    n_theta: int = 180
    n_scale: int = 40
    scale_min: float = 0.1
    scale_max: float = 10.0
    threshold: float = 0.01
    allow_reflection: bool = False
    alternates_factor: float = 1.5
    max_candidates: int = 16
    refine_maxiter: int = 500
    refine_xatol: float = 1e-10
    keep_curve: bool = False


@dataclass(frozen=True)
class MatchResult:
    """Best similarity carrying the reference onto the observation."""

    best: Similarity
    epsilon_match: float
    sign: int
    alternates: tuple = ()
    reflected: bool = False
    matched: bool = True
    objective_curve: np.ndarray | None = None

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "s": float(self.best.s),
            "theta": float(self.best.theta),
            "sign": int(self.sign),
            "epsilon_match": float(self.epsilon_match),
            "reflected": bool(self.reflected),
            "matched": bool(self.matched),
            "alternates": [
                {"s": float(t.s), "theta": float(t.theta), "eps": float(e)}
                for t, e in self.alternates
            ],
        }


def _blocks_unit(p: Poly2):
    forms = to_forms(p)
    norm = math.sqrt(sum(float(b @ b) for b in forms.blocks))
    if norm == 0.0:
        raise ZeroPolynomialError("cannot match the zero polynomial")
    return [np.asarray(b) / norm for b in forms.blocks]


def _rotation(theta: float, reflected: bool) -> np.ndarray:
    c, sn = math.cos(theta), math.sin(theta)
    R = np.array([[c, -sn], [sn, c]])
    if reflected:
        R = R @ np.array([[1.0, 0.0], [0.0, -1.0]])
    return R


def _grid_objective(ref_blocks, obs_blocks, thetas, scales, reflected):
    """J on the (theta, scale) grid, exploiting lift(sB, j) = s^j lift(B, j)."""
    d = len(ref_blocks) - 1
    js = np.arange(d + 1)
    spow = scales[None, :] ** (-js[:, None])  # s^{-j}, shape (d+1, n_scale)
    J = np.empty((len(thetas), len(scales)))
    for it, theta in enumerate(thetas):
        B = _rotation(-theta, reflected)  # inverse rotation; reflection is its own inverse
        a = np.empty(d + 1)
        b = np.empty(d + 1)
        for j in range(d + 1):
            v = ref_blocks[j] @ lift(B, j).matrix
            a[j] = obs_blocks[j] @ v
            b[j] = v @ v
        num = a @ spow
        den = np.sqrt(b @ spow**2)
        J[it] = 2.0 - 2.0 * np.abs(num) / den
    return np.maximum(J, 0.0)


def _objective(ref: Poly2, obs_unit: np.ndarray, logs: float, theta: float,
               reflected: bool) -> float:
    A = math.exp(logs) * _rotation(theta, reflected)
    v = _push_forward_matrix(ref, A).coeffs
    nv = np.linalg.norm(v)
    return max(2.0 - 2.0 * abs(float(obs_unit @ v)) / nv, 0.0)


def _refine(ref, obs_unit, logs0, theta0, reflected, opts):
    res = minimize(
        lambda x: _objective(ref, obs_unit, x[0], x[1], reflected),
        x0=[logs0, theta0],
        method="Nelder-Mead",
        options={
            "xatol": opts.refine_xatol,
            "fatol": 1e-15,
            "maxiter": opts.refine_maxiter,
        },
    )
    return float(res.x[0]), float(res.x[1]), float(res.fun)


def _local_minima(J):
    """Grid cells no worse than their 8 neighbors (theta wraps, scale clamps)."""
    nt, ns = J.shape
    up = np.roll(J, 1, axis=0)
    down = np.roll(J, -1, axis=0)
    pads = np.full((nt, 1), np.inf)
    out = []
    for shifted in (
        up, down,
        np.hstack([pads, J[:, :-1]]), np.hstack([J[:, 1:], pads]),
        np.hstack([pads, up[:, :-1]]), np.hstack([up[:, 1:], pads]),
        np.hstack([pads, down[:, :-1]]), np.hstack([down[:, 1:], pads]),
    ):
        out.append(J <= shifted)
    return np.logical_and.reduce(out)


def match(g_ref: Poly2, g_obs: Poly2, opts: MatchOptions | None = None) -> MatchResult:
    """Find the similarity mapping the reference zero set onto the observed one.

    Both inputs are unit-normalized internally, so only the shapes of the
    coefficient vectors matter.  The search runs over rotations and scales
    (plus reflections when ``opts.allow_reflection``), coarse grid first,
    then simplex refinement; ``epsilon_match`` is the square root of the
    final objective.  Grid minima within ``opts.alternates_factor`` of the
    best are refined too and reported as alternates, which is how a shape's
    rotational symmetry group shows up in the output.
    """
    opts = opts or MatchOptions()
    if g_ref.degree != g_obs.degree:
        raise DegreeMismatchError(
            f"degree bounds differ: reference {g_ref.degree}, observed "
            f"{g_obs.degree}; pad the lower one first"
        )
    verdict = boundedness_check(g_obs)
    if verdict is Boundedness.ODD_DEGREE_UNBOUNDED:
        raise UnboundedInputError(
            "observed polynomial has odd effective degree, so its zero set "
            "is unbounded and cannot be a shape boundary"
        )
    ref_blocks = _blocks_unit(g_ref)
    obs_blocks = _blocks_unit(g_obs)
    obs_unit = from_forms(FormBlocks(g_obs.degree, tuple(obs_blocks))).coeffs

    thetas = np.linspace(0.0, TWO_PI, opts.n_theta, endpoint=False)
    scales = np.geomspace(opts.scale_min, opts.scale_max, opts.n_scale)
    branches = (False, True) if opts.allow_reflection else (False,)

    candidates = []  # (J_grid, logs, theta, reflected)
    curve = None
    for reflected in branches:
        J = _grid_objective(ref_blocks, obs_blocks, thetas, scales, reflected)
        if not reflected and opts.keep_curve:
            curve = J
        best_eps = math.sqrt(float(J.min()))
        keep = _local_minima(J) & (
            np.sqrt(J) <= opts.alternates_factor * best_eps + 1e-9
        )
        for it, isc in zip(*np.nonzero(keep)):
            candidates.append(
                (float(J[it, isc]), math.log(scales[isc]), float(thetas[it]), reflected)
            )

    # a rotation-invariant shape turns the whole theta axis into tied grid
    # minima; refine only the best few cells
    candidates = sorted(candidates, key=lambda c: c[0])[: opts.max_candidates]
    refined = []
    for _, logs0, theta0, reflected in candidates:
        logs, theta, J = _refine(g_ref, obs_unit, logs0, theta0, reflected, opts)
        refined.append((J, logs, theta, reflected))

    refined.sort(key=lambda r: r[0])
    unique = []
    for J, logs, theta, reflected in refined:
        dup = False
        for J2, logs2, theta2, refl2 in unique:
            dth = abs(theta - theta2) % TWO_PI
            dth = min(dth, TWO_PI - dth)
            if refl2 == reflected and dth < 1e-6 and abs(logs - logs2) < 1e-6:
                dup = True
                break
        if not dup:
            unique.append((J, logs, theta, reflected))

    J_best, logs_best, theta_best, refl_best = unique[0]
    best = Similarity(math.exp(logs_best), theta_best)
    eps_best = math.sqrt(J_best)

    A = best.matrix @ (np.diag([1.0, -1.0]) if refl_best else np.eye(2))
    v = _push_forward_matrix(g_ref, A).coeffs
    sign = 1 if float(obs_unit @ v) >= 0 else -1

    alternates = tuple(
        (Similarity(math.exp(lg), th), math.sqrt(J))
        for J, lg, th, _ in unique[1:]
        if math.sqrt(J) <= opts.alternates_factor * eps_best + 1e-9
    )
    return MatchResult(
        best=best,
        epsilon_match=eps_best,
        sign=sign,
        alternates=alternates,
        reflected=refl_best,
        matched=eps_best <= opts.threshold,
        objective_curve=curve,
    )
