"""Generalized polarization tensors (GPTs) and their far-field meaning.

For a domain D with conductivity contrast k != 1, set

    lambda = (k + 1) / (2 (k - 1)),

which satisfies |lambda| >= 1/2 exactly when k >= 0.  The GPT indexed by
multi-indices (alpha, beta) is

    M[alpha, beta] = integral over the boundary of
                     y^beta * ((lambda I - K*)^{-1} [nu . grad x^alpha])(y)

The rectangular matrix with rows 1 <= |alpha| <= row_degree and columns
0 <= |beta| <= d packs these moments; the row alpha = (0, 0) is omitted
because its Neumann data vanishes identically.  Harmonic combinations of
GPTs are the physically meaningful quantities, and the leading-order
perturbation of a harmonic background field h outside D is a multipole
series in derivatives of the log kernel weighted by GPT entries, which
:func:`far_field` evaluates and cross-checks against a direct single-layer
computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NoContrastError, NotHarmonicError, TooCloseError
from .geometry import DiscretizedBoundary
from .npo import NpoMatrix, Resolvent, neumann_data
from .polynomial import Poly2, laplacian, multiindex_at, ordinal, poly_dim

_HARMONIC_TOL = 1e-10


def lambda_of_k(k) -> float:
    """Spectral parameter for a conductivity contrast; k may be math.inf."""
    if k == math.inf:
        return 0.5
    if k == 1:
        raise NoContrastError("contrast k = 1 is the background itself")
    return (k + 1.0) / (2.0 * (k - 1.0))


def k_of_lambda(lam) -> float:
    """Inverse of :func:`lambda_of_k`; lambda = 1/2 maps back to infinity."""
    if lam == 0.5:
        return math.inf
    return (2.0 * lam + 1.0) / (2.0 * lam - 1.0)


@dataclass(frozen=True)
class Contrast:
    """Conductivity contrast and its spectral parameter, kept consistent."""

    k: float
    lam: float

    @classmethod
    def from_k(cls, k):
        return cls(float(k) if k != math.inf else math.inf, lambda_of_k(k))

    @classmethod
    def from_lambda(cls, lam):
        return cls(k_of_lambda(lam), float(lam))


def _row_alphas(row_degree: int):
    return [multiindex_at(i) for i in range(1, poly_dim(row_degree))]


def _col_betas(d: int):
    return [multiindex_at(i) for i in range(poly_dim(d))]


@dataclass(frozen=True)
class GptMatrix:
    """GPT moments for one boundary and one spectral parameter.

    ``entries[r, c]`` is M[row_alphas[r], col_betas[c]].  Columns follow
    the graded lex order of multi-indices up to degree d, so a column
    combination with a Poly2 coefficient vector is a plain matrix-vector
    product.
    """

    lam: float
    d: int
    row_degree: int
    entries: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        e = np.asarray(self.entries)
        e = e.astype(complex if np.iscomplexobj(e) else float)
        want = (poly_dim(self.row_degree) - 1, poly_dim(self.d))
        if e.shape != want:
            raise ValueError(f"entries must have shape {want}, got {e.shape}")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def row_alphas(self):
        return _row_alphas(self.row_degree)

    @property
    def col_betas(self):
        return _col_betas(self.d)

    def entry(self, alpha, beta):
        return self.entries[ordinal(alpha) - 1, ordinal(beta)]

    def to_json(self) -> dict:
        if np.iscomplexobj(self.entries):
            raise ValueError("complex-lambda matrices are not JSON-serializable")
        obj = {
            "schema": 1,
            "lambda": float(self.lam),
            "d": int(self.d),
            "row_degree": int(self.row_degree),
            "row_alphas": [list(a) for a in self.row_alphas],
            "col_betas": [list(b) for b in self.col_betas],
            "entries": [float(v) for v in self.entries.reshape(-1)],
        }
        if self.meta:
            obj["meta"] = self.meta
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "GptMatrix":
        d = int(obj["d"])
        row_degree = int(obj.get("row_degree", 2 * d))
        entries = np.asarray(obj["entries"], dtype=float).reshape(
            poly_dim(row_degree) - 1, poly_dim(d))
        return cls(float(obj["lambda"]), d, row_degree, entries,
                   dict(obj.get("meta", {})))


def assemble_gpt(b: DiscretizedBoundary, npo: NpoMatrix, lam, d: int,
                 row_degree: int | None = None) -> GptMatrix:
    """Compute the GPT matrix of a boundary at one spectral parameter.

    Rows span 1 <= |alpha| <= row_degree (default 2 d, which makes any
    polynomial vanishing on the boundary a null vector of the matrix);
    columns span 0 <= |beta| <= d including the constant.
    """
    if d < 1:
        raise ValueError(f"column degree must be >= 1, got {d}")
    if row_degree is None:
        row_degree = 2 * d
    if row_degree < 1:
        raise ValueError(f"row degree must be >= 1, got {row_degree}")
    res = Resolvent(npo, lam)
    alphas = _row_alphas(row_degree)
    betas = _col_betas(d)
    rhs = np.column_stack([neumann_data(b, a) for a in alphas])
    densities = res.apply(rhs)  # one column per alpha
    x1, x2 = b.nodes[:, 0], b.nodes[:, 1]
    moments = np.stack([b.weights * x1**b1 * x2**b2 for b1, b2 in betas])
    entries = (moments @ densities).T  # (rows, cols)
    return GptMatrix(res.lam, d, row_degree, entries)


def harmonic_combination(M: GptMatrix, a: Poly2, b: Poly2) -> float:
    """Contract the GPT matrix with two harmonic polynomials.

    ``a`` runs over the rows (its constant term has zero Neumann data and
    contributes nothing), ``b`` over the columns.  Raises NotHarmonic when
    either polynomial fails the coefficient Laplacian test.
    """
    for name, p, bound in (("a", a, M.row_degree), ("b", b, M.d)):
        lap = laplacian(p)
        scale = max(1.0, float(np.max(np.abs(p.coeffs))))
        if np.max(np.abs(lap.coeffs)) > _HARMONIC_TOL * scale:
            raise NotHarmonicError(f"polynomial {name} is not harmonic")
        if p.degree > bound:
            raise ValueError(f"degree of {name} exceeds the matrix index range")
    avec = np.zeros(poly_dim(M.row_degree))
    avec[: a.coeffs.size] = a.coeffs
    bvec = np.zeros(poly_dim(M.d))
    bvec[: b.coeffs.size] = b.coeffs
    total = avec[1:] @ M.entries @ bvec
    return complex(total) if np.iscomplexobj(M.entries) else float(total)


@dataclass(frozen=True)
class FarFieldResult:
    """Multipole-expansion value and the direct layer-potential value."""

    expansion: float
    direct: float


def _log_kernel_derivative(alpha, x) -> float:
    """d^alpha of Gamma(x) = log|x| / (2 pi), via the holomorphic log."""
    a1, a2 = alpha
    m = a1 + a2
    z = complex(x[0], x[1])
    val = (1j**a2) * ((-1.0) ** (m - 1)) * math.factorial(m - 1) / z**m
    return float(val.real) / (2.0 * np.pi)


def far_field(b: DiscretizedBoundary, npo: NpoMatrix, lam, h: Poly2, x,
              truncation: int = 4) -> FarFieldResult:
    """Perturbation u(x) - h(x) far away from the inclusion.

    The expansion sums (-1)^|alpha| / (alpha! beta!) d^alpha Gamma(x)
    M[alpha, beta] d^beta h(0) over 1 <= |alpha| <= truncation and
    1 <= |beta| <= deg h.  The direct value evaluates the single layer
    potential of the resolved Neumann density of h at x, which involves
    none of the moment machinery and serves as a cross-check.
    """
    lap = laplacian(h)
    if np.max(np.abs(lap.coeffs)) > _HARMONIC_TOL * max(1.0, float(np.max(np.abs(h.coeffs)))):
        raise NotHarmonicError("background field h must be harmonic")
    x = np.asarray(x, dtype=float)
    radius = float(np.max(np.hypot(b.nodes[:, 0], b.nodes[:, 1])))
    if np.hypot(*x) < 3.0 * radius:
        raise TooCloseError(
            f"|x| = {np.hypot(*x):.3g} is inside 3x the boundary radius {radius:.3g}")

    M = assemble_gpt(b, npo, lam, d=max(h.degree, 1), row_degree=max(truncation, 1))
    expansion = 0.0
    for r, alpha in enumerate(M.row_alphas):
        a1, a2 = alpha
        dgamma = _log_kernel_derivative(alpha, x)
        sign = (-1.0) ** (a1 + a2)
        for c, beta in enumerate(M.col_betas):
            b1, b2 = beta
            if b1 + b2 == 0 or b1 + b2 > h.degree:
                continue
            coeff = h.coeffs[ordinal(beta)]
            if coeff == 0.0:
                continue
            dh0 = coeff * math.factorial(b1) * math.factorial(b2)
            expansion += (sign / (math.factorial(a1) * math.factorial(a2)
                                  * math.factorial(b1) * math.factorial(b2))
                          * dgamma * M.entries[r, c] * dh0)

    # direct route: u - h = S[(lambda I - K*)^{-1} (dh/dnu)]
    dnu_h = np.sum(b.normals * h.gradient(b.nodes), axis=1)
    phi = Resolvent(npo, lam).apply(dnu_h)
    dist = np.hypot(b.nodes[:, 0] - x[0], b.nodes[:, 1] - x[1])
    direct = float(np.sum(b.weights * np.log(dist) * phi) / (2.0 * np.pi))
    return FarFieldResult(float(expansion), direct)
