"""Boundary-polynomial recovery from a GPT matrix.

A polynomial ``g`` that vanishes on the boundary of the inclusion puts the
coefficient vector ``(g_beta)`` in the kernel of the GPT matrix ``M``.  The
recovery step is therefore a smallest-singular-vector computation: take the
full SVD of ``M`` and read the right singular vector of the smallest
singular value back into graded-lex coefficients.

Two diagnostics guard the answer:

* ``kernel_gap = sigma_last / sigma_{last-1}`` — small means the kernel is
  numerically one-dimensional; a large value means either the degree bound
  is wrong or the spectral parameter sits near an exceptional value, and
  the result is flagged ``AmbiguousKernel``.
* ``residual = ||M g|| / (||M||_F ||g||)`` — scale-free misfit of the
  recovered (or any candidate) polynomial.

Because the kernel direction does not depend on the spectral parameter,
:func:`recover_crossvalidated` reruns the recovery at a second lambda and
flags ``LambdaSuspect`` when the two answers disagree.

An ambiguous kernel most often means the declared degree overshoots the
minimal vanishing polynomial, so the kernel holds all of its low-degree
multiples; :func:`recover_minimal_degree` resolves that case by
restricting columns to successively lower degrees.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import (
    AmbiguousKernelError,
    UninformativeError,
    ZeroPolynomialError,
)
from .gpt import GptMatrix, assemble_gpt
from .npo import assemble
from .polynomial import Poly2, poly_dim

AMBIGUOUS_GAP = 0.1
CROSS_LAMBDA_TOL = 1e-3
DEFAULT_EPS_NZ = 1e-8


@dataclass(frozen=True)
class RecoveryResult:
    """Recovered boundary polynomial plus kernel diagnostics."""

    g_hat: Poly2
    singular_values: np.ndarray
    kernel_gap: float
    residual: float
    lambda_used: float
    flags: tuple = ()

    def __post_init__(self):
        s = np.array(self.singular_values, dtype=float, copy=True).reshape(-1)
        if np.any(s < 0) or np.any(np.diff(s) > 0):
            raise ValueError("singular values must be nonnegative and descending")
        s.setflags(write=False)
        object.__setattr__(self, "singular_values", s)
        if self.residual < 0:
            raise ValueError("residual must be >= 0")

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "g": self.g_hat.to_json(),
            "singular_values": [float(v) for v in self.singular_values],
            "kernel_gap": float(self.kernel_gap),
            "residual": float(self.residual),
            "lambda": float(self.lambda_used),
            "flags": list(self.flags),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RecoveryResult":
        return cls(
            g_hat=Poly2.from_json(obj["g"]),
            singular_values=np.asarray(obj["singular_values"], dtype=float),
            kernel_gap=float(obj["kernel_gap"]),
            residual=float(obj["residual"]),
            lambda_used=float(obj["lambda"]),
            flags=tuple(obj.get("flags", [])),
        )


def normalize(p: Poly2, eps_nz: float = DEFAULT_EPS_NZ) -> Poly2:
    """Divide by the coefficient of the graded-lex largest nonzero index.

    The pivot index alpha* is the largest graded-lex position whose
    coefficient exceeds ``eps_nz`` relative to the largest coefficient, so
    trailing quadrature noise cannot grab the pivot.
    """
    c = p.coeffs
    top = float(np.max(np.abs(c)))
    if top == 0.0:
        raise ZeroPolynomialError("cannot normalize the zero polynomial")
    keep = np.abs(c) > eps_nz * top
    astar = int(np.max(np.nonzero(keep)[0]))
    return Poly2(p.degree, c / c[astar])


def kernel_residual(M: GptMatrix, p: Poly2) -> float:
    """Scale-free misfit ``||M p||_2 / (||M||_F ||p||_2)``."""
    if p.degree > M.d:
        raise ValueError(
            f"polynomial degree {p.degree} exceeds matrix column degree {M.d}"
        )
    v = p.padded(M.d).coeffs
    nv = float(np.linalg.norm(v))
    if nv == 0.0:
        raise ZeroPolynomialError("kernel residual of the zero polynomial is undefined")
    return float(np.linalg.norm(M.entries @ v) / (np.linalg.norm(M.entries) * nv))


def recover(M: GptMatrix, eps_nz: float = DEFAULT_EPS_NZ) -> RecoveryResult:
    """Smallest-singular-vector recovery of the boundary polynomial.

    Returns the normalized polynomial together with the full singular
    spectrum, the kernel gap, and the residual.  A kernel gap above
    ``AMBIGUOUS_GAP`` raises a warning and adds the ``AmbiguousKernel``
    flag, but still returns the best direction found.
    """
    entries = M.entries
    if entries.shape[0] <= entries.shape[1]:
        raise ValueError(
            f"matrix must have more rows than columns, got {entries.shape}"
        )
    _, s, vh = np.linalg.svd(entries)
    v = np.conj(vh[-1])
    if np.iscomplexobj(v):
        pivot = int(np.argmax(np.abs(v)))
        v = v / v[pivot]
        v = v.real
    g_hat = normalize(Poly2(M.d, v), eps_nz)
    gap = float(s[-1] / s[-2]) if s[-2] > 0 else np.inf
    residual = float(s[-1] / np.linalg.norm(entries))
    flags = ()
    if gap > AMBIGUOUS_GAP:
        flags = ("AmbiguousKernel",)
        warnings.warn(
            f"kernel gap {gap:.3g} exceeds {AMBIGUOUS_GAP}: kernel is not "
            "numerically one-dimensional (wrong degree bound, or lambda near "
            "an exceptional value)",
            stacklevel=2,
        )
    lam = M.lam.real if isinstance(M.lam, complex) else M.lam
    return RecoveryResult(
        g_hat=g_hat,
        singular_values=s,
        kernel_gap=gap,
        residual=residual,
        lambda_used=float(lam),
        flags=flags,
    )


def recover_minimal_degree(
    M: GptMatrix,
    residual_tol: float = 1e-8,
    eps_nz: float = DEFAULT_EPS_NZ,
) -> RecoveryResult:
    """Recovery that drops to the smallest column degree holding a kernel.

    When the declared degree exceeds the degree of the minimal vanishing
    polynomial, every low-degree multiple of that polynomial lies in the
    kernel of the full matrix, the kernel is multi-dimensional, and the
    smallest singular vector is an arbitrary mixture (``recover`` flags
    this ``AmbiguousKernel``).  A polygon is the canonical case: its edges
    lie on a product of lines, so at any declared degree above the vertex
    count the kernel contains all multiples of that product.

    Columns of the matrix are graded-lex ordered, so restricting to the
    leading ``poly_dim(d')`` columns keeps exactly the kernel members of
    degree at most ``d'``.  Scanning ``d'`` upward and stopping at the
    first unambiguous near-null direction therefore isolates the minimal
    polynomial itself.  The reduced result carries a ``DegreeReduced``
    flag; if no restriction resolves the ambiguity the full-matrix
    recovery is returned unchanged (warning included).
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        full = recover(M, eps_nz)
    if "AmbiguousKernel" not in full.flags:
        return full
    lam = M.lam.real if isinstance(M.lam, complex) else M.lam
    for dprime in range(1, M.d):
        sub = M.entries[:, : poly_dim(dprime)]
        _, s, vh = np.linalg.svd(sub)
        residual = float(s[-1] / np.linalg.norm(sub))
        gap = float(s[-1] / s[-2]) if s[-2] > 0 else np.inf
        if residual > residual_tol or gap > AMBIGUOUS_GAP:
            continue
        v = np.conj(vh[-1])
        if np.iscomplexobj(v):
            v = v / v[int(np.argmax(np.abs(v)))]
            v = v.real
        return RecoveryResult(
            g_hat=normalize(Poly2(dprime, v), eps_nz),
            singular_values=s,
            kernel_gap=gap,
            residual=residual,
            lambda_used=float(lam),
            flags=("DegreeReduced",),
        )
    warnings.warn(
        f"kernel gap {full.kernel_gap:.3g} exceeds {AMBIGUOUS_GAP} and no "
        "column-degree restriction resolves it",
        stacklevel=2,
    )
    return full


def recover_crossvalidated(
    boundary,
    d: int,
    lam1: float = 1.5,
    lam2: float = 3.0,
    row_degree: int | None = None,
    npo=None,
    eps_nz: float = DEFAULT_EPS_NZ,
) -> RecoveryResult:
    """Run the recovery at two spectral parameters and compare.

    The kernel direction is independent of lambda, so a disagreement in
    the normalized coefficients beyond ``CROSS_LAMBDA_TOL`` marks at least
    one run as unreliable; the smaller-residual result is returned with a
    ``LambdaSuspect`` flag.  If both runs report an ambiguous kernel the
    recovery fails outright.
    """
    if lam1 == lam2:
        raise ValueError("cross-validation needs two distinct lambda values")
    if npo is None:
        npo = assemble(boundary)
    results = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for lam in (lam1, lam2):
            M = assemble_gpt(boundary, npo, lam, d, row_degree)
            results.append(recover(M, eps_nz))
    r1, r2 = results
    ambiguous = ["AmbiguousKernel" in r.flags for r in results]
    if all(ambiguous):
        raise AmbiguousKernelError(
            "kernel is ambiguous at both lambda values "
            f"(gaps {r1.kernel_gap:.3g} and {r2.kernel_gap:.3g}, residuals "
            f"{r1.residual:.3g} and {r2.residual:.3g}); the degree bound "
            f"d={d} likely does not admit a vanishing polynomial"
        )
    diff = float(np.max(np.abs(r1.g_hat.coeffs - r2.g_hat.coeffs)))
    if diff > CROSS_LAMBDA_TOL:
        best = r1 if r1.residual <= r2.residual else r2
        flags = tuple(best.flags) + ("LambdaSuspect",)
        warnings.warn(
            f"recoveries at lambda={lam1} and lambda={lam2} differ by "
            f"{diff:.3g} in max coefficient; returning the smaller-residual "
            "result",
            stacklevel=2,
        )
        return RecoveryResult(
            g_hat=best.g_hat,
            singular_values=best.singular_values,
            kernel_gap=best.kernel_gap,
            residual=best.residual,
            lambda_used=best.lambda_used,
            flags=flags,
        )
    return r1


@dataclass(frozen=True)
class LambdaEstimate:
    """Best-fit spectral parameter and the misfit curve behind it."""

    lam: float
    misfit: float
    grid: tuple = ()
    misfits: tuple = field(default=())

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "lambda": float(self.lam),
            "misfit": float(self.misfit),
            "grid": [float(v) for v in self.grid],
            "misfits": [float(v) for v in self.misfits],
        }


def estimate_lambda(
    M_target: GptMatrix,
    b_candidate,
    lam_grid,
    npo=None,
) -> LambdaEstimate:
    """Fit the spectral parameter of a target GPT matrix on a candidate shape.

    Assembles the candidate's GPT matrix over ``lam_grid`` (same degree and
    row degree as the target), takes the Frobenius misfit against the
    target, and refines the grid argmin by golden-section search on the
    bracketing interval.  A misfit curve flatter than 1e-12 carries no
    information about lambda and raises :class:`UninformativeError`.
    """
    grid = [float(v) for v in lam_grid]
    if not grid:
        raise ValueError("lambda grid must be nonempty")
    if any(abs(v) <= 0.5 for v in grid):
        raise ValueError("lambda grid must stay outside [-1/2, 1/2]")
    if npo is None:
        npo = assemble(b_candidate)

    def misfit(lam: float) -> float:
        M = assemble_gpt(b_candidate, npo, lam, M_target.d, M_target.row_degree)
        return float(np.linalg.norm(M.entries - M_target.entries))

    values = [misfit(v) for v in grid]
    if max(values) - min(values) < 1e-12:
        raise UninformativeError(
            "misfit curve is flat over the lambda grid; the target matrix "
            "does not constrain lambda on this candidate shape"
        )
    i = int(np.argmin(values))
    best_lam, best_val = grid[i], values[i]
    if 0 < i < len(grid) - 1 and values[i] < values[i - 1] and values[i] < values[i + 1]:
        res = minimize_scalar(
            misfit,
            bracket=(grid[i - 1], grid[i], grid[i + 1]),
            method="golden",
            options={"xtol": 1e-10},
        )
        if res.fun <= best_val:
            best_lam, best_val = float(res.x), float(res.fun)
    return LambdaEstimate(
        lam=best_lam,
        misfit=best_val,
        grid=tuple(grid),
        misfits=tuple(values),
    )
