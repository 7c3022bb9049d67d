"""Dense bivariate polynomials in graded lexicographic coefficient order.

Multi-indices are plain ``(a1, a2)`` tuples of nonnegative ints with
``x^(a1,a2) = x1**a1 * x2**a2``.  The graded lex sequence orders first by
total degree ``a1 + a2`` and then by ascending ``a1`` inside each degree
block::

    index:       0 |  1     2  |  3     4     5  |  6    ...
    multi-index: (0,0) (0,1) (1,0) (0,2) (1,1) (2,0) (0,3) ...

A polynomial of degree bound ``d`` stores one coefficient per multi-index
of degree <= d, i.e. ``poly_dim(d) = (d+1)(d+2)/2`` numbers.  The
homogeneous-form view (:class:`FormBlocks`) regroups the same numbers by
degree, each block in the descending-power basis
``x1^j, x1^(j-1)*x2, ..., x2^j`` that the similarity lift in
:mod:`gptshape.transform` acts on.

Poly2 instances are immutable (the coefficient array is frozen), so they
are safe to share across threads and to use as fixed reference data.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, OddDegreeError


def poly_dim(d: int) -> int:
    """Number of bivariate monomials of total degree <= d."""
    if d < 0:
        raise ValueError(f"degree must be >= 0, got {d}")
    return (d + 1) * (d + 2) // 2


def ordinal(alpha) -> int:
    """Position of a multi-index in the graded lex sequence."""
    a1, a2 = alpha
    if a1 < 0 or a2 < 0 or a1 != int(a1) or a2 != int(a2):
        raise ValueError(f"multi-index must be a pair of nonnegative ints, got {alpha!r}")
    n = a1 + a2
    return n * (n + 1) // 2 + a1


def multiindex_at(i: int) -> tuple[int, int]:
    """Inverse of :func:`ordinal`."""
    if i < 0:
        raise ValueError(f"ordinal must be >= 0, got {i}")
    n = (math.isqrt(8 * i + 1) - 1) // 2
    a1 = i - n * (n + 1) // 2
    return (a1, n - a1)


@dataclass(frozen=True)
class Poly2:
    """Polynomial in two variables, dense graded-lex coefficient vector."""

    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float, copy=True).reshape(-1)
        if self.degree < 0:
            raise ValueError(f"degree must be >= 0, got {self.degree}")
        if c.size != poly_dim(self.degree):
            raise ValueError(
                f"degree {self.degree} needs {poly_dim(self.degree)} coefficients, got {c.size}"
            )
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # construction -----------------------------------------------------

    @classmethod
    def zero(cls, degree: int = 0) -> "Poly2":
        return cls(degree, np.zeros(poly_dim(degree)))

    @classmethod
    def from_terms(cls, terms: dict, degree: int | None = None) -> "Poly2":
        """Build from a ``{(a1, a2): coefficient}`` mapping."""
        if degree is None:
            degree = max((a1 + a2 for a1, a2 in terms), default=0)
        c = np.zeros(poly_dim(degree))
        for alpha, val in terms.items():
            c[ordinal(alpha)] += val
        return cls(degree, c)

    @classmethod
    def monomial(cls, alpha, coefficient: float = 1.0) -> "Poly2":
        return cls.from_terms({tuple(alpha): coefficient})

    # evaluation ---------------------------------------------------------

    def __call__(self, pts) -> np.ndarray:
        """Evaluate at points of shape (..., 2); returns shape (...)."""
        pts = np.asarray(pts, dtype=float)
        x1, x2 = pts[..., 0], pts[..., 1]
        out = np.zeros(np.broadcast(x1, x2).shape)
        for i, c in enumerate(self.coeffs):
            if c != 0.0:
                a1, a2 = multiindex_at(i)
                out += c * x1**a1 * x2**a2
        return out

    def gradient(self, pts) -> np.ndarray:
        """Gradient at points of shape (..., 2); returns shape (..., 2)."""
        g1 = partial(self, 0)(pts)
        g2 = partial(self, 1)(pts)
        return np.stack([g1, g2], axis=-1)

    # structure ----------------------------------------------------------

    def padded(self, degree: int) -> "Poly2":
        """Same polynomial with a larger declared degree bound."""
        if degree < self.degree:
            raise ValueError(f"cannot pad degree {self.degree} down to {degree}")
        c = np.zeros(poly_dim(degree))
        c[: self.coeffs.size] = self.coeffs
        return Poly2(degree, c)

    def term_items(self):
        """Yield (multi-index, coefficient) for the nonzero terms."""
        for i, c in enumerate(self.coeffs):
            if c != 0.0:
                yield multiindex_at(i), c

    # arithmetic ---------------------------------------------------------

    def __add__(self, other: "Poly2") -> "Poly2":
        d = max(self.degree, other.degree)
        a, b = self.padded(d), other.padded(d)
        return Poly2(d, a.coeffs + b.coeffs)

    def __neg__(self) -> "Poly2":
        return Poly2(self.degree, -self.coeffs)

    def __sub__(self, other: "Poly2") -> "Poly2":
        return self + (-other)

    def __mul__(self, other):
        if np.isscalar(other):
            return Poly2(self.degree, self.coeffs * float(other))
        d = self.degree + other.degree
        c = np.zeros(poly_dim(d))
        for (a1, a2), ca in self.term_items():
            for (b1, b2), cb in other.term_items():
                c[ordinal((a1 + b1, a2 + b2))] += ca * cb
        return Poly2(d, c)

    __rmul__ = __mul__

    # serialization ------------------------------------------------------

    def to_json(self) -> dict:
        return {"degree": int(self.degree), "coeffs": [float(v) for v in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> "Poly2":
        return cls(int(obj["degree"]), np.asarray(obj["coeffs"], dtype=float))


def partial(p: Poly2, axis: int) -> Poly2:
    """Partial derivative along x1 (axis=0) or x2 (axis=1)."""
    if axis not in (0, 1):
        raise ValueError(f"axis must be 0 or 1, got {axis}")
    d = max(p.degree - 1, 0)
    c = np.zeros(poly_dim(d))
    for (a1, a2), val in p.term_items():
        if axis == 0 and a1 > 0:
            c[ordinal((a1 - 1, a2))] += a1 * val
        elif axis == 1 and a2 > 0:
            c[ordinal((a1, a2 - 1))] += a2 * val
    return Poly2(d, c)


def laplacian(p: Poly2) -> Poly2:
    return partial(partial(p, 0), 0) + partial(partial(p, 1), 1)


def harmonic_monomial(m: int, kind: str = "re") -> Poly2:
    """Real or imaginary part of (x1 + i*x2)**m as a Poly2.

    These span the harmonic polynomials; ``harmonic_monomial(0)`` is the
    constant 1 for kind 're' and zero for kind 'im'.
    """
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    terms = {}
    for j in range(m + 1):
        # i**j contributes to the real part for even j, imaginary for odd j
        if kind == "re" and j % 2 == 0:
            terms[(m - j, j)] = math.comb(m, j) * (-1) ** (j // 2)
        elif kind == "im" and j % 2 == 1:
            terms[(m - j, j)] = math.comb(m, j) * (-1) ** ((j - 1) // 2)
        elif kind not in ("re", "im"):
            raise ValueError(f"kind must be 're' or 'im', got {kind!r}")
    if not terms:
        return Poly2.zero(max(m, 0))
    return Poly2.from_terms(terms, degree=m)


# homogeneous-form view -------------------------------------------------


@dataclass(frozen=True)
class FormBlocks:
    """Coefficients regrouped by homogeneous degree.

    ``blocks[j]`` has length j+1 and holds the coefficients of
    ``x1^j, x1^(j-1)*x2, ..., x2^j`` in that order (descending power of x1,
    which is the reverse of the in-block graded lex order).
    """

    degree: int
    blocks: tuple

    def __post_init__(self):
        if len(self.blocks) != self.degree + 1:
            raise ValueError("need one block per degree 0..d")
        frozen = []
        for j, b in enumerate(self.blocks):
            b = np.array(b, dtype=float, copy=True).reshape(-1)
            if b.size != j + 1:
                raise ValueError(f"block {j} must have length {j + 1}, got {b.size}")
            b.setflags(write=False)
            frozen.append(b)
        object.__setattr__(self, "blocks", tuple(frozen))


def to_forms(p: Poly2) -> FormBlocks:
    """Split a polynomial into homogeneous blocks (lossless)."""
    blocks = []
    for j in range(p.degree + 1):
        blocks.append(np.array([p.coeffs[ordinal((j - h, h))] for h in range(j + 1)]))
    return FormBlocks(p.degree, tuple(blocks))


def from_forms(fb: FormBlocks) -> Poly2:
    """Inverse of :func:`to_forms`."""
    c = np.zeros(poly_dim(fb.degree))
    for j, block in enumerate(fb.blocks):
        for h, val in enumerate(block):
            c[ordinal((j - h, h))] = val
    return Poly2(fb.degree, c)


def quad_form_matrix(form) -> np.ndarray:
    """Symmetric matrix Q with x_[k]^T Q x_[k] equal to a degree-2k form.

    ``form`` is a homogeneous block of even degree 2k in the descending
    power basis (length 2k+1).  The coefficient of each monomial is split
    equally among all index pairs (h, j) that multiply to it, which makes
    Q the symmetric representative of the form on the basis
    ``x_[k] = (x1^k, x1^(k-1)*x2, ..., x2^k)``.
    """
    form = np.asarray(form, dtype=float).reshape(-1)
    m = form.size - 1
    if m < 0:
        raise ValueError("form must be nonempty")
    if m % 2 != 0:
        raise OddDegreeError(f"degree {m} form has no square representation")
    k = m // 2
    Q = np.zeros((k + 1, k + 1))
    for g in range(m + 1):
        lo, hi = max(0, g - k), min(k, g)
        npairs = hi - lo + 1
        for h in range(lo, hi + 1):
            Q[h, g - h] += form[g] / npairs
    return Q


# boundedness ------------------------------------------------------------


class Boundedness(enum.Enum):
    CERTIFIED_BOUNDED = "certified_bounded"
    INCONCLUSIVE = "inconclusive"
    ODD_DEGREE_UNBOUNDED = "odd_degree_unbounded"


def effective_degree(p: Poly2, rel_tol: float = 1e-8) -> int:
    """Highest degree whose form block is not negligible, -1 for zero.

    A block counts as zero when all its entries are <= rel_tol times the
    largest coefficient magnitude, which keeps recovery noise in trailing
    blocks from inflating the degree.
    """
    top = float(np.max(np.abs(p.coeffs))) if p.coeffs.size else 0.0
    if top == 0.0:
        return -1
    fb = to_forms(p)
    for j in range(p.degree, -1, -1):
        if np.max(np.abs(fb.blocks[j])) > rel_tol * top:
            return j
    return -1


def boundedness_check(p: Poly2, rel_tol: float = 1e-8, tol_pd: float = 1e-10) -> Boundedness:
    """Classify whether the zero set of p is certifiably bounded.

    Odd effective degree always gives an unbounded zero set.  For even
    degree 2k the symmetric representative of the leading form is tested
    for definiteness: a definite leading form is positive (or negative)
    away from the origin, so the zero set cannot escape to infinity.  An
    indefinite or singular representative proves nothing either way, hence
    INCONCLUSIVE.  Note that a nonsingular indefinite representative does
    not certify boundedness: x1^2 - x2^2 - 1 has a nonsingular leading
    form and an unbounded zero set.
    """
    deg = effective_degree(p, rel_tol)
    if deg < 0:
        raise DegenerateInputError("zero polynomial has no meaningful zero set")
    if deg % 2 != 0:
        return Boundedness.ODD_DEGREE_UNBOUNDED
    form = to_forms(p).blocks[deg]
    Q = quad_form_matrix(form)
    eig = np.linalg.eigvalsh(Q)
    thresh = tol_pd * np.max(np.abs(eig))
    if np.all(eig > thresh) or np.all(eig < -thresh):
        return Boundedness.CERTIFIED_BOUNDED
    return Boundedness.INCONCLUSIVE
