"""Dense linear algebra and polynomial utilities.

Polynomials are stored with coefficients in ascending degree order, so a
monic degree-n polynomial ``s**n + a_n s**(n-1) + ... + a_1`` has
``coeffs == [a_1, ..., a_n, 1]``.  Points in the complex plane are plain
Python ``complex`` values.
"""
import enum
import os
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    DimensionMismatch,
    NoConvergence,
    SingularMatrix,
    UnpairedComplexRoot,
)

EPS = np.finfo(np.float64).eps

#: Maximum Durand-Kerner sweeps before giving up.
DK_MAXITER = 500
#: Durand-Kerner stops when the largest relative correction drops below this.
DK_STEPTOL = 1e-12
#: Tolerance for matching a complex root with its conjugate.
PAIR_TOL = 1e-12


def as_matrix(x, name="matrix"):
    """Return ``x`` as a finite 2-D float64 array."""
    m = np.array(x, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(1, -1) if m.size else m.reshape(0, 0)
    if m.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got {m.ndim}-D")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def _require_square(a, name):
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got {a.shape[0]}x{a.shape[1]}")


def default_rank_tol(m):
    """Scale-aware rank tolerance: max(rows, cols) * eps * largest column norm.

    The ``POLPLACE_TOL`` environment variable, when set, replaces this with
    an absolute tolerance.
    """
    env = os.environ.get("POLPLACE_TOL")
    if env:
        return float(env)
    m = np.asarray(m, dtype=np.float64)
    if m.size == 0:
        return 0.0
    return max(m.shape) * EPS * float(np.max(np.linalg.norm(m, axis=0)))


def solve_linear(a, b, tol=None):
    """Solve ``a @ x = b`` by LU factorization with row pivoting.

    Raises
    ------
    SingularMatrix
        If a pivot magnitude is at or below ``tol`` (default: the rank
        tolerance of ``a``).
    """
    a = as_matrix(a, "A")
    _require_square(a, "A")
    b_arr = np.asarray(b, dtype=np.float64)
    if b_arr.shape[0] != a.shape[0]:
        raise DimensionMismatch(
            f"right-hand side has {b_arr.shape[0]} rows, expected {a.shape[0]}"
        )
    if tol is None:
        tol = default_rank_tol(a)
    lu, perm, info = _kernels.lu_factor(a, tol)
    if info >= 0:
        raise SingularMatrix(f"pivot in column {info} below tolerance {tol:.3g}", column=info)
    return _kernels.lu_solve(lu, perm, b_arr)


def inverse(a, tol=None):
    a = as_matrix(a, "A")
    return solve_linear(a, np.eye(a.shape[0]), tol)


def rank_revealing(m, tol=None):
    """Rank and the first maximal independent column set, scanning left to right.

    Each column is projected off the span of the columns already accepted
    (two Gram-Schmidt passes); it is accepted when the residual norm exceeds
    ``tol``.

    Returns
    -------
    rank : int
    indices : list of int
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise DimensionMismatch("rank_revealing expects a 2-D matrix")
    if tol is None:
        tol = default_rank_tol(m)
    basis = Basis(m.shape[0], tol)
    indices = [j for j in range(m.shape[1]) if basis.add(m[:, j])]
    return len(indices), indices


class Basis:
    """Incrementally grown orthonormal basis used for independence tests."""

    def __init__(self, dim, tol):
        self.tol = tol
        self._q = np.zeros((dim, 0))

    def __len__(self):
        return self._q.shape[1]

    def residual(self, v):
        r = np.array(v, dtype=np.float64)
        for _ in range(2):
            r = r - self._q @ (self._q.T @ r)
        return r

    def add(self, v):
        """Append ``v`` if it is independent; return whether it was added."""
        r = self.residual(v)
        norm = float(np.sqrt(r @ r))
        if norm <= self.tol:
            return False
        self._q = np.column_stack([self._q, r / norm])
        return True


@dataclass(eq=False)
class Polynomial:
    """Real polynomial with ascending coefficients."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=np.float64))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("polynomial needs a 1-D, non-empty coefficient list")
        if not np.all(np.isfinite(c)):
            raise ValueError("polynomial coefficients must be finite")
        if c[-1] == 0.0 and c.size > 1:
            raise ValueError("leading coefficient must be nonzero")
        self.coeffs = c

    @property
    def degree(self):
        return self.coeffs.size - 1

    @property
    def monic(self):
        return self.coeffs[-1] == 1.0

    def normalized(self):
        return Polynomial(self.coeffs / self.coeffs[-1])

    def __call__(self, s):
        acc = 0.0
        for c in self.coeffs[::-1]:
            acc = acc * s + c
        return acc

    def __mul__(self, other):
        return Polynomial(np.convolve(self.coeffs, other.coeffs))

    def __repr__(self):
        return f"Polynomial({self.coeffs.tolist()})"

    @classmethod
    def monic_from_lower(cls, lower):
        """Build ``s**m + lower[m-1] s**(m-1) + ... + lower[0]``."""
        return cls(np.append(np.asarray(lower, dtype=np.float64), 1.0))


def relative_deviation(achieved, desired):
    """Max coefficient deviation scaled by ``max(1, max |desired coeff|)``."""
    a = achieved.coeffs if isinstance(achieved, Polynomial) else np.asarray(achieved)
    d = desired.coeffs if isinstance(desired, Polynomial) else np.asarray(desired)
    if a.shape != d.shape:
        raise DimensionMismatch(f"degree mismatch: {a.size - 1} vs {d.size - 1}")
    return float(np.max(np.abs(a - d)) / max(1.0, float(np.max(np.abs(d)))))


def char_poly(a, method="hessenberg"):
    """Characteristic polynomial ``det(sI - a)``, monic, ascending coefficients.

    ``method="hessenberg"`` (default) reduces to Hessenberg form by
    Householder reflections and runs La Budde's recurrence.
    ``method="faddeev"`` uses the Faddeev-LeVerrier trace recurrence, which
    is exact in rational arithmetic but loses digits in floating point when
    the matrix norm is large relative to its spectrum.
    """
    a = as_matrix(a, "A")
    _require_square(a, "A")
    n = a.shape[0]
    if n > 50:
        warnings.warn(f"char_poly on a {n}x{n} matrix; accuracy degrades past n=50",
                      RuntimeWarning, stacklevel=2)
    if n == 0:
        return Polynomial([1.0])
    if method == "hessenberg":
        c = _kernels.hessenberg_charpoly(a)
    elif method == "faddeev":
        c = _kernels.faddeev_leverrier(a)
    else:
        raise ValueError(f"unknown char_poly method {method!r}")
    c = np.asarray(c, dtype=np.float64)
    c[-1] = 1.0
    return Polynomial(c)


def pair_conjugates(roots):
    """Split ``roots`` into real roots and conjugate pairs (upper member first).

    Raises
    ------
    UnpairedComplexRoot
    """
    reals = []
    upper = []
    lower = []
    for r in roots:
        r = complex(r)
        if abs(r.imag) <= PAIR_TOL * max(1.0, abs(r)):
            reals.append(r.real)
        elif r.imag > 0:
            upper.append(r)
        else:
            lower.append(r)
    pairs = []
    for u in upper:
        match = None
        for i, w in enumerate(lower):
            if abs(u - w.conjugate()) <= PAIR_TOL * max(1.0, abs(u)):
                match = i
                break
        if match is None:
            raise UnpairedComplexRoot(f"root {u} has no conjugate partner")
        lower.pop(match)
        pairs.append(u)
    if lower:
        raise UnpairedComplexRoot(f"root {lower[0]} has no conjugate partner")
    return reals, pairs


def poly_from_roots(roots):
    """Monic real polynomial with the given roots (conjugate-closed multiset).

    Conjugate pairs are expanded as real quadratics, so the result carries
    no imaginary residue.  Factors are multiplied in sorted order, so any
    permutation of ``roots`` gives bit-identical coefficients.
    """
    reals, pairs = pair_conjugates(roots)
    # canonical expansion order: the result does not depend on input order
    reals.sort()
    pairs.sort(key=lambda u: (u.real, u.imag))
    c = np.ones(1)
    for r in reals:
        c = np.convolve(c, [-r, 1.0])
    for u in pairs:
        c = np.convolve(c, [u.real * u.real + u.imag * u.imag, -2.0 * u.real, 1.0])
    return Polynomial(c)


class Stability(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    #: A full zero row appeared: roots on the imaginary axis, or undecided.
    MARGINAL = "marginal"

    def __str__(self):
        return self.value


def routh_hurwitz_stable(p, zero_tol=1e-12):
    """Routh-Hurwitz verdict for a real polynomial.

    A negative coefficient already proves a right-half-plane root.  In the
    Routh array a zero first-column entry over a nonzero row is reported as
    unstable and a row that vanishes entirely as marginal.
    """
    if not isinstance(p, Polynomial):
        p = Polynomial(p)
    if p.degree < 1:
        raise ValueError("Routh-Hurwitz needs degree >= 1")
    desc = p.normalized().coeffs[::-1]
    if np.any(desc < 0):
        return Stability.UNSTABLE
    n = p.degree
    width = n // 2 + 1
    rows = [np.zeros(width), np.zeros(width)]
    rows[0][: len(desc[0::2])] = desc[0::2]
    rows[1][: len(desc[1::2])] = desc[1::2]
    scale = float(np.max(np.abs(desc)))
    for k in range(1, n + 1):
        cur = rows[k]
        if np.all(np.abs(cur) <= zero_tol * scale):
            return Stability.MARGINAL
        if abs(cur[0]) <= zero_tol * scale:
            return Stability.UNSTABLE
        if k == n:
            break
        prev = rows[k - 1]
        nxt = np.zeros(width)
        for i in range(width - 1):
            nxt[i] = (cur[0] * prev[i + 1] - prev[0] * cur[i + 1]) / cur[0]
        rows.append(nxt)
        scale = max(scale, float(np.max(np.abs(cur))))
    first = np.array([r[0] for r in rows[: n + 1]])
    return Stability.STABLE if np.all(first > 0) else Stability.UNSTABLE


def _symmetrize(z):
    """Give matched conjugate pairs an identical real part and mirrored imaginary parts."""
    z = [complex(v) for v in z]
    used = set()
    for i, u in enumerate(z):
        if i in used or u.imag <= 0:
            continue
        best, dist = None, None
        for j, w in enumerate(z):
            if j != i and j not in used and w.imag < 0:
                d = abs(u - w.conjugate())
                if dist is None or d < dist:
                    best, dist = j, d
        if best is not None and dist <= 1e-6 * (1.0 + abs(u)):
            w = z[best]
            re, im = 0.5 * (u.real + w.real), 0.5 * (u.imag - w.imag)
            z[i], z[best] = complex(re, im), complex(re, -im)
            used.update((i, best))
    return sorted(z, key=lambda c: (c.real, c.imag))


def poly_roots(p, maxiter=DK_MAXITER, steptol=DK_STEPTOL):
    """Roots by Durand-Kerner simultaneous iteration, sorted by (re, im).

    Conjugate pairs are symmetrized (shared real part) so the sort order
    within a pair does not depend on rounding.

    Raises
    ------
    NoConvergence
        When the iteration cap is reached without the residual bound
        ``|p(r)| <= 1e-8 * (1 + ||coeffs||)``; the best iterate is attached.
    """
    if not isinstance(p, Polynomial):
        p = Polynomial(p)
    if p.degree < 1:
        raise ValueError("poly_roots needs degree >= 1")
    q = p.normalized()
    z, converged, _, best, best_res = _kernels.durand_kerner(q.coeffs, maxiter, steptol)
    bound = 1e-8 * (1.0 + float(np.linalg.norm(q.coeffs)))
    res = max(abs(q(zi)) for zi in z)
    if not converged or res > bound:
        if best_res <= bound:
            z = best
        else:
            raise NoConvergence(
                f"Durand-Kerner stopped after {maxiter} sweeps, residual {best_res:.3g}",
                best=_symmetrize(best),
                residual=best_res,
            )
    return _symmetrize(z)


def condition_estimate(a):
    """``||a|| * ||a^-1||`` in the max-row-sum norm; ``inf`` when singular."""
    a = as_matrix(a, "A")
    _require_square(a, "A")
    try:
        inv = inverse(a)
    except SingularMatrix:
        return float("inf")
    return float(np.max(np.sum(np.abs(a), axis=1)) * np.max(np.sum(np.abs(inv), axis=1)))
