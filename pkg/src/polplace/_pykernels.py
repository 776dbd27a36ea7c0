"""Pure-Python/NumPy implementations of the hot numerical kernels.

Every function here has a twin with the same signature in the compiled
``_ckernels`` module.  ``polplace._kernels`` picks one at import time.
"""
import numpy as np


def lu_factor(a, tol):
    """LU factorization with partial (row) pivoting.

    Returns ``(lu, perm, info)`` where ``info`` is -1 on success or the
    column index at which the best available pivot fell to ``tol`` or below.
    """
    lu = np.array(a, dtype=np.float64, copy=True)
    n = lu.shape[0]
    perm = np.arange(n, dtype=np.intp)
    for k in range(n):
        col = np.abs(lu[k:, k])
        r = k + int(np.argmax(col))
        if col[r - k] <= tol:
            return lu, perm, k
        if r != k:
            lu[[k, r]] = lu[[r, k]]
            perm[[k, r]] = perm[[r, k]]
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, perm, -1


def lu_solve(lu, perm, b):
    n = lu.shape[0]
    x = np.array(b, dtype=np.float64)[perm].copy()
    for i in range(1, n):
        x[i] -= lu[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        x[i] -= lu[i, i + 1:] @ x[i + 1:]
        x[i] /= lu[i, i]
    return x


def hessenberg(a):
    """Householder reduction to upper Hessenberg form (orthogonal similarity)."""
    h = np.array(a, dtype=np.float64, copy=True)
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        norm_x = np.sqrt(x @ x)
        if norm_x == 0.0:
            continue
        alpha = -norm_x if x[0] >= 0.0 else norm_x
        v = x
        v[0] -= alpha
        norm_v = np.sqrt(v @ v)
        if norm_v == 0.0:
            continue
        v /= norm_v
        h[k + 1:, :] -= 2.0 * np.outer(v, v @ h[k + 1:, :])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v)
        h[k + 2:, k] = 0.0
    return h


def hessenberg_charpoly(a):
    """Characteristic polynomial via Hessenberg reduction and La Budde's recurrence.

    Coefficients are returned in ascending degree, leading coefficient 1.
    """
    h = hessenberg(a)
    n = h.shape[0]
    polys = [np.ones(1)]
    for k in range(1, n + 1):
        prev = polys[k - 1]
        pk = np.zeros(k + 1)
        pk[1:] += prev
        pk[:-1] -= h[k - 1, k - 1] * prev
        prod = 1.0
        for i in range(1, k):
            prod *= h[k - i, k - i - 1]
            pk[:k - i] -= prod * h[k - i - 1, k - 1] * polys[k - i - 1]
        polys.append(pk)
    return polys[n]


def faddeev_leverrier(a):
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]
    c = np.zeros(n + 1)
    c[n] = 1.0
    m = np.zeros((n, n))
    eye = np.eye(n)
    for k in range(1, n + 1):
        m = a @ m + c[n - k + 1] * eye
        c[n - k] = -np.trace(a @ m) / k
    return c


def _horner(coeffs, z):
    acc = 0j
    for c in coeffs[::-1]:
        acc = acc * z + c
    return acc


def durand_kerner(coeffs, maxiter, steptol):
    """Weierstrass/Durand-Kerner iteration on a monic polynomial.

    ``coeffs`` are ascending with ``coeffs[-1] == 1``.  Returns
    ``(z, converged, iterations, z_best, best_residual)``; ``z_best`` is the
    iterate with the smallest maximum residual seen.
    """
    coeffs = np.asarray(coeffs, dtype=np.float64)
    n = coeffs.shape[0] - 1
    radius = 1.0 + float(np.max(np.abs(coeffs[:-1])))
    z = radius * np.exp(1j * (2.0 * np.pi * np.arange(n) / n + 0.4))
    best = z.copy()
    best_res = np.inf
    abs_coeffs = np.abs(coeffs)
    floor_scale = 2.0 * n * np.finfo(np.float64).eps
    for it in range(1, maxiter + 1):
        step = 0.0
        for i in range(n):
            denom = 1.0 + 0j
            zi = z[i]
            for j in range(n):
                if j != i:
                    denom *= zi - z[j]
            if denom == 0:
                denom = 1e-300 + 0j
            delta = _horner(coeffs, zi) / denom
            z[i] = zi - delta
            s = abs(delta) / max(1.0, abs(z[i]))
            if s > step:
                step = s
        res = 0.0
        at_floor = True
        for zi in z:
            r = abs(_horner(coeffs, zi))
            res = max(res, r)
            # Horner rounding bound: no further step can reduce this residual
            if r > floor_scale * _horner(abs_coeffs, abs(zi)).real:
                at_floor = False
        if res < best_res:
            best_res = res
            best = z.copy()
        if step < steptol or at_floor:
            return z, True, it, best, best_res
    return z, False, maxiter, best, best_res


def rk4_linear(f, w0, dt, nsteps, limit):
    """Fixed-step classical RK4 for ``w' = f @ w``.

    Returns ``(trajectory, diverged_at)``; ``diverged_at`` is -1 or the
    first step whose state magnitude exceeds ``limit``.  Samples after a
    divergence are left as zeros.
    """
    f = np.asarray(f, dtype=np.float64)
    w = np.array(w0, dtype=np.float64, copy=True)
    out = np.zeros((nsteps + 1, w.shape[0]))
    out[0] = w
    half = 0.5 * dt
    sixth = dt / 6.0
    for s in range(1, nsteps + 1):
        k1 = f @ w
        k2 = f @ (w + half * k1)
        k3 = f @ (w + half * k2)
        k4 = f @ (w + dt * k3)
        w = w + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[s] = w
        if not np.all(np.abs(w) <= limit):
            return out, s
    return out, -1
