# cython: language_level=3
"""Compiled kernels; same contracts as ``polplace._pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, M_PI, cos, sin
from libc.float cimport DBL_EPSILON

cnp.import_array()


def lu_factor(a, double tol):
    cdef double[:, ::1] lu = np.array(a, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = lu.shape[0]
    perm_arr = np.arange(n, dtype=np.intp)
    cdef Py_ssize_t[::1] perm = perm_arr
    cdef Py_ssize_t i, j, k, r
    cdef double best, t, f
    for k in range(n):
        r = k
        best = fabs(lu[k, k])
        for i in range(k + 1, n):
            if fabs(lu[i, k]) > best:
                best = fabs(lu[i, k])
                r = i
        if best <= tol:
            return np.asarray(lu), perm_arr, k
        if r != k:
            for j in range(n):
                t = lu[k, j]
                lu[k, j] = lu[r, j]
                lu[r, j] = t
            perm[k], perm[r] = perm[r], perm[k]
        for i in range(k + 1, n):
            f = lu[i, k] / lu[k, k]
            lu[i, k] = f
            for j in range(k + 1, n):
                lu[i, j] -= f * lu[k, j]
    return np.asarray(lu), perm_arr, -1


def lu_solve(lu_in, perm_in, b):
    cdef double[:, ::1] lu = np.ascontiguousarray(lu_in, dtype=np.float64)
    cdef Py_ssize_t[::1] perm = np.ascontiguousarray(perm_in, dtype=np.intp)
    b_arr = np.asarray(b, dtype=np.float64)
    squeeze = b_arr.ndim == 1
    if squeeze:
        b_arr = b_arr[:, None]
    cdef double[:, ::1] rhs = np.ascontiguousarray(b_arr)
    cdef Py_ssize_t n = lu.shape[0], m = rhs.shape[1]
    out = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] x = out
    cdef Py_ssize_t i, j, c
    cdef double acc
    for c in range(m):
        for i in range(n):
            x[i, c] = rhs[perm[i], c]
        for i in range(1, n):
            acc = x[i, c]
            for j in range(i):
                acc -= lu[i, j] * x[j, c]
            x[i, c] = acc
        for i in range(n - 1, -1, -1):
            acc = x[i, c]
            for j in range(i + 1, n):
                acc -= lu[i, j] * x[j, c]
            x[i, c] = acc / lu[i, i]
    return out[:, 0] if squeeze else out


def hessenberg(a):
    h_arr = np.array(a, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] h = h_arr
    cdef Py_ssize_t n = h.shape[0]
    cdef Py_ssize_t i, j, k, m
    cdef double norm_x, alpha, norm_v, dot
    v_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] v = v_arr
    for k in range(n - 2):
        m = n - k - 1
        norm_x = 0.0
        for i in range(m):
            v[i] = h[k + 1 + i, k]
            norm_x += v[i] * v[i]
        norm_x = sqrt(norm_x)
        if norm_x == 0.0:
            continue
        alpha = -norm_x if v[0] >= 0.0 else norm_x
        v[0] -= alpha
        norm_v = 0.0
        for i in range(m):
            norm_v += v[i] * v[i]
        norm_v = sqrt(norm_v)
        if norm_v == 0.0:
            continue
        for i in range(m):
            v[i] /= norm_v
        for j in range(n):
            dot = 0.0
            for i in range(m):
                dot += v[i] * h[k + 1 + i, j]
            for i in range(m):
                h[k + 1 + i, j] -= 2.0 * v[i] * dot
        for i in range(n):
            dot = 0.0
            for j in range(m):
                dot += h[i, k + 1 + j] * v[j]
            for j in range(m):
                h[i, k + 1 + j] -= 2.0 * dot * v[j]
        for i in range(k + 2, n):
            h[i, k] = 0.0
    return h_arr


def hessenberg_charpoly(a):
    cdef double[:, ::1] h = hessenberg(a)
    cdef Py_ssize_t n = h.shape[0]
    # row k holds the characteristic polynomial of the leading k x k block
    polys_arr = np.zeros((n + 1, n + 1), dtype=np.float64)
    cdef double[:, ::1] polys = polys_arr
    cdef Py_ssize_t i, k, d
    cdef double prod, w
    polys[0, 0] = 1.0
    for k in range(1, n + 1):
        for d in range(k):
            polys[k, d + 1] += polys[k - 1, d]
            polys[k, d] -= h[k - 1, k - 1] * polys[k - 1, d]
        prod = 1.0
        for i in range(1, k):
            prod *= h[k - i, k - i - 1]
            w = prod * h[k - i - 1, k - 1]
            for d in range(k - i):
                polys[k, d] -= w * polys[k - i - 1, d]
    return polys_arr[n].copy()


def faddeev_leverrier(a):
    cdef double[:, ::1] A = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t n = A.shape[0]
    c_arr = np.zeros(n + 1, dtype=np.float64)
    cdef double[::1] c = c_arr
    cdef double[:, ::1] m = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] t = np.zeros((n, n), dtype=np.float64)
    cdef Py_ssize_t i, j, l, k
    cdef double acc, tr
    c[n] = 1.0
    for k in range(1, n + 1):
        for i in range(n):
            for j in range(n):
                acc = 0.0
                for l in range(n):
                    acc += A[i, l] * m[l, j]
                t[i, j] = acc
            t[i, i] += c[n - k + 1]
        m[:, :] = t
        tr = 0.0
        for i in range(n):
            for l in range(n):
                tr += A[i, l] * m[l, i]
        c[n - k] = -tr / k
    return c_arr


cdef double complex _horner(double[::1] coeffs, double complex z) nogil:
    cdef Py_ssize_t d
    cdef double complex acc = 0.0
    for d in range(coeffs.shape[0] - 1, -1, -1):
        acc = acc * z + coeffs[d]
    return acc


cdef double _horner_abs(double[::1] coeffs, double r) nogil:
    cdef Py_ssize_t d
    cdef double acc = 0.0
    for d in range(coeffs.shape[0] - 1, -1, -1):
        acc = acc * r + fabs(coeffs[d])
    return acc


def durand_kerner(coeffs_in, int maxiter, double steptol):
    cdef double[::1] coeffs = np.ascontiguousarray(coeffs_in, dtype=np.float64)
    cdef Py_ssize_t n = coeffs.shape[0] - 1
    cdef Py_ssize_t i, j, it
    cdef double radius = 0.0, step, s, res, best_res = np.inf, ang
    cdef double complex denom, delta, zi
    cdef double floor_scale = 2.0 * n * DBL_EPSILON
    cdef bint at_floor
    for i in range(n):
        if fabs(coeffs[i]) > radius:
            radius = fabs(coeffs[i])
    radius += 1.0
    z_arr = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] z = z_arr
    for i in range(n):
        ang = 2.0 * M_PI * i / n + 0.4
        z[i] = radius * (cos(ang) + 1j * sin(ang))
    best = z_arr.copy()
    for it in range(1, maxiter + 1):
        step = 0.0
        for i in range(n):
            zi = z[i]
            denom = 1.0
            for j in range(n):
                if j != i:
                    denom = denom * (zi - z[j])
            if denom == 0:
                denom = 1e-300
            delta = _horner(coeffs, zi) / denom
            z[i] = zi - delta
            s = abs(delta) / max(1.0, abs(z[i]))
            if s > step:
                step = s
        res = 0.0
        at_floor = True
        for i in range(n):
            s = abs(_horner(coeffs, z[i]))
            if s > res:
                res = s
            # Horner rounding bound: no further step can reduce this residual
            if s > floor_scale * _horner_abs(coeffs, abs(z[i])):
                at_floor = False
        if res < best_res:
            best_res = res
            best = z_arr.copy()
        if step < steptol or at_floor:
            return z_arr, True, it, best, best_res
    return z_arr, False, maxiter, best, best_res


def rk4_linear(f_in, w0, double dt, Py_ssize_t nsteps, double limit):
    cdef double[:, ::1] f = np.ascontiguousarray(f_in, dtype=np.float64)
    cdef Py_ssize_t m = f.shape[0]
    out_arr = np.zeros((nsteps + 1, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] w = np.array(w0, dtype=np.float64, copy=True)
    cdef double[:, ::1] k = np.zeros((4, m), dtype=np.float64)
    cdef double[::1] tmp = np.zeros(m, dtype=np.float64)
    cdef double half = 0.5 * dt, sixth = dt / 6.0, acc
    cdef Py_ssize_t s, i, j
    cdef bint bad
    for i in range(m):
        out[0, i] = w[i]
    with nogil:
        for s in range(1, nsteps + 1):
            for i in range(m):
                acc = 0.0
                for j in range(m):
                    acc += f[i, j] * w[j]
                k[0, i] = acc
            for i in range(m):
                tmp[i] = w[i] + half * k[0, i]
            for i in range(m):
                acc = 0.0
                for j in range(m):
                    acc += f[i, j] * tmp[j]
                k[1, i] = acc
            for i in range(m):
                tmp[i] = w[i] + half * k[1, i]
            for i in range(m):
                acc = 0.0
                for j in range(m):
                    acc += f[i, j] * tmp[j]
                k[2, i] = acc
            for i in range(m):
                tmp[i] = w[i] + dt * k[2, i]
            for i in range(m):
                acc = 0.0
                for j in range(m):
                    acc += f[i, j] * tmp[j]
                k[3, i] = acc
            bad = False
            for i in range(m):
                w[i] = w[i] + sixth * (k[0, i] + 2.0 * k[1, i] + 2.0 * k[2, i] + k[3, i])
                out[s, i] = w[i]
                # NaN fails both comparisons
                if not (fabs(w[i]) <= limit):
                    bad = True
            if bad:
                with gil:
                    return out_arr, s
    return out_arr, -1
