# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. See ``_kernels_py.py`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, pow

cnp.import_array()


cdef int _solve_small(double[:, ::1] A, double[::1] b, double[::1] x,
                      int n, double rank_tol) noexcept nogil:
    # Gaussian elimination with partial pivoting in place on A, b.
    # Rejects the system when a pivot falls below rank_tol; rows are unit
    # vectors so the pivot is a proxy for the smallest singular value.
    cdef int i, j, k, piv
    cdef double m, t, best
    for k in range(n):
        piv = k
        best = fabs(A[k, k])
        for i in range(k + 1, n):
            if fabs(A[i, k]) > best:
                best = fabs(A[i, k])
                piv = i
        if best <= rank_tol:
            return 0
        if piv != k:
            for j in range(n):
                t = A[k, j]; A[k, j] = A[piv, j]; A[piv, j] = t
            t = b[k]; b[k] = b[piv]; b[piv] = t
        for i in range(k + 1, n):
            m = A[i, k] / A[k, k]
            if m != 0.0:
                for j in range(k, n):
                    A[i, j] -= m * A[k, j]
                b[i] -= m * b[k]
    for i in range(n - 1, -1, -1):
        t = b[i]
        for j in range(i + 1, n):
            t -= A[i, j] * x[j]
        x[i] = t / A[i, i]
    return 1


def enumerate_vertices(U, h, double rank_tol, double feas_tol, double merge_tol):
    cdef const double[:, ::1] Uv = np.ascontiguousarray(U, dtype=np.float64)
    cdef const double[::1] hv = np.ascontiguousarray(h, dtype=np.float64)
    cdef int N = Uv.shape[0]
    cdef int n = Uv.shape[1]
    if N < n:
        return np.empty((0, n))
    cdef cnp.intp_t[::1] comb = np.arange(n, dtype=np.intp)
    cdef double[:, ::1] A = np.empty((n, n))
    cdef double[::1] b = np.empty(n)
    cdef double[::1] x = np.empty(n)
    cap = 64
    out_arr = np.empty((cap, n))
    cdef double[:, ::1] out = out_arr
    cdef int nout = 0
    cdef int i, j, k, feasible, dup
    cdef double s, d
    while True:
        for i in range(n):
            for j in range(n):
                A[i, j] = Uv[comb[i], j]
            b[i] = hv[comb[i]]
        if _solve_small(A, b, x, n, rank_tol):
            feasible = 1
            for k in range(N):
                s = 0.0
                for j in range(n):
                    s += Uv[k, j] * x[j]
                if s - hv[k] > feas_tol:
                    feasible = 0
                    break
            if feasible:
                dup = 0
                for k in range(nout):
                    d = 0.0
                    for j in range(n):
                        d += (out[k, j] - x[j]) * (out[k, j] - x[j])
                    if sqrt(d) <= merge_tol:
                        dup = 1
                        break
                if not dup:
                    if nout == cap:
                        cap *= 2
                        new = np.empty((cap, n))
                        new[:nout] = out_arr[:nout]
                        out_arr = new
                        out = out_arr
                    for j in range(n):
                        out[nout, j] = x[j]
                    nout += 1
        # next combination in lexicographic order
        i = n - 1
        while i >= 0 and comb[i] == N - n + i:
            i -= 1
        if i < 0:
            break
        comb[i] += 1
        for j in range(i + 1, n):
            comb[j] = comb[j - 1] + 1
    return np.array(out_arr[:nout])


def phi_terms(U, h, xi, alpha, double p):
    cdef const double[:, ::1] Uv = np.ascontiguousarray(U, dtype=np.float64)
    cdef const double[::1] hv = np.ascontiguousarray(h, dtype=np.float64)
    cdef const double[::1] xv = np.ascontiguousarray(xi, dtype=np.float64)
    cdef const double[::1] av = np.ascontiguousarray(alpha, dtype=np.float64)
    cdef int N = Uv.shape[0]
    cdef int n = Uv.shape[1]
    cdef int i, j, k
    cdef double s, sp, w1, w2, smin = 1e308, value = 0.0
    grad_arr = np.zeros(n)
    hess_arr = np.zeros((n, n))
    cdef double[::1] g = grad_arr
    cdef double[:, ::1] H = hess_arr
    for k in range(N):
        s = hv[k]
        for j in range(n):
            s -= Uv[k, j] * xv[j]
        if s < smin:
            smin = s
        if s <= 0.0:
            return float("nan"), None, None, smin
        sp = av[k] * pow(s, p)
        value += sp
        w1 = -p * sp / s
        w2 = p * (p - 1.0) * sp / (s * s)
        for i in range(n):
            g[i] += w1 * Uv[k, i]
            for j in range(i + 1):
                H[i, j] += w2 * Uv[k, i] * Uv[k, j]
    for i in range(n):
        for j in range(i + 1, n):
            H[i, j] = H[j, i]
    return value, grad_arr, hess_arr, smin
