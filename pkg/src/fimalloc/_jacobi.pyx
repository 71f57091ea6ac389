# cython: language_level=3
"""Compiled cyclic Jacobi kernels for dense real symmetric matrices."""
from libc.math cimport sqrt, fabs

import numpy as np


cdef inline void _rotate(double[:, ::1] a, double[:, ::1] v, Py_ssize_t n,
                         Py_ssize_t p, Py_ssize_t q, bint want_vectors) noexcept nogil:
    cdef double apq = a[p, q]
    cdef double theta, t, c, s, arp, arq
    cdef Py_ssize_t r
    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
    if theta >= 0.0:
        t = 1.0 / (theta + sqrt(theta * theta + 1.0))
    else:
        t = -1.0 / (-theta + sqrt(theta * theta + 1.0))
    c = 1.0 / sqrt(t * t + 1.0)
    s = t * c
    for r in range(n):
        arp = a[r, p]
        arq = a[r, q]
        a[r, p] = c * arp - s * arq
        a[r, q] = s * arp + c * arq
    for r in range(n):
        arp = a[p, r]
        arq = a[q, r]
        a[p, r] = c * arp - s * arq
        a[q, r] = s * arp + c * arq
    a[p, q] = 0.0
    a[q, p] = 0.0
    if want_vectors:
        for r in range(n):
            arp = v[r, p]
            arq = v[r, q]
            v[r, p] = c * arp - s * arq
            v[r, q] = s * arp + c * arq


cdef int _sweep_until_diagonal(double[:, ::1] a, double[:, ::1] v, Py_ssize_t n,
                               bint want_vectors, double tol, int max_sweeps) noexcept nogil:
    cdef Py_ssize_t p, q
    cdef int sweep
    cdef double off, total, x
    for sweep in range(max_sweeps):
        off = 0.0
        total = 0.0
        for p in range(n):
            total += a[p, p] * a[p, p]
            for q in range(p + 1, n):
                x = a[p, q]
                off += x * x
        total += 2.0 * off
        if off == 0.0 or sqrt(off) <= tol * sqrt(total):
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] != 0.0:
                    _rotate(a, v, n, p, q, want_vectors)
    return -1


def jacobi_eigh(m, bint want_vectors=True, double tol=1e-15, int max_sweeps=100):
    """Eigen-decompose a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors, sweeps)`` with eigenvalues ascending.
    ``eigenvectors`` is None when ``want_vectors`` is false; ``sweeps`` is -1
    if ``max_sweeps`` was exhausted.
    """
    cdef double[:, ::1] a = np.array(m, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = a.shape[0]
    v_arr = np.eye(n) if want_vectors else np.zeros((1, 1))
    cdef double[:, ::1] v = v_arr
    cdef int sweeps
    with nogil:
        sweeps = _sweep_until_diagonal(a, v, n, want_vectors, tol, max_sweeps)
    w = np.asarray(a).diagonal().copy()
    order = np.argsort(w, kind="stable")
    if want_vectors:
        return w[order], v_arr[:, order], sweeps
    return w[order], None, sweeps


def min_eig_scaled(j, p, double tol=1e-15, int max_sweeps=100):
    """Smallest eigenvalue of diag(sqrt(p)) @ j @ diag(sqrt(p))."""
    cdef const double[:, ::1] jv = np.ascontiguousarray(j, dtype=np.float64)
    cdef const double[::1] pv = np.ascontiguousarray(p, dtype=np.float64)
    cdef Py_ssize_t n = jv.shape[0]
    a_arr = np.empty((n, n))
    cdef double[:, ::1] a = a_arr
    cdef double[:, ::1] v = np.zeros((1, 1))
    cdef Py_ssize_t r, c
    cdef double best
    with nogil:
        for r in range(n):
            for c in range(n):
                a[r, c] = sqrt(fabs(pv[r]) * fabs(pv[c])) * jv[r, c]
        _sweep_until_diagonal(a, v, n, False, tol, max_sweeps)
        best = a[0, 0]
        for r in range(1, n):
            if a[r, r] < best:
                best = a[r, r]
    return best
