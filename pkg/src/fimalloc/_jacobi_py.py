"""Pure-Python cyclic Jacobi kernels.

Same contract as the compiled ``_jacobi`` extension; used when it is not
built. Row/column updates are vectorised with numpy, the rotation schedule
is identical.
"""
import math

import numpy as np


def _sweep_until_diagonal(a, v, tol, max_sweeps):
    n = a.shape[0]
    iu = np.triu_indices(n, 1)
    for sweep in range(max_sweeps):
        off = float(np.sum(a[iu] ** 2))
        total = float(np.sum(np.diag(a) ** 2)) + 2.0 * off
        if off == 0.0 or math.sqrt(off) <= tol * math.sqrt(total):
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q]
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :]
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                if v is not None:
                    vp = v[:, p].copy()
                    vq = v[:, q]
                    v[:, p] = c * vp - s * vq
                    v[:, q] = s * vp + c * vq
    return -1


def jacobi_eigh(m, want_vectors=True, tol=1e-15, max_sweeps=100):
    a = np.array(m, dtype=np.float64, copy=True)
    n = a.shape[0]
    v = np.eye(n) if want_vectors else None
    sweeps = _sweep_until_diagonal(a, v, tol, max_sweeps)
    w = a.diagonal().copy()
    order = np.argsort(w, kind="stable")
    if want_vectors:
        return w[order], v[:, order], sweeps
    return w[order], None, sweeps


def min_eig_scaled(j, p, tol=1e-15, max_sweeps=100):
    s = np.sqrt(np.abs(np.asarray(p, dtype=np.float64)))
    a = np.asarray(j, dtype=np.float64) * np.outer(s, s)
    _sweep_until_diagonal(a, None, tol, max_sweeps)
    return float(a.diagonal().min())
