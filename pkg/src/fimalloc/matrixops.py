"""Dense symmetric-matrix primitives.

Symmetric matrices are plain 2-D float64 numpy arrays; :func:`as_symmetric`
is the gatekeeper that validates and symmetrises them. Eigen-decompositions
use the cyclic Jacobi kernels from :mod:`fimalloc.kernels`.
"""
from typing import NamedTuple
import warnings

import numpy as np

from . import kernels
from .errors import DomainError, SingularMatrixError

SYMMETRY_RTOL = 1e-12
RANK_RTOL = 1e-12


class EigenDecomposition(NamedTuple):
    """Eigenvalues in ascending order with matching orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


def as_symmetric(m, name="matrix"):
    """Return ``m`` as a finite, exactly symmetric float64 array.

    Asymmetry beyond ``1e-12 * max(1, |m_ij|)`` triggers a ``RuntimeWarning``;
    the result is always ``(m + m.T) / 2``.
    """
    a = np.array(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise DomainError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} has non-finite entries")
    gap = np.abs(a - a.T)
    if np.any(gap > SYMMETRY_RTOL * np.maximum(1.0, np.abs(a))):
        warnings.warn(
            f"{name} is asymmetric (max |m - m.T| = {gap.max():.3g}); symmetrising",
            RuntimeWarning,
            stacklevel=2,
        )
    return 0.5 * (a + a.T)


def sym_eigen(m):
    a = as_symmetric(m)
    w, v, sweeps = kernels.jacobi_eigh(a, True)
    if sweeps < 0:
        warnings.warn("Jacobi iteration hit the sweep limit", RuntimeWarning, stacklevel=2)
    return EigenDecomposition(w, v)


def sym_eigenvalues(m):
    """Ascending eigenvalues only; cheaper than :func:`sym_eigen`."""
    w, _, _ = kernels.jacobi_eigh(as_symmetric(m), False)
    return w


def min_eigenvalue(m):
    return float(sym_eigenvalues(m)[0])


def _check_invertible(w, name):
    scale = np.max(np.abs(w))
    smallest = float(w[np.argmin(np.abs(w))])
    if scale == 0.0 or abs(smallest) <= RANK_RTOL * scale:
        raise SingularMatrixError(
            f"{name} is singular within tolerance: min |eigenvalue| = {abs(smallest):.3g}, "
            f"max |eigenvalue| = {scale:.3g}",
            min_eigenvalue=smallest,
        )


def sym_inverse(m, name="matrix"):
    """Inverse of a symmetric matrix via its eigen-decomposition.

    Raises
    ------
    SingularMatrixError
        If ``min|eig| <= 1e-12 * max|eig|``.
    """
    a = as_symmetric(m, name)
    w, v, _ = kernels.jacobi_eigh(a, True)
    _check_invertible(w, name)
    inv = (v / w) @ v.T
    return 0.5 * (inv + inv.T)


def log_det(m):
    """log det of a symmetric positive definite matrix; ``-inf`` if singular or indefinite."""
    w = sym_eigenvalues(m)
    scale = np.max(np.abs(w))
    if scale == 0.0 or w[0] <= RANK_RTOL * scale:
        return -np.inf
    return float(np.sum(np.log(w)))


def schur_reduce(m, r):
    """Inverse of the Schur complement of the trailing block.

    For ``m = [[Jg, B], [B.T, Js]]`` with ``Jg`` of size ``r x r`` this
    returns ``(Jg - B Js^{-1} B.T)^{-1}``, the top-left block of ``m^{-1}``.
    """
    a = as_symmetric(m)
    k = a.shape[0]
    if not 1 <= r < k:
        raise DomainError(f"partition size r={r} must satisfy 1 <= r < {k}")
    jg = a[:r, :r]
    b = a[:r, r:]
    js_inv = sym_inverse(a[r:, r:], name="trailing (nuisance) block")
    return sym_inverse(jg - b @ js_inv @ b.T, name="Schur complement")
