"""Observation model ``X = F^T P theta + N`` and its Fisher information.

``F`` is ``k x n`` (k parameters, n observations), ``P = diag(sqrt(p))``.
The FIM of ``X`` with respect to ``theta`` is ``P J P`` with
``J = F I(N) F^T``, where ``I(N)`` is the Fisher information of the noise
under translation. For ``X = f(P theta) + N`` the same holds with ``F``
replaced by the transposed Jacobian of ``f`` at ``phi = P theta``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import Callable, Optional, Union

import numpy as np

from . import matrixops
from .errors import DomainError, RankError
from .quadrature import adaptive_simpson

PSD_RTOL = 1e-10


def _frozen(a):
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


# -- noise ------------------------------------------------------------------


@dataclass(frozen=True)
class GaussianNoise:
    """Independent zero-mean Gaussian noise, ``Sigma = diag(variances)``."""

    variances: np.ndarray

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.variances, dtype=np.float64))
        if v.ndim != 1 or v.size == 0:
            raise DomainError("variances must be a non-empty vector")
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise DomainError(f"variances must be finite and strictly positive, got {v}")
        object.__setattr__(self, "variances", _frozen(v))

    @property
    def dim(self):
        return self.variances.size


@dataclass(frozen=True)
class CustomFimNoise:
    """Noise described directly by its (positive semidefinite) translation FIM."""

    fim: np.ndarray

    def __post_init__(self):
        m = matrixops.as_symmetric(self.fim, "noise FIM")
        w = matrixops.sym_eigenvalues(m)
        if w[0] < -PSD_RTOL * max(w[-1], 0.0):
            raise DomainError(f"noise FIM is not positive semidefinite (min eigenvalue {w[0]:.3g})")
        object.__setattr__(self, "fim", _frozen(m))

    @property
    def dim(self):
        return self.fim.shape[0]


@dataclass(frozen=True)
class DensityComponent:
    """One scalar noise component for quadrature.

    ``log_density_and_derivative(x)`` returns ``(log f(x), d/dx log f(x))``;
    the integrand ``f (d log f)^2`` is integrated over ``[lower, upper]``.
    """

    log_density_and_derivative: Callable[[float], tuple]
    lower: float
    upper: float


@dataclass(frozen=True)
class IndependentDensityNoise:
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise DomainError("need at least one density component")

    @property
    def dim(self):
        return len(self.components)


NoiseModel = Union[GaussianNoise, CustomFimNoise, IndependentDensityNoise]


def scalar_fisher_information(component, tol=1e-8):
    """``int (f'(x))^2 / f(x) dx`` for one density component."""
    fn = component.log_density_and_derivative

    def integrand(x):
        logf, score = fn(x)
        if logf == -math.inf:
            return 0.0
        return math.exp(logf) * score * score

    value, _ = adaptive_simpson(integrand, component.lower, component.upper, tol=tol)
    return value


def noise_fim(noise, n=None):
    """Translation FIM ``I(N)`` of a noise model as an ``n x n`` array."""
    if n is not None and n != noise.dim:
        raise DomainError(f"noise model has dimension {noise.dim}, expected {n}")
    if isinstance(noise, GaussianNoise):
        return np.diag(1.0 / noise.variances)
    if isinstance(noise, CustomFimNoise):
        return np.array(noise.fim)
    if isinstance(noise, IndependentDensityNoise):
        return np.diag([scalar_fisher_information(c) for c in noise.components])
    raise TypeError(f"unsupported noise model {type(noise).__name__}")


# -- channels ---------------------------------------------------------------


@dataclass(frozen=True)
class LinearChannel:
    F: np.ndarray

    def __post_init__(self):
        f = np.array(self.F, dtype=np.float64)
        if f.ndim != 2 or 0 in f.shape:
            raise DomainError(f"F must be a non-empty k x n matrix, got shape {f.shape}")
        if not np.all(np.isfinite(f)):
            raise DomainError("F has non-finite entries")
        object.__setattr__(self, "F", _frozen(f))

    @property
    def shape(self):
        return self.F.shape


@dataclass(frozen=True)
class NonlinearChannel:
    """``X = f(phi) + N`` with ``phi = P theta``.

    ``fn`` maps a length-k vector to a length-n vector. ``jacobian``, if
    given, returns the standard ``n x k`` matrix ``d f_i / d phi_j``.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    k: int
    n: int
    linearization_point: np.ndarray
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        pt = np.atleast_1d(np.asarray(self.linearization_point, dtype=np.float64))
        if pt.shape != (self.k,):
            raise DomainError(f"linearization point must have length {self.k}, got {pt.shape}")
        if not np.all(np.isfinite(pt)):
            raise DomainError("linearization point has non-finite entries")
        object.__setattr__(self, "linearization_point", _frozen(pt))

    @property
    def shape(self):
        return (self.k, self.n)


Channel = Union[LinearChannel, NonlinearChannel]


def _rank_check(F, what):
    w = np.sqrt(np.clip(matrixops.sym_eigenvalues(F @ F.T), 0.0, None))
    if w[-1] == 0.0 or w[0] <= matrixops.RANK_RTOL * w[-1]:
        raise RankError(
            f"{what} ({F.shape[0]}x{F.shape[1]}) lacks full row rank: "
            f"smallest singular value {w[0]:.3g}, largest {w[-1]:.3g}"
        )


@dataclass(frozen=True)
class SystemModel:
    """Channel + noise + count of trailing nuisance parameters."""

    channel: Channel
    noise: NoiseModel
    nuisance_count: int = 0

    def __post_init__(self):
        k, n = self.channel.shape
        if k > n:
            raise DomainError(f"need k <= n, got k={k}, n={n}")
        if self.noise.dim != n:
            raise DomainError(f"noise dimension {self.noise.dim} does not match n={n}")
        if not 0 <= self.nuisance_count < k:
            raise DomainError(f"nuisance_count must lie in [0, {k - 1}], got {self.nuisance_count}")
        if isinstance(self.channel, LinearChannel):
            _rank_check(self.channel.F, "F")

    @property
    def k(self):
        return self.channel.shape[0]

    @property
    def n(self):
        return self.channel.shape[1]

    @property
    def relevant_count(self):
        return self.k - self.nuisance_count

    @classmethod
    def linear(cls, F, variances=None, *, fim=None, nuisance_count=0):
        """Shorthand for a linear model with Gaussian noise or an explicit noise FIM."""
        if (variances is None) == (fim is None):
            raise ValueError("give exactly one of variances or fim")
        noise = GaussianNoise(variances) if fim is None else CustomFimNoise(fim)
        return cls(LinearChannel(F), noise, nuisance_count)

    def at_point(self, point):
        """Same nonlinear model re-linearized at ``phi = point``."""
        ch = self.channel
        if not isinstance(ch, NonlinearChannel):
            return self
        moved = NonlinearChannel(ch.fn, ch.k, ch.n, point, ch.jacobian)
        return SystemModel(moved, self.noise, self.nuisance_count)


def finite_difference_jacobian(fn, point):
    """Central differences, step ``1e-6 * max(1, |phi_i|)``; returns ``n x k``."""
    point = np.asarray(point, dtype=np.float64)
    cols = []
    for i in range(point.size):
        h = 1e-6 * max(1.0, abs(point[i]))
        up = point.copy()
        dn = point.copy()
        up[i] += h
        dn[i] -= h
        cols.append((np.asarray(fn(up), dtype=np.float64) - np.asarray(fn(dn), dtype=np.float64)) / (2 * h))
    return np.column_stack(cols)


def effective_channel(model):
    """The ``k x n`` matrix playing the role of ``F`` in ``J = F I(N) F^T``."""
    ch = model.channel
    if isinstance(ch, LinearChannel):
        return np.array(ch.F)
    pt = ch.linearization_point
    if ch.jacobian is not None:
        jac = np.asarray(ch.jacobian(pt), dtype=np.float64)
    else:
        jac = finite_difference_jacobian(ch.fn, pt)
    if jac.shape != (ch.n, ch.k):
        raise DomainError(f"Jacobian must be {ch.n}x{ch.k}, got {jac.shape}")
    if not np.all(np.isfinite(jac)):
        raise DomainError(f"Jacobian has non-finite entries at {pt}")
    F = jac.T
    _rank_check(F, "Jacobian")
    return F


# -- FIM bundle -------------------------------------------------------------


@dataclass(frozen=True)
class ReducedBlocks:
    J_gamma: np.ndarray
    A_gamma: np.ndarray


@dataclass(frozen=True)
class FimBundle:
    """``J``, ``A`` and their diagonals, plus the nuisance-reduced blocks if any.

    ``A`` is ``J^{-1}`` for bundles built from a model. Bundles for the
    relevant parameters only (:meth:`relevant`) pair ``J_gamma`` with
    ``A_gamma = (J_gamma - B J_sigma^{-1} B^T)^{-1}``, which is not
    ``J_gamma^{-1}``.
    """

    J: np.ndarray
    A: np.ndarray
    reduced: Optional[ReducedBlocks] = None
    j_diag: np.ndarray = field(init=False)
    a_diag: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "J", _frozen(self.J))
        object.__setattr__(self, "A", _frozen(self.A))
        object.__setattr__(self, "j_diag", _frozen(np.diag(self.J)))
        object.__setattr__(self, "a_diag", _frozen(np.clip(np.diag(self.A), 0.0, None)))

    @property
    def k(self):
        return self.J.shape[0]

    @property
    def nuisance_count(self):
        return 0 if self.reduced is None else self.k - self.reduced.J_gamma.shape[0]

    @classmethod
    def from_matrices(cls, J, A=None):
        """Bundle from explicit matrices; ``A`` defaults to ``J^{-1}``."""
        J = matrixops.as_symmetric(J, "J")
        A = matrixops.sym_inverse(J, "J") if A is None else matrixops.as_symmetric(A, "A")
        if A.shape != J.shape:
            raise DomainError(f"A shape {A.shape} does not match J shape {J.shape}")
        return cls(J, A)

    def relevant(self):
        """Bundle restricted to the relevant (non-nuisance) parameters."""
        if self.reduced is None:
            return self
        return FimBundle(self.reduced.J_gamma, self.reduced.A_gamma)


def fim_from_channel(F, fim_noise):
    J = F @ fim_noise @ F.T
    return 0.5 * (J + J.T)


def build_fim_bundle(model):
    F = effective_channel(model)
    J = fim_from_channel(F, noise_fim(model.noise, model.n))
    A = matrixops.sym_inverse(J, "J = F I(N) F^T")
    reduced = None
    s = model.nuisance_count
    if s > 0:
        r = model.k - s
        reduced = ReducedBlocks(_frozen(J[:r, :r]), _frozen(matrixops.schur_reduce(J, r)))
    return FimBundle(J, A, reduced)


def fim(bundle, powers):
    """The FIM ``P J P`` for a power vector (length ``bundle.k``)."""
    s = np.sqrt(np.asarray(powers, dtype=np.float64))
    return bundle.J * np.outer(s, s)


def crlb(bundle, powers):
    """``P^{-1} A P^{-1}``; entries with zero power are ``inf``."""
    s = np.sqrt(np.asarray(powers, dtype=np.float64))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = bundle.A / np.outer(s, s)
    return np.where(np.isnan(out), 0.0, out)


def as_vector(x, length, name):
    v = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if v.shape != (length,):
        raise DomainError(f"{name} must have length {length}, got shape {v.shape}")
    return v


__all__ = [
    "GaussianNoise", "CustomFimNoise", "DensityComponent", "IndependentDensityNoise",
    "LinearChannel", "NonlinearChannel", "SystemModel", "FimBundle", "ReducedBlocks",
    "noise_fim", "effective_channel", "build_fim_bundle", "finite_difference_jacobian",
    "scalar_fisher_information", "fim", "crlb",
]
