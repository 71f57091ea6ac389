"""Optimal power allocation under six Fisher-information criteria.

Every allocator takes a :class:`~fimalloc.model.FimBundle` and a total
power budget and returns an :class:`AllocationReport`. Bundles carrying
nuisance blocks are reduced to the relevant parameters first (nuisance
parameters keep unit power and are not part of the returned allocation).

Criteria and their objectives, with ``P = diag(sqrt(p))``:

==================  ====================================  =========
name                objective                             direction
==================  ====================================  =========
avg_mse             tr(P^-1 A P^-1) = sum a_ii / p_i      min
shannon             log det(P J P)                        max
worst_eigen         lambda_min(P J P)                     max
worst_coord_var     max_i a_ii / p_i                      min
avg_fi              tr(P J P) = sum p_i j_ii              max
worst_coord_fi      min_i p_i j_ii                        max
==================  ====================================  =========
"""
from __future__ import annotations

from dataclasses import dataclass, field
import enum
import math
import warnings

import numpy as np

from . import kernels, matrixops
from .errors import DegenerateProblemError, DomainError
from .model import FimBundle, build_fim_bundle
from .optimizer import MultistartOptions, multistart_maximize

ZERO_RTOL = 1e-14


class Criterion(str, enum.Enum):
    AVG_MSE = "avg_mse"
    SHANNON = "shannon"
    WORST_EIGEN = "worst_eigen"
    WORST_COORD_VAR = "worst_coord_var"
    AVG_FI = "avg_fi"
    WORST_COORD_FI = "worst_coord_fi"

    @property
    def maximize(self):
        return self not in (Criterion.AVG_MSE, Criterion.WORST_COORD_VAR)


CRITERIA = tuple(c.value for c in Criterion)


@dataclass(frozen=True)
class PowerAllocation:
    powers: np.ndarray
    budget: float

    def __post_init__(self):
        p = np.asarray(self.powers, dtype=np.float64)
        if not self.budget > 0 or not math.isfinite(self.budget):
            raise DomainError(f"budget must be positive and finite, got {self.budget}")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise DomainError(f"powers must be finite and nonnegative, got {p}")
        if p.sum() > self.budget * (1 + 1e-12):
            raise DomainError(f"powers sum to {p.sum()} which exceeds the budget {self.budget}")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "powers", p)

    @classmethod
    def equal(cls, k, budget):
        return cls(np.full(k, budget / k), budget)

    def with_nuisance(self, count):
        """Full power vector with ``count`` trailing unit-power nuisance entries."""
        return np.concatenate([self.powers, np.ones(count)])


@dataclass(frozen=True)
class AllocationReport:
    criterion: Criterion
    allocation: PowerAllocation
    objective_value: float
    baseline_objective: float
    certificate: dict = field(default_factory=dict)
    is_bound: bool = False
    converged: bool = True
    nuisance_count: int = 0

    @property
    def powers(self):
        return self.allocation.powers

    def to_dict(self):
        return {
            "criterion": self.criterion.value,
            "budget": self.allocation.budget,
            "powers": self.allocation.powers.tolist(),
            "objective_value": _json_float(self.objective_value),
            "equal_allocation_objective": _json_float(self.baseline_objective),
            "certificate": {k: _json_float(v) for k, v in self.certificate.items()},
            "is_bound": self.is_bound,
            "converged": self.converged,
            "nuisance_count": self.nuisance_count,
        }


def _json_float(v):
    if isinstance(v, (bool, int, str)) or v is None:
        return v
    v = float(v)
    if math.isfinite(v):
        return v
    return "inf" if v > 0 else ("-inf" if v < 0 else "nan")


# -- objectives -------------------------------------------------------------


def objective(criterion, bundle, powers):
    """Value of ``criterion`` at ``powers`` (relevant parameters only)."""
    c = Criterion(criterion)
    b = bundle.relevant()
    p = np.asarray(powers, dtype=np.float64)
    if c is Criterion.AVG_MSE:
        return _crlb_diag_sum(b.a_diag, p)
    if c is Criterion.WORST_COORD_VAR:
        return float(np.max(_crlb_diag(b.a_diag, p)))
    if c is Criterion.SHANNON:
        if np.any(p <= 0):
            return -math.inf
        return float(np.sum(np.log(p))) + matrixops.log_det(b.J)
    if c is Criterion.WORST_EIGEN:
        return float(kernels.min_eig_scaled(b.J, p))
    if c is Criterion.AVG_FI:
        return float(np.dot(p, b.j_diag))
    return float(np.min(p * b.j_diag))


def _crlb_diag(a_diag, p):
    out = np.zeros_like(a_diag)
    live = a_diag > ZERO_RTOL * a_diag.max() if a_diag.size else a_diag > 0
    with np.errstate(divide="ignore"):
        out[live] = a_diag[live] / p[live]
    return out


def _crlb_diag_sum(a_diag, p):
    return float(np.sum(_crlb_diag(a_diag, p)))


def _check_budget(budget):
    budget = float(budget)
    if not budget > 0 or not math.isfinite(budget):
        raise DomainError(f"budget must be positive and finite, got {budget}")
    return budget


def _report(criterion, bundle, p, budget, value, certificate, **kw):
    b = bundle.relevant()
    baseline = objective(criterion, b, np.full(b.k, budget / b.k))
    return AllocationReport(
        Criterion(criterion), PowerAllocation(p, budget), value, baseline, certificate,
        nuisance_count=bundle.nuisance_count, **kw,
    )


def _spread(x):
    x = np.asarray(x, dtype=np.float64)
    m = np.mean(x)
    return float((x.max() - x.min()) / abs(m)) if m != 0 else 0.0


def _active_a(a_diag):
    top = a_diag.max()
    if top <= 0:
        raise DegenerateProblemError("all CRLB diagonal entries a_ii are zero")
    return a_diag > ZERO_RTOL * top


# -- allocators -------------------------------------------------------------


def allocate_avg_mse(bundle, budget):
    """Minimise the CRLB trace: ``p_i = P sqrt(a_ii) / sum_j sqrt(a_jj)``.

    Coordinates with ``a_ii = 0`` receive no power and contribute nothing to
    the objective.
    """
    budget = _check_budget(budget)
    b = bundle.relevant()
    live = _active_a(b.a_diag)
    root = np.where(live, np.sqrt(b.a_diag), 0.0)
    p = budget * root / root.sum()
    value = float(np.sum(b.a_diag[live] / p[live]))
    ratio = root[live] / p[live]
    cert = {"stationarity_spread": float(np.max(np.abs(ratio - ratio.mean())) / ratio.mean())}
    return _report(Criterion.AVG_MSE, bundle, p, budget, value, cert)


def allocate_shannon(bundle, budget):
    """Maximise ``log det(P J P)``: equal power, value ``k log(P/k) + log det J``."""
    budget = _check_budget(budget)
    b = bundle.relevant()
    k = b.k
    p = np.full(k, budget / k)
    ld = matrixops.log_det(b.J)
    if ld == -math.inf:
        warnings.warn("J is singular; Shannon information is -inf", RuntimeWarning, stacklevel=2)
    value = k * math.log(budget / k) + ld
    return _report(Criterion.SHANNON, bundle, p, budget, value, {"log_det_J": ld})


def allocate_worst_eigen(bundle, budget, opts=None):
    """Maximise ``lambda_min(P J P)`` numerically by multistart search."""
    budget = _check_budget(budget)
    b = bundle.relevant()
    J = np.ascontiguousarray(b.J)
    if matrixops.min_eigenvalue(J) <= 0:
        raise DomainError("worst_eigen needs a positive definite J")
    opts = opts or MultistartOptions()
    res = multistart_maximize(lambda p: kernels.min_eig_scaled(J, p), b.k, budget, opts)
    baseline = kernels.min_eig_scaled(J, np.full(b.k, budget / b.k))
    cert = {
        "equal_allocation_lambda_min": baseline,
        "margin_over_equal": res.value - baseline,
        "converged_starts": res.converged_starts,
        "starts": res.starts,
        "evaluations": res.evaluations,
    }
    converged = res.converged_starts > 0 and res.value >= baseline - 1e-10
    return _report(Criterion.WORST_EIGEN, bundle, res.p, budget, res.value, cert, converged=converged)


def allocate_worst_eigen_bound(bundle, budget):
    """Equal power, which maximises the lower bound ``lambda_min(J) min_i p_i``.

    The reported value ``lambda_min(J) P / k`` is a bound, not the optimum
    of the worst-eigenvalue criterion.
    """
    budget = _check_budget(budget)
    b = bundle.relevant()
    lam = matrixops.min_eigenvalue(b.J)
    if lam < -1e-10 * max(abs(matrixops.sym_eigenvalues(b.J)[-1]), 1.0):
        raise DomainError(f"J is not positive semidefinite (min eigenvalue {lam:.3g})")
    p = np.full(b.k, budget / b.k)
    value = lam * budget / b.k
    return _report(Criterion.WORST_EIGEN, bundle, p, budget, value,
                   {"lambda_min_J": lam}, is_bound=True)


def allocate_worst_coord_var(bundle, budget):
    """Equalise the CRLB diagonal: ``p_i = P a_ii / tr(A)``, value ``tr(A) / P``."""
    budget = _check_budget(budget)
    b = bundle.relevant()
    live = _active_a(b.a_diag)
    a = np.where(live, b.a_diag, 0.0)
    trace = a.sum()
    p = budget * a / trace
    alpha = trace / budget
    cert = {"equalizer_spread": _spread(a[live] / p[live])}
    return _report(Criterion.WORST_COORD_VAR, bundle, p, budget, alpha, cert)


def allocate_avg_fi(bundle, budget):
    """All power on the largest ``j_ii`` (lowest index on ties)."""
    budget = _check_budget(budget)
    b = bundle.relevant()
    i = int(np.argmax(b.j_diag))
    p = np.zeros(b.k)
    p[i] = budget
    value = budget * b.j_diag[i]
    ties = int(np.sum(b.j_diag == b.j_diag[i]))
    return _report(Criterion.AVG_FI, bundle, p, budget, value,
                   {"chosen_index": i, "tied_maxima": ties})


def allocate_worst_coord_fi(bundle, budget):
    """Equalise ``p_i j_ii``: ``p_i = P / (j_ii sum_l 1/j_ll)``."""
    budget = _check_budget(budget)
    b = bundle.relevant()
    j = b.j_diag
    if np.any(j <= 0):
        raise DegenerateProblemError(
            f"worst_coord_fi needs every j_ii > 0; coordinates {np.flatnonzero(j <= 0).tolist()} carry no information"
        )
    inv_sum = np.sum(1.0 / j)
    p = budget / (j * inv_sum)
    alpha = budget / inv_sum
    cert = {"equalizer_spread": _spread(p * j)}
    return _report(Criterion.WORST_COORD_FI, bundle, p, budget, alpha, cert)


_ALLOCATORS = {
    Criterion.AVG_MSE: allocate_avg_mse,
    Criterion.SHANNON: allocate_shannon,
    Criterion.WORST_EIGEN: allocate_worst_eigen,
    Criterion.WORST_COORD_VAR: allocate_worst_coord_var,
    Criterion.AVG_FI: allocate_avg_fi,
    Criterion.WORST_COORD_FI: allocate_worst_coord_fi,
}


def allocate(bundle, criterion, budget, opts=None):
    """Dispatch to the allocator for ``criterion`` (name or :class:`Criterion`)."""
    try:
        c = Criterion(criterion)
    except ValueError:
        raise DomainError(f"unknown criterion {criterion!r}; valid: {', '.join(CRITERIA)}") from None
    if c is Criterion.WORST_EIGEN:
        return allocate_worst_eigen(bundle, budget, opts)
    return _ALLOCATORS[c](bundle, budget)


def allocate_nonlinear(model, criterion, budget, theta, opts=None, iterate=False,
                       max_iter=20, rtol=1e-6):
    """Allocate for a nonlinear model, optionally re-linearizing at ``phi = P theta``.

    With ``iterate=False`` the allocation uses the model's own linearization
    point. Otherwise the loop allocate -> re-linearize -> allocate runs until
    the relative change in powers drops below ``rtol`` or ``max_iter``
    rounds. Returns ``(report, rounds, converged)``.
    """
    theta = np.asarray(theta, dtype=np.float64)
    report = allocate(build_fim_bundle(model), criterion, budget, opts)
    if not iterate:
        return report, 1, True
    for rounds in range(2, max_iter + 1):
        full = report.allocation.with_nuisance(model.nuisance_count)
        model = model.at_point(np.sqrt(full) * theta)
        nxt = allocate(build_fim_bundle(model), criterion, budget, opts)
        change = np.linalg.norm(nxt.powers - report.powers) / np.linalg.norm(report.powers)
        report = nxt
        if change < rtol:
            return report, rounds, True
    return report, max_iter, False


__all__ = [
    "Criterion", "CRITERIA", "PowerAllocation", "AllocationReport", "objective", "allocate",
    "allocate_avg_mse", "allocate_shannon", "allocate_worst_eigen", "allocate_worst_eigen_bound",
    "allocate_worst_coord_var", "allocate_avg_fi", "allocate_worst_coord_fi", "allocate_nonlinear",
    "FimBundle",
]
