"""Multistart derivative-free maximisation on the scaled simplex.

Feasible set: ``{p >= 0, sum(p) = budget}``. Each start runs a Nelder-Mead
search whose ``k`` vertices live on the simplex (affine moves preserve the
sum, negatives are clamped and the point rescaled), so every evaluated
candidate is feasible. Starts are the equal-allocation point, the ``k``
corners, then uniform draws; the best point over all starts wins, ties
going to the lowest start index.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError, ObjectiveEvaluationError


@dataclass(frozen=True)
class MultistartOptions:
    restarts: int = 64
    max_iters_per_start: int = 500
    seed: int = 0
    tolerance: float = 1e-9
    initial_step: float = 0.1
    reflect: float = 1.0
    expand: float = 2.0
    contract: float = 0.5
    shrink: float = 0.5

    def __post_init__(self):
        if self.restarts < 1:
            raise DomainError(f"restarts must be >= 1, got {self.restarts}")
        if self.max_iters_per_start < 1:
            raise DomainError(f"max_iters_per_start must be >= 1, got {self.max_iters_per_start}")
        if not self.tolerance > 0:
            raise DomainError(f"tolerance must be positive, got {self.tolerance}")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be an unsigned 64-bit integer")
        if not (0 < self.contract < 1 and 0 < self.shrink < 1 and self.reflect > 0
                and self.expand > self.reflect):
            raise DomainError("invalid Nelder-Mead coefficients")


@dataclass(frozen=True)
class MultistartResult:
    p: np.ndarray
    value: float
    converged_starts: int
    starts: int
    evaluations: int
    best_start: int


def project(x, budget):
    """Clamp negatives to zero and rescale onto ``sum = budget``."""
    x = np.maximum(np.asarray(x, dtype=np.float64), 0.0)
    total = x.sum()
    if total <= 0.0:
        return np.full(x.size, budget / x.size)
    p = (x / total) * budget
    # push the rounding residue into the largest coordinate
    p[np.argmax(p)] += budget - p.sum()
    return p


def sample_simplex(k, budget, rng):
    """Uniform point on the scaled simplex via normalised exponential spacings."""
    if k < 1 or not budget > 0:
        raise DomainError(f"need k >= 1 and budget > 0, got k={k}, budget={budget}")
    if k == 1:
        return np.array([float(budget)])
    return project(rng.standard_exponential(k), budget)


class _Counter:
    def __init__(self, objective):
        self.objective = objective
        self.calls = 0

    def __call__(self, p):
        self.calls += 1
        v = float(self.objective(p))
        if not math.isfinite(v):
            raise ObjectiveEvaluationError(f"objective returned {v} at feasible point {p.tolist()}", p)
        return v


def _nelder_mead(f, x0, budget, opts):
    """Maximise ``f`` from ``x0``; returns (best point, best value, converged)."""
    k = x0.size
    step = opts.initial_step * budget
    iters = 0
    best_x, best_f = x0, f(x0)
    converged = False
    while iters < opts.max_iters_per_start:
        # k vertices spanning the feasible plane: step toward every corner
        # except the one nearest the current point
        t = min(step / budget, 0.5)
        skip = int(np.argmax(best_x))
        verts = [best_x]
        for i in range(k):
            if i != skip:
                corner = np.zeros(k)
                corner[i] = budget
                verts.append(project(best_x + t * (corner - best_x), budget))
        pts = np.array(verts)
        vals = np.array([best_f] + [f(v) for v in pts[1:]])
        while iters < opts.max_iters_per_start:
            iters += 1
            order = np.argsort(-vals, kind="stable")
            pts, vals = pts[order], vals[order]
            scale = max(1.0, abs(vals[0]))
            if vals[0] - vals[-1] <= opts.tolerance * scale:
                break
            centroid = pts[:-1].mean(axis=0)
            worst = pts[-1]
            xr = project(centroid + opts.reflect * (centroid - worst), budget)
            fr = f(xr)
            if fr > vals[0]:
                xe = project(centroid + opts.expand * (centroid - worst), budget)
                fe = f(xe)
                if fe > fr:
                    pts[-1], vals[-1] = xe, fe
                else:
                    pts[-1], vals[-1] = xr, fr
            elif fr > vals[-2]:
                pts[-1], vals[-1] = xr, fr
            else:
                if fr > vals[-1]:
                    xc = project(centroid + opts.contract * (xr - centroid), budget)
                else:
                    xc = project(centroid + opts.contract * (worst - centroid), budget)
                fc = f(xc)
                if fc > max(fr, vals[-1]):
                    pts[-1], vals[-1] = xc, fc
                else:
                    for i in range(1, len(pts)):
                        pts[i] = project(pts[0] + opts.shrink * (pts[i] - pts[0]), budget)
                        vals[i] = f(pts[i])
        i_best = int(np.argmax(vals))
        improved = vals[i_best] - best_f > opts.tolerance * max(1.0, abs(best_f))
        if vals[i_best] > best_f:
            best_x, best_f = pts[i_best], float(vals[i_best])
        if not improved and vals.max() - vals.min() <= opts.tolerance * max(1.0, abs(vals.max())):
            # a restart with a fresh small simplex found nothing better: done
            if step <= opts.initial_step * budget * 1e-3:
                converged = True
                break
        step *= 0.1
    return best_x, best_f, converged


def _start_points(k, budget, opts):
    starts = [np.full(k, budget / k)]
    for i in range(k):
        corner = np.zeros(k)
        corner[i] = budget
        starts.append(corner)
    starts = starts[: opts.restarts]
    if len(starts) < opts.restarts:
        seeds = np.random.SeedSequence(opts.seed).spawn(opts.restarts - len(starts))
        starts.extend(sample_simplex(k, budget, np.random.default_rng(s)) for s in seeds)
    return starts


def multistart_maximize(objective, k, budget, opts=None):
    """Maximise ``objective(p)`` over ``{p >= 0, sum(p) = budget}``.

    Deterministic for fixed ``opts``. Raises :class:`ObjectiveEvaluationError`
    if the objective returns a non-finite value at a feasible point.
    """
    opts = opts or MultistartOptions()
    if k < 1 or not budget > 0:
        raise DomainError(f"need k >= 1 and budget > 0, got k={k}, budget={budget}")
    f = _Counter(objective)
    if k == 1:
        p = np.array([float(budget)])
        return MultistartResult(p, f(p), 1, 1, f.calls, 0)

    best_p, best_v, best_i = None, -math.inf, -1
    converged = 0
    starts = _start_points(k, budget, opts)
    for i, x0 in enumerate(starts):
        p, v, ok = _nelder_mead(f, x0, budget, opts)
        converged += ok
        if v > best_v:
            best_p, best_v, best_i = p, v, i
    return MultistartResult(best_p, best_v, converged, len(starts), f.calls, best_i)
