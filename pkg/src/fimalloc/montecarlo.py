"""Monte Carlo check that the efficient estimator attains the CRLB.

For ``X = H theta + N`` with ``H = F^T P`` and ``N ~ N(0, Sigma)`` the
weighted least-squares estimate ``(H^T S^-1 H)^-1 H^T S^-1 X`` is the ML
estimator, unbiased with covariance equal to the inverse FIM. Trials run
in fixed-size batches, each with its own Philox stream derived from the
seed, so the result does not depend on batch scheduling.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from . import matrixops
from .errors import DomainError
from .model import GaussianNoise, LinearChannel, SystemModel

BATCH = 8192
ZERO_POWER_RTOL = 1e-14


@dataclass(frozen=True)
class TrialConfig:
    model: SystemModel
    powers: np.ndarray
    trials: int = 100_000
    seed: int = 0
    theta_true: np.ndarray | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials}")
        if not isinstance(self.model.noise, GaussianNoise):
            raise DomainError("Monte Carlo validation needs Gaussian diagonal noise")
        if not isinstance(self.model.channel, LinearChannel):
            raise DomainError("Monte Carlo validation needs a linear channel")
        k = self.model.k
        p = np.asarray(self.powers, dtype=np.float64)
        if p.shape == (k - self.model.nuisance_count,) and self.model.nuisance_count:
            p = np.concatenate([p, np.ones(self.model.nuisance_count)])
        if p.shape != (k,) or np.any(p < 0) or not np.all(np.isfinite(p)):
            raise DomainError(f"powers must be {k} finite nonnegative values, got {p}")
        theta = np.ones(k) if self.theta_true is None else np.asarray(self.theta_true, dtype=np.float64)
        if theta.shape != (k,):
            raise DomainError(f"theta_true must have length {k}")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "powers", p)
        object.__setattr__(self, "theta_true", theta)


@dataclass(frozen=True)
class TrialSummary:
    trials: int
    coordinates: list
    excluded: list
    empirical_avg_mse: float
    per_coordinate_mse: np.ndarray
    crlb_trace: float
    crlb_diag: np.ndarray
    ratio: np.ndarray
    ratio_standard_error: float
    mean_estimate: np.ndarray
    bias_standard_error: np.ndarray

    @property
    def rank_deficient(self):
        return bool(self.excluded)

    def to_dict(self):
        return {
            "trials": self.trials,
            "coordinates": self.coordinates,
            "excluded": self.excluded,
            "rank_deficient": self.rank_deficient,
            "empirical_avg_mse": self.empirical_avg_mse,
            "per_coordinate_mse": self.per_coordinate_mse.tolist(),
            "crlb_trace": self.crlb_trace,
            "crlb_diag": self.crlb_diag.tolist(),
            "ratio": self.ratio.tolist(),
            "ratio_standard_error": self.ratio_standard_error,
            "mean_estimate": self.mean_estimate.tolist(),
            "bias_standard_error": self.bias_standard_error.tolist(),
        }


def run_trials(cfg):
    """Simulate, estimate and compare against the CRLB.

    Coordinates with zero power are unidentifiable: they are dropped from the
    estimator (their columns of ``H`` vanish) and listed in ``excluded``. The
    CRLB reported is that of the estimated coordinates.
    """
    model = cfg.model
    F = np.asarray(model.channel.F)
    var = np.asarray(model.noise.variances)
    p = cfg.powers
    live = p > ZERO_POWER_RTOL * p.max() if p.max() > 0 else np.zeros(p.size, bool)
    coords = np.flatnonzero(live)
    if coords.size == 0:
        raise DomainError("every coordinate has zero power; nothing to estimate")

    H = F.T * np.sqrt(p)[None, :]                 # n x k
    Hs = H[:, coords]
    info = Hs.T @ (Hs / var[:, None])             # FIM of the estimated coordinates
    cov = matrixops.sym_inverse(info, "H^T Sigma^-1 H")
    G = cov @ (Hs.T / var[None, :])               # estimator matrix, |coords| x n
    mean_x = H @ cfg.theta_true
    sd = np.sqrt(var)
    truth = cfg.theta_true[coords]

    n_batches = -(-cfg.trials // BATCH)
    streams = np.random.SeedSequence(cfg.seed).spawn(n_batches)
    err_sum, sq_sum = [], []
    for b, ss in enumerate(streams):
        size = min(BATCH, cfg.trials - b * BATCH)
        rng = np.random.Generator(np.random.Philox(ss))
        X = mean_x + rng.standard_normal((size, var.size)) * sd
        err = X @ G.T - truth
        err_sum.append(err.sum(axis=0))
        sq_sum.append((err * err).sum(axis=0))
    m = coords.size
    mean_err = np.array([math.fsum(e[j] for e in err_sum) for j in range(m)]) / cfg.trials
    mse = np.array([math.fsum(s[j] for s in sq_sum) for j in range(m)]) / cfg.trials
    var_err = np.maximum(mse - mean_err**2, 0.0)

    crlb_diag = np.diag(cov).copy()
    return TrialSummary(
        trials=cfg.trials,
        coordinates=coords.tolist(),
        excluded=np.flatnonzero(~live).tolist(),
        empirical_avg_mse=float(math.fsum(mse)),
        per_coordinate_mse=mse,
        crlb_trace=float(math.fsum(crlb_diag)),
        crlb_diag=crlb_diag,
        ratio=mse / crlb_diag,
        ratio_standard_error=math.sqrt(2.0 / cfg.trials),
        mean_estimate=truth + mean_err,
        bias_standard_error=np.sqrt(var_err / cfg.trials),
    )
