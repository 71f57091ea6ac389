import numpy as np
import pytest

from fimalloc.errors import DomainError
from fimalloc.model import GaussianNoise, NonlinearChannel, SystemModel
from fimalloc.montecarlo import TrialConfig, run_trials


def test_identity_channel_attains_bound():
    model = SystemModel.linear(np.eye(3), np.ones(3))
    s = run_trials(TrialConfig(model, np.full(3, 1 / 3), trials=40_000, seed=7))
    assert s.crlb_trace == pytest.approx(9.0)
    assert abs(s.empirical_avg_mse / s.crlb_trace - 1) < 0.03
    assert np.all(np.abs(s.mean_estimate - 1.0) < 4 * s.bias_standard_error)
    assert not s.rank_deficient


def test_correlated_channel_per_coordinate_ratio(rng):
    F = rng.standard_normal((3, 5))
    var = rng.uniform(0.5, 2.0, 5)
    model = SystemModel.linear(F, var)
    p = np.array([0.2, 0.5, 0.3])
    s = run_trials(TrialConfig(model, p, trials=50_000, seed=3, theta_true=np.array([1.0, -2.0, 0.5])))
    P = np.diag(np.sqrt(p))
    cov = np.linalg.inv(P @ F @ np.diag(1 / var) @ F.T @ P)
    np.testing.assert_allclose(s.crlb_diag, np.diag(cov), rtol=1e-9)
    assert np.all(np.abs(s.ratio - 1) < 5 * s.ratio_standard_error)


def test_zero_power_coordinates_excluded():
    model = SystemModel.linear(np.eye(3), np.ones(3))
    s = run_trials(TrialConfig(model, np.array([0.5, 0.0, 0.5]), trials=2000))
    assert s.excluded == [1] and s.coordinates == [0, 2]
    assert s.rank_deficient and s.to_dict()["rank_deficient"]


def test_deterministic_and_seed_sensitive():
    model = SystemModel.linear(np.eye(2), np.ones(2))
    a = run_trials(TrialConfig(model, np.array([0.5, 0.5]), trials=20_000, seed=1))
    b = run_trials(TrialConfig(model, np.array([0.5, 0.5]), trials=20_000, seed=1))
    c = run_trials(TrialConfig(model, np.array([0.5, 0.5]), trials=20_000, seed=2))
    assert a.to_dict() == b.to_dict()
    assert a.empirical_avg_mse != c.empirical_avg_mse


def test_nuisance_powers_padded():
    model = SystemModel.linear(np.eye(3), np.ones(3), nuisance_count=1)
    cfg = TrialConfig(model, np.array([0.5, 0.5]), trials=10)
    assert cfg.powers.tolist() == [0.5, 0.5, 1.0]


@pytest.mark.parametrize("kw", [dict(trials=0), dict(powers=np.array([1.0])), dict(powers=np.array([-1.0, 2.0])),
                                dict(theta_true=np.ones(3)), dict(seed=2**64)])
def test_config_validation(kw):
    args = dict(model=SystemModel.linear(np.eye(2), np.ones(2)), powers=np.array([0.5, 0.5]))
    args.update(kw)
    with pytest.raises(DomainError):
        TrialConfig(**args)


def test_requires_linear_gaussian():
    with pytest.raises(DomainError):
        TrialConfig(SystemModel.linear(np.eye(2), fim=np.eye(2)), np.array([0.5, 0.5]))
    nl = SystemModel(NonlinearChannel(lambda x: x, 2, 2, [1.0, 1.0]), GaussianNoise([1.0, 1.0]))
    with pytest.raises(DomainError):
        TrialConfig(nl, np.array([0.5, 0.5]))
    with pytest.raises(DomainError):
        run_trials(TrialConfig(SystemModel.linear(np.eye(2), np.ones(2)), np.zeros(2), trials=5))
