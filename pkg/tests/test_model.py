import math

import numpy as np
import pytest

from fimalloc.errors import DomainError, RankError, SingularMatrixError
from fimalloc.model import (
    CustomFimNoise,
    DensityComponent,
    FimBundle,
    GaussianNoise,
    IndependentDensityNoise,
    LinearChannel,
    NonlinearChannel,
    SystemModel,
    build_fim_bundle,
    crlb,
    effective_channel,
    fim,
    finite_difference_jacobian,
    noise_fim,
)

from conftest import random_channel


def test_gaussian_bundle(rng):
    F, var = random_channel(rng, 3, 5)
    b = build_fim_bundle(SystemModel.linear(F, var))
    J = F @ np.diag(1 / var) @ F.T
    np.testing.assert_allclose(b.J, J, rtol=1e-12)
    np.testing.assert_allclose(b.A, np.linalg.inv(J), rtol=1e-9)
    np.testing.assert_allclose(b.j_diag, np.diag(J))
    assert b.nuisance_count == 0 and b.relevant() is b


def test_bundle_is_read_only(rng):
    F, var = random_channel(rng, 2)
    b = build_fim_bundle(SystemModel.linear(F, var))
    with pytest.raises(ValueError):
        b.J[0, 0] = 1.0


def test_fim_and_crlb_helpers(rng):
    F, var = random_channel(rng, 3)
    b = build_fim_bundle(SystemModel.linear(F, var))
    p = np.array([0.2, 0.3, 0.5])
    P = np.diag(np.sqrt(p))
    np.testing.assert_allclose(fim(b, p), P @ b.J @ P, rtol=1e-12)
    np.testing.assert_allclose(crlb(b, p), np.linalg.inv(P @ b.J @ P), rtol=1e-8)
    np.testing.assert_allclose(np.diag(crlb(b, p)), b.a_diag / p, rtol=1e-12)


def test_custom_fim_noise(rng):
    F, _ = random_channel(rng, 2, 3)
    M = np.array([[2.0, 0.5, 0], [0.5, 1.0, 0], [0, 0, 3.0]])
    b = build_fim_bundle(SystemModel.linear(F, fim=M))
    np.testing.assert_allclose(b.J, F @ M @ F.T, rtol=1e-12)
    with pytest.raises(DomainError):
        CustomFimNoise(np.diag([1.0, -1.0]))


def test_density_noise_matches_gaussian():
    def comp(s):
        return DensityComponent(
            lambda x: (-0.5 * (x / s) ** 2 - math.log(s * math.sqrt(2 * math.pi)), -x / s**2), -15 * s, 15 * s)

    noise = IndependentDensityNoise([comp(1.0), comp(2.0)])
    np.testing.assert_allclose(noise_fim(noise), np.diag([1.0, 0.25]), rtol=1e-7)


@pytest.mark.parametrize("var", [[1.0, 0.0], [1.0, np.inf], [1.0, -2.0]])
def test_bad_variances(var):
    with pytest.raises(DomainError):
        GaussianNoise(var)


def test_shape_and_rank_checks():
    with pytest.raises(DomainError):
        SystemModel.linear(np.ones((3, 2)), [1.0, 1.0])           # k > n
    with pytest.raises(DomainError):
        SystemModel.linear(np.eye(2), [1.0, 1.0, 1.0])            # noise dimension
    with pytest.raises(RankError):
        SystemModel.linear(np.array([[1.0, 2.0], [2.0, 4.0]]), [1.0, 1.0])
    with pytest.raises(DomainError):
        SystemModel.linear(np.eye(2), [1.0, 1.0], nuisance_count=2)
    with pytest.raises(ValueError):
        SystemModel.linear(np.eye(2))


def test_singular_noise_fim_gives_singular_j():
    model = SystemModel.linear(np.eye(2), fim=np.diag([1.0, 0.0]))
    with pytest.raises(SingularMatrixError):
        build_fim_bundle(model)


def test_nuisance_blocks(rng):
    F, var = random_channel(rng, 4, 6)
    b = build_fim_bundle(SystemModel.linear(F, var, nuisance_count=1))
    assert b.nuisance_count == 1
    rel = b.relevant()
    np.testing.assert_allclose(rel.J, b.J[:3, :3])
    np.testing.assert_allclose(rel.A, b.A[:3, :3], rtol=1e-9)


def test_from_matrices_default_inverse():
    b = FimBundle.from_matrices(np.diag([2.0, 4.0]))
    np.testing.assert_allclose(b.A, np.diag([0.5, 0.25]))
    with pytest.raises(DomainError):
        FimBundle.from_matrices(np.eye(2), np.eye(3))


def squares(phi):
    return np.asarray(phi) ** 2


def test_nonlinear_channel_jacobians():
    pt = np.array([1.0, 2.0])
    fd = finite_difference_jacobian(squares, pt)
    np.testing.assert_allclose(fd, np.diag([2.0, 4.0]), atol=1e-8)
    model = SystemModel(NonlinearChannel(squares, 2, 2, pt), GaussianNoise([1.0, 1.0]))
    np.testing.assert_allclose(effective_channel(model), np.diag([2.0, 4.0]), atol=1e-8)
    moved = model.at_point([3.0, 1.0])
    np.testing.assert_allclose(build_fim_bundle(moved).J, np.diag([36.0, 4.0]), atol=1e-6)


def test_nonlinear_rank_failure():
    model = SystemModel(NonlinearChannel(squares, 2, 2, [0.0, 1.0]), GaussianNoise([1.0, 1.0]))
    with pytest.raises(RankError):
        build_fim_bundle(model)


def test_linear_channel_validation():
    with pytest.raises(DomainError):
        LinearChannel(np.array([[1.0, np.nan]]))
