import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fimalloc.errors import DomainError, ObjectiveEvaluationError
from fimalloc.optimizer import MultistartOptions, multistart_maximize, project, sample_simplex


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=1, max_size=12), st.floats(1e-3, 1e3))
def test_property_project_is_feasible(x, budget):
    p = project(np.array(x), budget)
    assert np.all(p >= 0)
    assert p.sum() == pytest.approx(budget, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_property_sample_simplex(k, seed):
    p = sample_simplex(k, 2.5, np.random.default_rng(seed))
    assert p.shape == (k,) and np.all(p >= 0)
    assert p.sum() == pytest.approx(2.5)


def test_concave_quadratic_maximum():
    target = np.array([0.5, 0.3, 0.2])
    res = multistart_maximize(lambda p: -np.sum((p - target) ** 2), 3, 1.0, MultistartOptions(restarts=4))
    np.testing.assert_allclose(res.p, target, atol=1e-4)
    assert res.converged_starts >= 1 and res.starts == 4


def test_vertex_maximum():
    res = multistart_maximize(lambda p: p @ np.array([1.0, 3.0, 2.0]), 3, 2.0, MultistartOptions(restarts=4))
    np.testing.assert_allclose(res.p, [0.0, 2.0, 0.0], atol=1e-6)
    assert res.value == pytest.approx(6.0, abs=1e-6)


def test_multimodal_needs_restarts():
    # two separated bumps; the higher one sits near a corner
    def f(p):
        return np.exp(-50 * np.sum((p - [0.8, 0.1, 0.1]) ** 2)) * 2 + np.exp(-50 * np.sum((p - [0.1, 0.1, 0.8]) ** 2))

    res = multistart_maximize(f, 3, 1.0, MultistartOptions(restarts=16))
    np.testing.assert_allclose(res.p, [0.8, 0.1, 0.1], atol=1e-3)


def test_deterministic_for_fixed_seed():
    f = lambda p: -np.sum(np.sin(5 * p)) - np.sum(p ** 3)
    opts = MultistartOptions(restarts=20, seed=99)
    a = multistart_maximize(f, 5, 1.0, opts)
    b = multistart_maximize(f, 5, 1.0, opts)
    np.testing.assert_array_equal(a.p, b.p)
    assert a.evaluations == b.evaluations


def test_k_one():
    res = multistart_maximize(lambda p: p[0] ** 2, 1, 3.0)
    assert res.p.tolist() == [3.0] and res.value == 9.0


def test_non_finite_objective():
    with pytest.raises(ObjectiveEvaluationError) as err:
        multistart_maximize(lambda p: p[0] if p[0] > 0.4 else float("nan"), 2, 1.0)
    assert err.value.point is not None


@pytest.mark.parametrize("kw", [dict(restarts=0), dict(tolerance=0.0), dict(seed=-1), dict(contract=1.5),
                                dict(max_iters_per_start=0)])
def test_bad_options(kw):
    with pytest.raises(DomainError):
        MultistartOptions(**kw)


def test_bad_problem():
    with pytest.raises(DomainError):
        multistart_maximize(lambda p: 0.0, 0, 1.0)
    with pytest.raises(DomainError):
        multistart_maximize(lambda p: 0.0, 2, 0.0)
