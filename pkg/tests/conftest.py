import numpy as np
import pytest

from fimalloc import kernels


def random_spd(rng, k, cond=100.0):
    """Random symmetric positive definite matrix with condition number about ``cond``."""
    q, _ = np.linalg.qr(rng.standard_normal((k, k)))
    w = np.exp(rng.uniform(0.0, np.log(cond), k))
    m = (q * w) @ q.T
    return 0.5 * (m + m.T)


def random_channel(rng, k, n=None):
    n = k if n is None else n
    F = rng.standard_normal((k, n))
    var = 10.0 ** rng.uniform(-1, 1, n)
    return F, var


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    prev = kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(prev)


# -- acceptance report ------------------------------------------------------

_acceptance = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    detail = dict(item.user_properties).get("detail", "")
    _acceptance.append((marker.args[0], "PASS" if rep.passed else "FAIL", detail))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, status, detail in _acceptance:
        terminalreporter.write_line(f"{status}  {name}: {detail}")
