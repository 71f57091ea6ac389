import math

import pytest

from fimalloc.errors import IntegrationError
from fimalloc.model import DensityComponent, scalar_fisher_information
from fimalloc.quadrature import adaptive_simpson


def test_polynomial_exact():
    value, residual = adaptive_simpson(lambda x: x**3 - 2 * x, -1.0, 2.0)
    assert value == pytest.approx(15 / 4 - 3, abs=1e-12)
    assert residual < 1e-12


def test_sharp_peak():
    value, _ = adaptive_simpson(lambda x: 1.0 / (1e-4 + x * x), -1.0, 1.0, tol=1e-10)
    assert value == pytest.approx(2 * math.atan(1 / 1e-2) / 1e-2, rel=1e-8)


def test_interval_limit():
    with pytest.raises(IntegrationError) as err:
        adaptive_simpson(lambda x: math.sin(1.0 / x) if x else 0.0, 0.0, 1.0, tol=1e-14, max_intervals=200)
    assert err.value.residual > 0


def test_bad_bounds():
    with pytest.raises(ValueError):
        adaptive_simpson(math.exp, 1.0, 0.0)


@pytest.mark.parametrize("sigma", [0.5, 1.0, 3.0])
def test_gaussian_fisher_information(sigma):
    def ld(x):
        return -0.5 * (x / sigma) ** 2 - math.log(sigma * math.sqrt(2 * math.pi)), -x / sigma**2

    comp = DensityComponent(ld, -12 * sigma, 12 * sigma)
    assert scalar_fisher_information(comp) == pytest.approx(1 / sigma**2, rel=1e-7)


def test_laplace_fisher_information():
    b = 2.0

    def ld(x):
        return -abs(x) / b - math.log(2 * b), -math.copysign(1.0, x) / b

    comp = DensityComponent(ld, -60.0, 60.0)
    assert scalar_fisher_information(comp) == pytest.approx(1 / b**2, rel=1e-7)
