import subprocess
import sys

import numpy as np
import pytest

from fimalloc import _jacobi_py, kernels

from conftest import random_spd


def test_backend_switching():
    names = kernels.available_backends()
    assert "python" in names
    prev = kernels.use_backend("python")
    try:
        assert kernels.backend_name() == "python"
    finally:
        kernels.use_backend(prev)
    with pytest.raises(ValueError):
        kernels.use_backend("fortran")


@pytest.mark.skipif("compiled" not in kernels.available_backends(), reason="extension not built")
def test_compiled_matches_python(rng):
    from fimalloc import _jacobi
    for k in (1, 2, 3, 8, 20):
        m = random_spd(rng, k, cond=1e3)
        wc, vc, _ = _jacobi.jacobi_eigh(m)
        wp, vp, _ = _jacobi_py.jacobi_eigh(m)
        np.testing.assert_allclose(wc, wp, rtol=1e-12, atol=1e-14)
        # eigenvectors agree up to sign
        np.testing.assert_allclose(np.abs(vc.T @ vp), np.eye(k), atol=1e-8)
        p = rng.uniform(0, 1, k)
        assert _jacobi.min_eig_scaled(m, p) == pytest.approx(_jacobi_py.min_eig_scaled(m, p), rel=1e-12, abs=1e-15)


def test_min_eig_scaled_matches_dense(backend, rng):
    for k in (2, 5, 10):
        j = random_spd(rng, k)
        p = rng.uniform(0, 2, k)
        s = np.sqrt(p)
        expect = np.linalg.eigvalsh(j * np.outer(s, s))[0]
        assert kernels.min_eig_scaled(j, p) == pytest.approx(expect, rel=1e-10, abs=1e-13)


def test_diagonal_input_needs_no_sweeps(backend):
    w, v, sweeps = kernels.jacobi_eigh(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_array_equal(w, [1.0, 2.0, 3.0])
    assert sweeps == 0
    np.testing.assert_array_equal(np.abs(v), np.eye(3)[:, [1, 2, 0]])


def test_sweep_limit_reported(backend, rng):
    m = random_spd(rng, 10)
    _, _, sweeps = kernels.jacobi_eigh(m, max_sweeps=1)
    assert sweeps == -1


def test_fallback_selected_when_extension_missing():
    code = ("import sys; sys.modules['fimalloc._jacobi'] = None\n"
            "from fimalloc import kernels, allocate, FimBundle\n"
            "import numpy as np\n"
            "assert kernels.backend_name() == 'python' and kernels.available_backends() == ['python']\n"
            "r = allocate(FimBundle.from_matrices(np.diag([1.0, 4.0])), 'worst_eigen', 1.0)\n"
            "print(round(r.objective_value, 6))")
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True).stdout
    assert out.strip() == "0.8"
