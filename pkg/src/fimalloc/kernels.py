"""Backend selection for the Jacobi kernels.

The compiled extension is used when importable, otherwise the pure-Python
implementation. ``use_backend`` switches explicitly (benchmarks, tests).
"""
import logging

from . import _jacobi_py

log = logging.getLogger(__name__)

try:
    from . import _jacobi as _compiled
except ImportError:  # pragma: no cover - depends on the build
    _compiled = None
    log.debug("compiled Jacobi kernels unavailable, using pure-Python fallback")

_BACKENDS = {"python": _jacobi_py}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled

_active = _compiled if _compiled is not None else _jacobi_py


def available_backends():
    return sorted(_BACKENDS)


def backend_name():
    return "compiled" if _active is _compiled and _compiled is not None else "python"


def use_backend(name):
    """Select ``"compiled"`` or ``"python"``; returns the previously active name."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")
    previous = backend_name()
    _active = _BACKENDS[name]
    return previous


def jacobi_eigh(m, want_vectors=True, tol=1e-15, max_sweeps=100):
    return _active.jacobi_eigh(m, want_vectors, tol, max_sweeps)


def min_eig_scaled(j, p, tol=1e-15, max_sweeps=100):
    return _active.min_eig_scaled(j, p, tol, max_sweeps)
