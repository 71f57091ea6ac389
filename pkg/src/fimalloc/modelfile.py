"""JSON model files.

Schema (see ``docs/model_file.md``)::

    {
      "k": 2, "n": 2,
      "F": [[1, 0], [0, 1]],                       # k rows of n entries
      "noise": {"type": "gaussian", "variances": [1, 4]},
      "nuisance_count": 0
    }

Instead of ``"F"`` a model may give ``"nonlinear": {"kind", "params",
"linearization_point"}`` with a kind from :data:`NONLINEAR_KINDS`. The
noise block is either ``{"type": "gaussian", "variances": [...]}`` or
``{"type": "fim", "matrix": [[...]]}``.
"""
from __future__ import annotations

import json
import math
import re

import numpy as np

from .errors import FimAllocError, ModelFileError
from .model import CustomFimNoise, GaussianNoise, LinearChannel, NonlinearChannel, SystemModel


def _power_map(params, k, n):
    e = float(params.get("exponent", 2.0))
    if n != k:
        raise ValueError("kind 'power' needs n == k")

    def fn(phi):
        return np.asarray(phi, dtype=np.float64) ** e

    def jac(phi):
        return np.diag(e * np.asarray(phi, dtype=np.float64) ** (e - 1))

    return fn, jac


def _tanh_map(params, k, n):
    if "M" not in params:
        raise KeyError("M")
    M = np.asarray(params["M"], dtype=np.float64)
    if M.shape != (k, n):
        raise ValueError(f"M must be {k}x{n}, got {M.shape}")
    amp = float(params.get("amplitude", 1.0))

    def fn(phi):
        return amp * np.tanh(M.T @ phi)

    def jac(phi):
        t = np.tanh(M.T @ phi)
        return amp * (1.0 - t * t)[:, None] * M.T

    return fn, jac


NONLINEAR_KINDS = {
    "power": _power_map,    # f_i(phi) = phi_i ** exponent
    "tanh": _tanh_map,      # f(phi) = amplitude * tanh(M^T phi)
}


def _line_of(text, path):
    """Best-effort line number of a dotted key path inside the JSON text."""
    if text is None:
        return None
    pos = 0
    for key in path.split("."):
        m = re.compile(r'"%s"\s*:' % re.escape(key)).search(text, pos)
        if m is None:
            break
        pos = m.start()
    return text.count("\n", 0, pos) + 1 if pos else None


class _Reader:
    def __init__(self, text):
        self.text = text

    def fail(self, message, path):
        raise ModelFileError(message, field=path, line=_line_of(self.text, path))

    def get(self, obj, key, path, required=True):
        if not isinstance(obj, dict):
            self.fail("expected a JSON object", path.rsplit(".", 1)[0] if "." in path else path)
        if key not in obj:
            if required:
                self.fail("missing required field", path)
            return None
        return obj[key]

    def integer(self, value, path, lo=None):
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(f"expected an integer, got {value!r}", path)
        if lo is not None and value < lo:
            self.fail(f"must be >= {lo}, got {value}", path)
        return value

    def vector(self, value, path, length=None):
        if not isinstance(value, list) or not all(_is_number(x) for x in value):
            self.fail("expected an array of numbers", path)
        if length is not None and len(value) != length:
            self.fail(f"expected {length} entries, got {len(value)}", path)
        return np.asarray(value, dtype=np.float64)

    def matrix(self, value, path, rows, cols):
        if not isinstance(value, list) or len(value) != rows:
            self.fail(f"expected {rows} rows", path)
        for i, row in enumerate(value):
            if not isinstance(row, list) or len(row) != cols or not all(_is_number(x) for x in row):
                self.fail(f"row {i} must hold {cols} numbers", path)
        return np.asarray(value, dtype=np.float64)


def _is_number(x):
    return not isinstance(x, bool) and isinstance(x, (int, float)) and math.isfinite(x)


def model_from_dict(data, text=None):
    """Build a :class:`SystemModel` from parsed JSON, with field-level errors."""
    r = _Reader(text)
    if not isinstance(data, dict):
        raise ModelFileError("top level must be a JSON object", line=1)
    k = r.integer(r.get(data, "k", "k"), "k", lo=1)
    n = r.integer(r.get(data, "n", "n"), "n", lo=1)
    nuisance = r.integer(r.get(data, "nuisance_count", "nuisance_count", required=False) or 0,
                         "nuisance_count", lo=0)

    if ("F" in data) == ("nonlinear" in data):
        r.fail("give exactly one of 'F' or 'nonlinear'", "F")
    try:
        if "F" in data:
            channel = LinearChannel(r.matrix(data["F"], "F", k, n))
        else:
            nl = data["nonlinear"]
            kind = r.get(nl, "kind", "nonlinear.kind")
            if kind not in NONLINEAR_KINDS:
                r.fail(f"unknown kind {kind!r}; valid: {', '.join(NONLINEAR_KINDS)}", "nonlinear.kind")
            params = r.get(nl, "params", "nonlinear.params", required=False) or {}
            if not isinstance(params, dict):
                r.fail("expected a JSON object", "nonlinear.params")
            point = r.vector(r.get(nl, "linearization_point", "nonlinear.linearization_point"),
                             "nonlinear.linearization_point", k)
            try:
                fn, jac = NONLINEAR_KINDS[kind](params, k, n)
            except KeyError as exc:
                r.fail("missing required parameter", f"nonlinear.params.{exc.args[0]}")
            except ValueError as exc:
                r.fail(str(exc), "nonlinear.params")
            channel = NonlinearChannel(fn, k, n, point, jac)

        noise_block = r.get(data, "noise", "noise")
        kind = r.get(noise_block, "type", "noise.type")
        if kind == "gaussian":
            noise = GaussianNoise(r.vector(r.get(noise_block, "variances", "noise.variances"),
                                           "noise.variances", n))
        elif kind == "fim":
            noise = CustomFimNoise(r.matrix(r.get(noise_block, "matrix", "noise.matrix"),
                                            "noise.matrix", n, n))
        else:
            r.fail(f"unknown noise type {kind!r}; valid: gaussian, fim", "noise.type")
        return SystemModel(channel, noise, nuisance)
    except ModelFileError:
        raise
    except FimAllocError as exc:
        raise ModelFileError(f"invalid model: {exc}") from exc


def loads_model(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"malformed JSON: {exc.msg} at column {exc.colno}", line=exc.lineno) from exc
    return model_from_dict(data, text)


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return loads_model(fh.read())


def linear_model_dict(F, variances, nuisance_count=0):
    """JSON-ready dict for a linear Gaussian model."""
    F = np.asarray(F, dtype=np.float64)
    return {
        "k": F.shape[0],
        "n": F.shape[1],
        "F": F.tolist(),
        "noise": {"type": "gaussian", "variances": np.asarray(variances, dtype=float).tolist()},
        "nuisance_count": nuisance_count,
    }
