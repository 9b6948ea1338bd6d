"""Kernel backend selection.

The compiled extension is preferred when importable; the numpy fallback has
identical semantics, so the choice only affects speed.  Set
``CUBEREC_KERNELS=python`` (or ``native``) to force a backend, e.g. for the
backend-parity tests and the benchmark.
"""

from __future__ import annotations

import importlib
import os

from . import _py


def _select():
    forced = os.environ.get("CUBEREC_KERNELS", "").strip().lower()
    if forced == "python":
        return _py
    try:
        native = importlib.import_module("cuberec._kernels._native")
    except ImportError:
        if forced == "native":
            raise ImportError(
                "CUBEREC_KERNELS=native but the compiled kernels are not built"
            )
        return _py
    return native


_impl = _select()

BACKEND = _impl.BACKEND
brute_force_binary = _impl.brute_force_binary
brute_force_ternary = _impl.brute_force_ternary
descend_binary = _impl.descend_binary
descend_ternary = _impl.descend_ternary
tabu_binary = _impl.tabu_binary
tabu_ternary = _impl.tabu_ternary
bnb_binary = _impl.bnb_binary
bnb_ternary = _impl.bnb_ternary


def available_backends():
    """Names of importable backends (for tests and the benchmark)."""
    names = ["python"]
    try:
        importlib.import_module("cuberec._kernels._native")
        names.append("native")
    except ImportError:
        pass
    return names


def get_backend(name: str):
    """Fetch a specific backend module by name."""
    if name == "python":
        return _py
    if name == "native":
        return importlib.import_module("cuberec._kernels._native")
    raise ValueError(f"unknown kernel backend {name!r}")
