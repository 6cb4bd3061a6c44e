"""Backend selection: compiled core when the extension built, pure Python
otherwise. Both expose the same eval_windows_raw contract and produce
bit-identical results; only speed differs."""

from __future__ import annotations

import numpy as np

from . import _core_py

try:
    from . import _core  # type: ignore[attr-defined]

    HAVE_COMPILED = True
except ImportError:
    _core = None
    HAVE_COMPILED = False

DEFAULT_BACKEND = "compiled" if HAVE_COMPILED else "python"


def get_backend(name: str | None = None):
    if name is None:
        name = DEFAULT_BACKEND
    if name == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled core is not available in this install")
        return _core
    if name == "python":
        return _core_py
    raise ValueError(f"unknown backend {name!r}")


def eval_windows_raw(weights, signal, backend: str | None = None):
    """Run the window engine over every full position of `signal`.

    Returns (vnu, sigma, rms): vnu has shape (degree+1, npos).
    """
    core = get_backend(backend)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    signal = np.ascontiguousarray(signal, dtype=np.float64)
    npos = max(0, signal.shape[0] - weights.shape[1] + 1)
    vnu = np.empty((weights.shape[0], npos), dtype=np.float64)
    sigma = np.empty(npos, dtype=np.float64)
    rms = np.empty(npos, dtype=np.float64)
    if npos:
        core.eval_windows_raw(weights, signal, vnu, sigma, rms)
    return vnu, sigma, rms
