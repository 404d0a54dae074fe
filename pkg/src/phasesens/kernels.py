"""Backend selection for the moment kernels.

The compiled extension is used when it was built; otherwise the numpy
implementation is loaded.  Setting ``PHASESENS_PURE_PYTHON=1`` forces the
fallback, which is how the benchmark and the backend-parity tests compare
the two.
"""

import importlib
import os

_PURE_FLAG = "PHASESENS_PURE_PYTHON"


def load_backend(name):
    """Return the kernel module for ``name`` ('cython' or 'python')."""
    if name == "cython":
        return importlib.import_module("phasesens._ckernels")
    if name == "python":
        return importlib.import_module("phasesens._pykernels")
    raise ValueError(f"unknown kernel backend {name!r}")


def _select():
    if os.environ.get(_PURE_FLAG, "") not in ("", "0"):
        return "python", load_backend("python")
    try:
        return "cython", load_backend("cython")
    except ImportError:
        return "python", load_backend("python")


BACKEND, _impl = _select()

quadratic_moments = _impl.quadratic_moments
phase_curve = _impl.phase_curve


def available_backends():
    names = ["python"]
    try:
        load_backend("cython")
    except ImportError:
        pass
    else:
        names.insert(0, "cython")
    return names
