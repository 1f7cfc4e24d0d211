"""Backend selection for the power-series kernels.

The compiled extension is used when it imports cleanly; setting
``RULEDSURF_PURE_PYTHON=1`` forces the pure-Python fallback.
"""

import os

from . import _kernels_py

if os.environ.get("RULEDSURF_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

mul = _impl.mul
div = _impl.div
sqrt = _impl.sqrt
exp = _impl.exp
sincos = _impl.sincos


def available_backends():
    """Return ``{name: module}`` for every backend importable here."""
    found = {"python": _kernels_py}
    try:
        from . import _kernels

        found["compiled"] = _kernels
    except ImportError:
        pass
    return found
