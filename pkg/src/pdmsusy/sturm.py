"""Backend selection for the Sturm-count kernel.

The compiled extension is used when it was built; otherwise the numpy
fallback is imported.  Setting ``PDMSUSY_PURE_PYTHON=1`` forces the
fallback.  Every importable backend stays reachable through
:data:`BACKENDS` for cross-checks and benchmarks.
"""
import os

from . import _sturm_py

BACKENDS = {"python": _sturm_py}
try:
    from . import _sturm as _compiled

    BACKENDS["cython"] = _compiled
except ImportError:  # extension not built
    _compiled = None

if _compiled is None or os.environ.get("PDMSUSY_PURE_PYTHON", "") not in ("", "0"):
    _impl = _sturm_py
    BACKEND = "python"
else:
    _impl = _compiled
    BACKEND = "cython"

sturm_count = _impl.sturm_count
bisect_eigenvalues = _impl.bisect_eigenvalues
