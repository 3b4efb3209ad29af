"""Backend selection for the numerical kernels.

The compiled extension is used when it was built; otherwise, or when
``TFQKD_PURE_PYTHON`` is set to a non-empty value, the pure-Python module
is used.  Both expose the same four functions.
"""
import os

from . import _pykernels

if os.environ.get("TFQKD_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

bessel_i0 = _impl.bessel_i0
solve_delta = _impl.solve_delta
solve_delta_many = _impl.solve_delta_many
residual = _impl.residual


def available_backends():
    """Map of backend name to module, for tests and benchmarks."""
    backends = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        return backends
    backends["cython"] = _ckernels
    return backends
