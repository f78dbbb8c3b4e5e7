"""Hot kernels with a compiled backend and a pure-Python fallback.

The compiled extension is used when it imports and ``EULERBLOW_PURE_PYTHON``
is unset or ``0``. ``BACKEND`` names the active choice.
"""

import os

from . import _pykernels

__all__ = ["BACKEND", "minmod_reconstruct", "llf_divergence", "trace_path", "get_backend"]

_impl = _pykernels
BACKEND = "python"
if os.environ.get("EULERBLOW_PURE_PYTHON", "0") in ("", "0"):
    try:
        from . import _ckernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

minmod_reconstruct = _impl.minmod_reconstruct
llf_divergence = _impl.llf_divergence
trace_path = _impl.trace_path


def get_backend(name):
    """Return the kernel module for ``"python"`` or ``"cython"`` (ImportError if unbuilt)."""
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")
