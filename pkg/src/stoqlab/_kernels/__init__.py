"""Backend selection for the phase-space stencil kernel.

Prefers the compiled extension, falls back to the numpy implementation.
Set STOQLAB_PURE_PYTHON=1 to force the fallback (the two are bit-identical
by construction; see benchmarks/bench_fp_step.py for the speed difference).
"""

import os

from . import fallback as _fallback

_impl = None
if os.environ.get("STOQLAB_PURE_PYTHON", "0") not in ("", "0"):
    _impl = _fallback
else:
    try:
        from . import _fp_ext as _impl
    except ImportError:
        _impl = _fallback

fp_update = _impl.fp_update
BACKEND = "python" if _impl is _fallback else "cython"


def backend_name():
    return BACKEND


def get_backend(name):
    """Fetch a specific implementation ("python" or "cython") for
    equivalence tests and benchmarks."""
    if name == "python":
        return _fallback
    if name == "cython":
        from . import _fp_ext
        return _fp_ext
    raise ValueError(f"unknown backend {name!r}")
