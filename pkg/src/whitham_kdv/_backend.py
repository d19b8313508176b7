"""Pick the compiled kernel extension when available."""
import os

if os.environ.get("WHITHAM_KDV_PURE", "") not in ("", "0"):
    from . import _pykernels as kernels

    BACKEND = "python"
else:
    try:
        from . import _ckernels as kernels

        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _pykernels as kernels

        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
