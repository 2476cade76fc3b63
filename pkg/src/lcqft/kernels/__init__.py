"""Float64 Klein-Gordon stepping kernels.

The compiled extension is used when it has been built; otherwise the NumPy
implementation is selected.  Set ``LCQFT_PURE_PYTHON=1`` to force the
fallback.
"""
import os

from . import _fallback

BACKEND = "python"
step_retarded = _fallback.step_retarded
step_advanced = _fallback.step_advanced

if not os.environ.get("LCQFT_PURE_PYTHON"):
    try:
        from . import _stepping
    except ImportError:  # extension not built
        pass
    else:
        BACKEND = "compiled"
        step_retarded = _stepping.step_retarded
        step_advanced = _stepping.step_advanced

__all__ = ["BACKEND", "step_retarded", "step_advanced"]
