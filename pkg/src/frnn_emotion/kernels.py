"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the NumPy
implementation. Set ``FRNN_EMOTION_PURE=1`` to force the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("FRNN_EMOTION_PURE", "") not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

BACKENDS = {"python": _kernels_py.owa_memberships}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled.owa_memberships

BACKEND = "compiled" if _compiled is not None else "python"
owa_memberships = BACKENDS[BACKEND]
