"""Kernel backend selection.

The compiled extension is preferred when it was built; otherwise the
NumPy implementation is used.  ``MBQC_LAB_KERNELS=numpy|cython`` forces
a backend (``cython`` raises if the extension is missing).
"""

import os

from . import fallback

_requested = os.environ.get("MBQC_LAB_KERNELS", "auto").lower()
_compiled = None
if _requested in ("auto", "cython"):
    try:
        from . import _core as _compiled  # type: ignore[no-redef]
    except ImportError:
        if _requested == "cython":
            raise ImportError(
                "MBQC_LAB_KERNELS=cython but the compiled kernels are not built; "
                "reinstall the package with a working C compiler"
            ) from None

if _compiled is not None:
    backend_name = "cython"
    apply_1q_inplace = _compiled.apply_1q
    apply_2q_inplace = _compiled.apply_2q
else:
    backend_name = "numpy"
    apply_1q_inplace = fallback.apply_1q
    apply_2q_inplace = fallback.apply_2q
