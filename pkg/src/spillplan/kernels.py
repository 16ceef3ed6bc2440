"""Backend selection for the propagation kernels.

The compiled extension is used when it was built; otherwise the numpy
implementation is used.  ``SPILLPLAN_PURE=1`` forces the numpy path.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("SPILLPLAN_PURE") != "1":
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

forward = _impl.forward
backward = _impl.backward
