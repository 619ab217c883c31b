"""Kernel backend selection.

The compiled extension is preferred; the pure implementation is used when
the extension was not built or when TEPMON_PURE=1 is set.
"""

import os

if os.environ.get("TEPMON_PURE") == "1":
    from . import pure as _impl

    BACKEND = "pure"
else:
    try:
        from . import _native as _impl  # type: ignore[attr-defined]

        BACKEND = "native"
    except ImportError:
        from . import pure as _impl

        BACKEND = "pure"

jacobi_eigh = _impl.jacobi_eigh
t2_batch = _impl.t2_batch
contributions = _impl.contributions
