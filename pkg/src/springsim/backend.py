"""Simulation-kernel backend selection.

The compiled Cython kernel is preferred when the extension built;
otherwise (or when ``SPRINGSIM_PURE=1`` is set in the environment) the
pure-Python twin is used. Selection happens once, at import time.
"""

from __future__ import annotations

import os

from . import _simloop

try:
    from . import _simcore
except ImportError:  # pragma: no cover - depends on the build environment
    _simcore = None

HAVE_COMPILED = _simcore is not None

_force_pure = os.environ.get("SPRINGSIM_PURE", "").strip() not in ("", "0")

if HAVE_COMPILED and not _force_pure:
    BACKEND = "compiled"
    simulate_kernel = _simcore.simulate
else:
    BACKEND = "python"
    simulate_kernel = _simloop.simulate

# Status codes are shared by both kernels.
OK = _simloop.OK
SINGULAR = _simloop.SINGULAR
NONFINITE = _simloop.NONFINITE


def get_kernel(name: str):
    """Explicitly pick a kernel ("compiled" or "python"), e.g. to benchmark.

    Raises:
        ValueError: Unknown name, or "compiled" requested but not built.
    """
    if name == "python":
        return _simloop.simulate
    if name == "compiled":
        if not HAVE_COMPILED:
            raise ValueError("compiled kernel not available (extension not built)")
        return _simcore.simulate
    raise ValueError(f"unknown kernel {name!r} (expected 'compiled' or 'python')")
