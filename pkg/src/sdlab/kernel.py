"""Backend selection for the search kernel.

The compiled ``_kernel_c`` extension is used when it imports; otherwise, or
when ``SDL_PURE_PYTHON`` is set to a non-empty value other than ``0``, the
pure-Python ``_kernel_py`` is used.  Both expose ``normalize``,
``normalize_ordered``, ``shape`` and ``Solver`` with identical behaviour.
"""

import os

from . import _kernel_py

_force_py = os.environ.get("SDL_PURE_PYTHON", "") not in ("", "0")

if _force_py:
    _impl = _kernel_py
else:
    try:
        from . import _kernel_c as _impl
    except ImportError:  # extension not built
        _impl = _kernel_py

BACKEND = _impl.BACKEND
normalize = _impl.normalize
normalize_ordered = _impl.normalize_ordered
shape = _impl.shape
Solver = _impl.Solver

_shared = None


def shared_solver():
    """Process-wide solver whose memo tables persist across calls."""
    global _shared
    if _shared is None:
        _shared = Solver()
    return _shared


def backends():
    """All importable backend modules, pure Python first."""
    out = [_kernel_py]
    try:
        from . import _kernel_c
        out.append(_kernel_c)
    except ImportError:
        pass
    return out
