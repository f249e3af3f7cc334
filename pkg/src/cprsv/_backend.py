"""Import-time selection of the compiled step kernel."""

from __future__ import annotations

try:
    from . import _kernels
except ImportError:  # extension not built; the numpy path covers everything
    _kernels = None  # type: ignore[assignment]

HAVE_COMPILED = _kernels is not None
