"""Round kernel backend selection.

The compiled ``_ckernel`` extension is used when it imports; otherwise the
pure-Python ``_pykernel`` runs instead. Setting ``AMOEBOT_ENERGY_PURE=1``
forces the fallback.
"""

from __future__ import annotations

import os

from . import _pykernel

_compiled = None
if os.environ.get("AMOEBOT_ENERGY_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernel as _compiled  # type: ignore[no-redef]
    except ImportError:
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"


def compiled_available() -> bool:
    try:
        from . import _ckernel  # noqa: F401
    except ImportError:
        return False
    return True


def get_backend(name: str | None = None):
    """Return ``(name, module)``; ``name`` may force ``"compiled"`` or ``"python"``."""
    if name is None:
        name = BACKEND
    if name == "python":
        return "python", _pykernel
    if name == "compiled":
        from . import _ckernel

        return "compiled", _ckernel
    raise ValueError(f"unknown kernel backend {name!r}")
