"""Backend selection for the recovery kernels.

Prefers the compiled extension (longwire._core) and falls back to the
pure-Python twin.  Set LONGWIRE_PURE_PYTHON=1 to force the fallback.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _core_py

_impl: ModuleType
if os.environ.get("LONGWIRE_PURE_PYTHON") == "1":
    _impl = _core_py
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _core_py

BACKEND: str = _impl.BACKEND

recover_single_masks = _impl.recover_single_masks
recover_multi_masks = _impl.recover_multi_masks
sweep_single = _impl.sweep_single
sweep_multi = _impl.sweep_multi
mc_single = _impl.mc_single
trial_key = _impl.trial_key

KERNEL_MAX_BITS = 64


def available_backends() -> dict[str, ModuleType]:
    """All importable kernel implementations, keyed by backend name."""
    backends: dict[str, ModuleType] = {_core_py.BACKEND: _core_py}
    try:
        from . import _core

        backends[_core.BACKEND] = _core
    except ImportError:
        pass
    return backends
