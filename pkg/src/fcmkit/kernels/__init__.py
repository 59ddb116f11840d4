"""Kernel selection: compiled extension when built, NumPy fallback otherwise.

Set FCMKIT_KERNEL=python to force the fallback (e.g. for benchmarking the
two implementations against each other).
"""

from __future__ import annotations

import os

from . import _fallback

try:
    from . import _ckernel
except ImportError:  # extension not built on this install
    _ckernel = None

if os.environ.get("FCMKIT_KERNEL") == "python" or _ckernel is None:
    _active = _fallback
else:
    _active = _ckernel

KERNEL_NAME: str = _active.KERNEL_NAME
trajectory_threshold = _active.trajectory_threshold
transition_table = _active.transition_table


def available_kernels() -> dict[str, object]:
    """Importable kernel modules by name; used by tests and benchmarks."""
    kernels: dict[str, object] = {"python": _fallback}
    if _ckernel is not None:
        kernels["compiled"] = _ckernel
    return kernels
