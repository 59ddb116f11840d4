"""Pure NumPy implementation of the hot dynamics loops.

Used when the compiled extension is unavailable (or forced via
FCMKIT_KERNEL=python). Semantics match fcmkit.kernels._ckernel; both pack
binary states MSB-first (node 0 is the highest bit) so that integer order
on packed states equals lexicographic order on state vectors.
"""

from __future__ import annotations

import numpy as np

KERNEL_NAME = "python"

# Chunk size for the all-states sweep; bounds peak memory at ~n * 2^17 floats.
_CHUNK = 1 << 14


def trajectory_threshold(weights, init, threshold, max_steps):
    """Iterate hard-threshold dynamics until an exact recurrence or the budget.

    Returns (states, transient, period) where states is a (T, n) float64
    array starting with init. period == 0 means no recurrence was found
    within max_steps. Detection is exact: states are keyed by their bytes.
    """
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    cur = np.ascontiguousarray(init, dtype=np.float64)
    states = [cur]
    seen = {cur.tobytes(): 0}
    for t in range(1, max_steps + 1):
        cur = (cur @ weights > threshold).astype(np.float64)
        states.append(cur)
        key = cur.tobytes()
        first = seen.get(key)
        if first is not None:
            return np.array(states), first, t - first
        seen[key] = t
    return np.array(states), 0, 0


def transition_table(weights, threshold):
    """Map every packed binary state to its packed successor.

    Returns a uint32 array of size 2^n; entry s is the successor of the
    state whose MSB-first packing is s.
    """
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    n = weights.shape[0]
    size = 1 << n
    table = np.empty(size, dtype=np.uint32)
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint32)  # node i -> bit n-1-i
    for start in range(0, size, _CHUNK):
        stop = min(start + _CHUNK, size)
        codes = np.arange(start, stop, dtype=np.uint32)
        bits = ((codes[:, None] >> shifts[None, :]) & 1).astype(np.float64)
        nxt = (bits @ weights) > threshold
        packed = (nxt.astype(np.uint32) << shifts[None, :]).sum(axis=1, dtype=np.uint32)
        table[start:stop] = packed
    return table
