# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops for hard-threshold FCM dynamics.

Binary states are packed MSB-first (node 0 is the highest bit) so integer
order on packed states equals lexicographic order on state vectors; the
transition table walks the state space in Gray-code order so each successor
costs O(n) weight updates instead of an O(n^2) fresh sum.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

KERNEL_NAME = "compiled"


def trajectory_threshold(weights, init, double threshold, Py_ssize_t max_steps):
    """Iterate hard-threshold dynamics until an exact recurrence or the budget.

    Returns (states, transient, period); period == 0 means unresolved.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] cur = np.ascontiguousarray(init, dtype=np.float64).copy()
    cdef Py_ssize_t n = w.shape[0]
    cdef Py_ssize_t t, i, j, first
    cdef double total
    cdef unsigned long long packed
    cdef bint wide = n > 64

    states = [cur.copy()]
    seen = {}
    # The (possibly non-binary) initial state is keyed by bytes; binary
    # successors are keyed by packed integers, a disjoint key space.
    seen[cur.tobytes() if wide or not _is_binary(cur, n) else _pack(cur, n)] = 0

    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] nxt = np.empty(n, dtype=np.float64)
    for t in range(1, max_steps + 1):
        for j in range(n):
            total = 0.0
            for i in range(n):
                if cur[i] != 0.0:
                    total += cur[i] * w[i, j]
            nxt[j] = 1.0 if total > threshold else 0.0
        cur[:] = nxt
        states.append(cur.copy())
        key = cur.tobytes() if wide else _pack(cur, n)
        hit = seen.get(key)
        if hit is not None:
            first = hit
            return np.array(states), first, t - first
        seen[key] = t
    return np.array(states), 0, 0


cdef inline bint _is_binary(double[::1] state, Py_ssize_t n):
    cdef Py_ssize_t i
    for i in range(n):
        if state[i] != 0.0 and state[i] != 1.0:
            return False
    return True


cdef inline unsigned long long _pack(double[::1] state, Py_ssize_t n):
    cdef unsigned long long key = 0
    cdef Py_ssize_t i
    for i in range(n):
        if state[i] != 0.0:
            key |= (<unsigned long long>1) << (n - 1 - i)
    return key


def transition_table(weights, double threshold):
    """Map every packed binary state to its packed successor (uint32, size 2^n)."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t n = w.shape[0]
    if n > 31:
        raise ValueError("transition table supports at most 31 nodes")
    cdef unsigned long long size = (<unsigned long long>1) << n
    cdef cnp.ndarray[cnp.uint32_t, ndim=1, mode="c"] table = np.empty(size, dtype=np.uint32)
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] net = np.zeros(n, dtype=np.float64)
    cdef unsigned long long k, gray, prev_gray, diff, packed
    cdef Py_ssize_t b, node, j

    gray = 0
    for k in range(size):
        if k > 0:
            prev_gray = gray
            gray = k ^ (k >> 1)
            diff = gray ^ prev_gray  # exactly one bit flips per Gray step
            b = 0
            while not (diff >> b) & 1:
                b += 1
            node = n - 1 - b
            if (gray >> b) & 1:
                for j in range(n):
                    net[j] += w[node, j]
            else:
                for j in range(n):
                    net[j] -= w[node, j]
        packed = 0
        for j in range(n):
            if net[j] > threshold:
                packed |= (<unsigned long long>1) << (n - 1 - j)
        table[gray] = <cnp.uint32_t>packed
    return table
