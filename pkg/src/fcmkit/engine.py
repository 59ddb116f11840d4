"""Discrete-time FCM dynamics: stepping, trajectories, equilibria, basins.

The update rule is a vector-matrix product followed by a squashing
nonlinearity: component j at time t+1 is phi(sum_i state_i(t) * w[i, j]).
A node persists only through an explicit self-loop weight; there is no
implicit memory term.

All functions are pure. Hard-threshold dynamics over binary states live in
a finite space, so recurrence detection there is exact (visited-state
index); continuous squashers use an L-infinity tolerance instead.
"""

from __future__ import annotations

import math

import numpy as np

from . import kernels
from .errors import InputError, ResourceError, ShapeError, UnsupportedError
from .model import (
    CLAMPED_LINEAR,
    FIXED_POINT,
    HARD_THRESHOLD,
    LIMIT_CYCLE,
    LOGISTIC,
    UNRESOLVED,
    EquilibriumClassification,
    Fcm,
    Squasher,
    StateVector,
)

DEFAULT_TOLERANCE = 1e-9
MAX_STEPS_CONTINUOUS = 10_000
_EXHAUSTIVE_BOUND_MAX_N = 20


def squash(phi: Squasher, x: float) -> float:
    """Apply the squashing nonlinearity to one real net input."""
    if not math.isfinite(x):
        raise InputError(f"squash input must be finite, got {x!r}")
    if phi.kind == HARD_THRESHOLD:
        return 1.0 if x > phi.threshold else 0.0
    if phi.kind == LOGISTIC:
        z = phi.steepness * x
        if z >= 0:
            return 1.0 / (1.0 + math.exp(-z))
        ez = math.exp(z)
        return ez / (1.0 + ez)
    return min(1.0, max(0.0, x))


def _squash_array(phi: Squasher, x: np.ndarray) -> np.ndarray:
    if phi.kind == HARD_THRESHOLD:
        return (x > phi.threshold).astype(np.float64)
    if phi.kind == LOGISTIC:
        out = np.empty_like(x)
        pos = x >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-phi.steepness * x[pos]))
        ez = np.exp(phi.steepness * x[~pos])
        out[~pos] = ez / (1.0 + ez)
        return out
    return np.clip(x, 0.0, 1.0)


def _check_state(fcm: Fcm, state: StateVector) -> None:
    if len(state) != fcm.n:
        raise ShapeError(f"state has {len(state)} components but FCM has {fcm.n} nodes")


def step(fcm: Fcm, state: StateVector, phi: Squasher) -> StateVector:
    """One update: next_j = phi(sum_i state_i * w[i, j]). Input is unchanged."""
    _check_state(fcm, state)
    raw = state.as_array() @ fcm.edges.weights
    return StateVector(values=tuple(_squash_array(phi, raw)), t=state.t + 1)


def default_max_steps(n: int, phi: Squasher) -> int:
    """Guaranteed-recurrence bound 2^n + 1 for small threshold systems, else 10k."""
    if phi.kind == HARD_THRESHOLD and n <= _EXHAUSTIVE_BOUND_MAX_N:
        return (1 << n) + 1
    return MAX_STEPS_CONTINUOUS


def classify_equilibrium(
    trajectory: list[StateVector] | tuple[StateVector, ...],
    tolerance: float = 0.0,
) -> EquilibriumClassification:
    """Classify the earliest recurrence in a trajectory.

    Scans for the earliest step j whose state matches some earlier step i
    within L-infinity distance <= tolerance; the gap j - i is the period
    (1 = fixed point) and i the transient length. With tolerance 0 the
    match is exact. No recurrence classifies as unresolved.
    """
    if len(trajectory) == 0:
        raise InputError("trajectory must be non-empty")
    if tolerance < 0:
        raise InputError("tolerance must be nonnegative")

    found: tuple[int, int] | None = None
    if tolerance == 0.0:
        seen: dict[bytes, int] = {}
        for j, state in enumerate(trajectory):
            key = state.as_array().tobytes()
            if key in seen:
                found = (seen[key], j)
                break
            seen[key] = j
    else:
        history = np.array([s.values for s in trajectory], dtype=np.float64)
        for j in range(1, len(trajectory)):
            gaps = np.max(np.abs(history[:j] - history[j]), axis=1)
            matches = np.nonzero(gaps <= tolerance)[0]
            if matches.size:
                found = (int(matches[0]), j)
                break

    if found is None:
        return EquilibriumClassification(
            kind=UNRESOLVED, period=0, cycle_states=(), transient_length=0
        )
    i, j = found
    period = j - i
    cycle = tuple(trajectory[i:j])
    kind = FIXED_POINT if period == 1 else LIMIT_CYCLE
    return EquilibriumClassification(
        kind=kind, period=period, cycle_states=cycle, transient_length=i
    )


def run_trajectory(
    fcm: Fcm,
    init: StateVector,
    phi: Squasher,
    max_steps: int | None = None,
    tolerance: float | None = None,
) -> tuple[list[StateVector], EquilibriumClassification]:
    """Evolve the FCM from init, stopping at the first recurrence or max_steps.

    Returns the trajectory (starting with init, ending with the recurrence
    witness when one is found) and its classification. Hard-threshold runs
    detect recurrence exactly; other squashers compare against the whole
    history with an L-infinity tolerance (default 1e-9).
    """
    _check_state(fcm, init)
    if max_steps is None:
        max_steps = default_max_steps(fcm.n, phi)
    if max_steps < 1:
        raise InputError("max_steps must be at least 1")

    if phi.kind == HARD_THRESHOLD:
        states, transient, period = kernels.trajectory_threshold(
            fcm.edges.weights, init.as_array(), phi.threshold, max_steps
        )
        trajectory = [
            StateVector(values=tuple(row), t=base_t) for base_t, row in enumerate(states, init.t)
        ]
        if period == 0:
            classification = EquilibriumClassification(
                kind=UNRESOLVED, period=0, cycle_states=(), transient_length=0
            )
        else:
            cycle = tuple(trajectory[transient : transient + period])
            classification = EquilibriumClassification(
                kind=FIXED_POINT if period == 1 else LIMIT_CYCLE,
                period=int(period),
                cycle_states=cycle,
                transient_length=int(transient),
            )
        return trajectory, classification

    tol = DEFAULT_TOLERANCE if tolerance is None else tolerance
    weights = fcm.edges.weights
    history = np.empty((max_steps + 1, fcm.n), dtype=np.float64)
    history[0] = init.as_array()
    found: tuple[int, int] | None = None
    steps_taken = 0
    for t in range(1, max_steps + 1):
        history[t] = _squash_array(phi, history[t - 1] @ weights)
        steps_taken = t
        gaps = np.max(np.abs(history[:t] - history[t]), axis=1)
        matches = np.nonzero(gaps <= tol)[0]
        if matches.size:
            found = (int(matches[0]), t)
            break

    trajectory = [
        StateVector(values=tuple(history[t]), t=init.t + t) for t in range(steps_taken + 1)
    ]
    if found is None:
        classification = EquilibriumClassification(
            kind=UNRESOLVED, period=0, cycle_states=(), transient_length=0
        )
    else:
        i, j = found
        period = j - i
        classification = EquilibriumClassification(
            kind=FIXED_POINT if period == 1 else LIMIT_CYCLE,
            period=period,
            cycle_states=tuple(trajectory[i:j]),
            transient_length=i,
        )
    return trajectory, classification


def _unpack_state(code: int, n: int, t: int) -> StateVector:
    values = tuple(float((code >> (n - 1 - i)) & 1) for i in range(n))
    return StateVector(values=values, t=t)


def _cycles_from_table(table: np.ndarray) -> tuple[np.ndarray, dict[int, list[int]]]:
    """Label every state with the canonical key of its attractor cycle.

    Returns (attractor_key_per_state, cycles) where cycles maps each
    canonical key (the smallest packed state on the cycle) to the cycle's
    packed states in dynamics order starting from that smallest state.
    Packed integer order equals lexicographic order on state vectors, so
    the smallest packed state is the lexicographically smallest state.
    """
    size = table.shape[0]
    # Pointer doubling: compose the map with itself until it represents at
    # least `size` steps; every state then lands somewhere on its cycle.
    g = table
    steps = 1
    while steps < size:
        g = g[g]
        steps *= 2

    rep = np.zeros(size, dtype=np.uint32)
    cycles: dict[int, list[int]] = {}
    for entry in np.unique(g):
        start = int(entry)
        cyc = [start]
        nxt = int(table[start])
        while nxt != start:
            cyc.append(nxt)
            nxt = int(table[nxt])
        smallest = min(cyc)
        if smallest in cycles:
            continue
        k = cyc.index(smallest)
        cyc = cyc[k:] + cyc[:k]
        cycles[smallest] = cyc
        for member in cyc:
            rep[member] = smallest
    return rep[g], cycles


def enumerate_basins(
    fcm: Fcm,
    phi: Squasher,
    max_nodes_guard: int = 20,
) -> dict[tuple[StateVector, ...], set[StateVector]]:
    """Partition all 2^n binary initial states by the attractor they reach.

    Keys are canonicalized attractors: the cycle rotated so its
    lexicographically smallest state comes first (a fixed point is a
    1-tuple). Values are the binary initial states (at t=0) whose
    trajectories reach that attractor. Only defined for hard-threshold
    dynamics, whose binary state space is finite.
    """
    if phi.kind != HARD_THRESHOLD:
        raise UnsupportedError("basin enumeration requires a hard-threshold squasher")
    if fcm.n > max_nodes_guard:
        raise ResourceError(
            f"basin enumeration over 2^{fcm.n} states exceeds the guard of {max_nodes_guard} nodes"
        )

    n = fcm.n
    table = kernels.transition_table(fcm.edges.weights, phi.threshold)
    attractor_key, cycles = _cycles_from_table(table)

    attractors = {
        key: tuple(_unpack_state(code, n, t) for t, code in enumerate(cyc))
        for key, cyc in cycles.items()
    }
    basins: dict[tuple[StateVector, ...], set[StateVector]] = {
        attractors[key]: set() for key in cycles
    }
    for init_code in range(1 << n):
        key = int(attractor_key[init_code])
        basins[attractors[key]].add(_unpack_state(init_code, n, 0))
    return basins


def attractor_signature(
    classification: EquilibriumClassification, labels: tuple[str, ...]
) -> tuple[tuple[str, ...], ...]:
    """Label-based canonical identity of an attractor, stable across node reorderings.

    Each cycle state becomes the sorted tuple of labels of its active
    (> 0.5) nodes; the cycle is rotated so the lexicographically smallest
    state tuple comes first. Unresolved classifications get an empty
    signature.
    """
    if not classification.resolved:
        return ()
    states = [
        tuple(sorted(label for label, v in zip(labels, s.values) if v > 0.5))
        for s in classification.cycle_states
    ]
    pivot = min(range(len(states)), key=lambda i: states[i])
    return tuple(states[pivot:] + states[:pivot])
