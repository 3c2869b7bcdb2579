"""Numba kernel for the negative-sampling layout optimizer.

The whole schedule is sequential and driven by an explicit splitmix64
generator, so a fixed seed reproduces the layout bit for bit; nothing
here depends on numpy's global RNG or on thread count.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


@njit(cache=True, inline="always")
def _next_u64(state):
    state[0] = state[0] + _GOLDEN
    z = state[0]
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _clip(v):
    if v > 4.0:
        return 4.0
    if v < -4.0:
        return -4.0
    return v


@njit(cache=True)
def optimize_layout(
    head_coords,
    tail_coords,
    heads,
    tails,
    due_step,
    a,
    b,
    learning_rate,
    n_epochs,
    negative_sample_rate,
    seed,
    move_other,
    same_set,
):
    """Run the attractive/repulsive SGD schedule in place.

    ``head_coords`` rows always move.  When ``move_other`` is set (the
    fit case) tail rows move too and both views alias one array; in the
    transform case the tail side is a frozen reference embedding and is
    only read.  Edge e fires whenever the epoch reaches its next due
    time, which advances by ``due_step[e]`` per firing, giving edge e
    exactly ceil(n_epochs / due_step[e]) updates spread evenly.

    Per positive update the head is pulled along the gradient of the
    low-dimensional kernel 1/(1 + a*d^(2b)), then pushed away from
    ``negative_sample_rate`` uniformly drawn tail rows; every gradient
    component is clipped to [-4, 4] and the learning rate decays
    linearly to zero over the epochs.
    """
    state = np.empty(1, dtype=np.uint64)
    state[0] = np.uint64(seed)
    _next_u64(state)

    n_edges = heads.shape[0]
    n_tail = tail_coords.shape[0]
    next_due = np.zeros(n_edges, dtype=np.float64)

    for epoch in range(n_epochs):
        alpha = learning_rate * (1.0 - epoch / n_epochs)
        for e in range(n_edges):
            if next_due[e] > epoch:
                continue
            next_due[e] += due_step[e]
            i = heads[e]
            j = tails[e]

            dx = head_coords[i, 0] - tail_coords[j, 0]
            dy = head_coords[i, 1] - tail_coords[j, 1]
            d2 = dx * dx + dy * dy
            if d2 > 0.0:
                gc = (-2.0 * a * b * d2 ** (b - 1.0)) / (1.0 + a * d2 ** b)
                gx = _clip(gc * dx)
                gy = _clip(gc * dy)
            else:
                gx = 0.0
                gy = 0.0
            head_coords[i, 0] += alpha * gx
            head_coords[i, 1] += alpha * gy
            if move_other:
                tail_coords[j, 0] -= alpha * gx
                tail_coords[j, 1] -= alpha * gy

            for _p in range(negative_sample_rate):
                k = int(_next_u64(state) % np.uint64(n_tail))
                if k == j:
                    continue
                if same_set and k == i:
                    continue
                dx = head_coords[i, 0] - tail_coords[k, 0]
                dy = head_coords[i, 1] - tail_coords[k, 1]
                d2 = dx * dx + dy * dy
                if d2 > 0.0:
                    gc = (2.0 * b) / ((0.001 + d2) * (1.0 + a * d2 ** b))
                    gx = _clip(gc * dx)
                    gy = _clip(gc * dy)
                else:
                    # coincident with a non-neighbour: push hard, direction
                    # is arbitrary but fixed
                    gx = 4.0
                    gy = 4.0
                head_coords[i, 0] += alpha * gx
                head_coords[i, 1] += alpha * gy
