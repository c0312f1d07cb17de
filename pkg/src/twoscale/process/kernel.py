"""
Compiled next-event kernel for the two-scale process
File: src/twoscale/process/kernel.py

Per-vertex total rates live in a sum tree (leaves at size + v), so drawing the
next event and updating a neighborhood both cost O(log V). Parents are always
recomputed from their children, so no rounding drift accumulates. The same
`vertex_rates` function backs the Python-level rate query.

`topo` is (short_ptr, short_idx, long_ptr, long_idx, is_center, patch_of,
center_of) and `model` is (rates, variant, spont_vertex, spont_rate) with
rates = [B1, B2, beta1, beta2, delta1, delta2].
"""
import numpy as np
from numba import njit

PLAIN, FINITE_VOLUME, MODIFIED = 0, 1, 2


def pack_topology(graph):
    """Kernel view of a TwoScaleGraph"""
    return (
        graph.short_ptr,
        graph.short_idx,
        graph.long_ptr,
        graph.long_idx,
        graph.is_center,
        graph.patch_of,
        graph.center_of,
    )


def pack_model(params, graph):
    """Kernel view of ModelParams on a given graph"""
    spont_vertex = -1
    if params.variant.code == FINITE_VOLUME:
        spont_vertex = int(graph.center_of[0])
    return (
        params.as_array(),
        params.variant.code,
        spont_vertex,
        params.spontaneous_rate(graph.spec.d),
    )


@njit
def vertex_rates(v, states, count2, topo, model):
    """(rate_to_1, rate_to_2, rate_to_0) at vertex v"""
    short_ptr, short_idx, long_ptr, long_idx, is_center, patch_of, center_of = topo
    rates, variant, spont_vertex, spont_rate = model
    s = states[v]
    if s == 1:
        return 0.0, 0.0, rates[4]
    if s == 2:
        return 0.0, 0.0, rates[5]

    n1s = 0
    n2s = 0
    for j in range(short_ptr[v], short_ptr[v + 1]):
        w = states[short_idx[j]]
        if w == 1:
            n1s += 1
        elif w == 2:
            n2s += 1
    n1l = 0
    n2l = 0
    for j in range(long_ptr[v], long_ptr[v + 1]):
        w = states[long_idx[j]]
        if w == 1:
            n1l += 1
        elif w == 2:
            n2l += 1

    r1 = rates[2] * n1s
    r2 = rates[3] * n2s
    if variant == MODIFIED:
        if is_center[v]:
            r1 += spont_rate
            if count2[patch_of[v]] == 0:
                r2 += rates[1] * n2l
    else:
        r1 += rates[0] * n1l
        r2 += rates[1] * n2l
        if variant == FINITE_VOLUME and v == spont_vertex:
            r1 += spont_rate
    return r1, r2, 0.0


@njit
def _tree_set(tree, size, v, value):
    i = size + v
    tree[i] = value
    i //= 2
    while i >= 1:
        tree[i] = tree[2 * i] + tree[2 * i + 1]
        i //= 2


@njit
def _tree_pick(tree, size, u):
    i = 1
    while i < size:
        left = tree[2 * i]
        if u < left:
            i = 2 * i
        else:
            u -= left
            i = 2 * i + 1
    return i - size


@njit
def _refresh(v, tree, size, states, count2, topo, model):
    r1, r2, r0 = vertex_rates(v, states, count2, topo, model)
    _tree_set(tree, size, v, r1 + r2 + r0)


@njit
def grow(a):
    """Double the capacity of a 1-d record array"""
    b = np.empty(2 * a.shape[0], dtype=a.dtype)
    b[: a.shape[0]] = a
    return b


@njit
def patch_counts(states, patch_of, n_patches):
    """Number of 2's per patch"""
    count2 = np.zeros(n_patches, dtype=np.int64)
    for v in range(states.shape[0]):
        if states[v] == 2:
            count2[patch_of[v]] += 1
    return count2


@njit
def gillespie_kernel(
    states, topo, model, t_max, sample_times, watched, watch_patch, stop_type, seed
):
    """Run the CTMC from `states` (modified in place) until t_max.

    Returns snapshots at sample_times, the state changes of watched vertices,
    the void/non-void flips of `watch_patch`, the event count and the time at
    which `stop_type` went extinct (-1 if it did not).
    """
    np.random.seed(seed)
    patch_of = topo[5]
    center_of = topo[6]
    short_ptr, short_idx, long_ptr, long_idx = topo[0], topo[1], topo[2], topo[3]
    variant = model[1]

    n = states.shape[0]
    count2 = patch_counts(states, patch_of, center_of.shape[0])
    counts = np.zeros(3, dtype=np.int64)
    for v in range(n):
        counts[states[v]] += 1

    size = 1
    while size < n:
        size *= 2
    tree = np.zeros(2 * size, dtype=np.float64)
    for v in range(n):
        r1, r2, r0 = vertex_rates(v, states, count2, topo, model)
        tree[size + v] = r1 + r2 + r0
    for i in range(size - 1, 0, -1):
        tree[i] = tree[2 * i] + tree[2 * i + 1]

    n_samples = sample_times.shape[0]
    snaps = np.empty((n_samples, n), dtype=np.int8)
    d_t = np.empty(256, dtype=np.float64)
    d_v = np.empty(256, dtype=np.int64)
    d_s = np.empty(256, dtype=np.int64)
    n_d = 0
    f_t = np.empty(16, dtype=np.float64)
    f_up = np.empty(16, dtype=np.int64)
    n_f = 0

    t = 0.0
    k = 0
    n_events = 0
    stop_time = -1.0
    if stop_type > 0 and counts[stop_type] == 0:
        stop_time = 0.0
    while stop_time < 0.0:
        total = tree[1]
        if total <= 0.0:
            break
        t_next = t + np.random.exponential(1.0 / total)
        while k < n_samples and sample_times[k] < t_next:
            snaps[k, :] = states
            k += 1
        if t_next > t_max:
            break
        t = t_next

        v = _tree_pick(tree, size, np.random.random() * total)
        r1, r2, r0 = vertex_rates(v, states, count2, topo, model)
        old = states[v]
        if old == 0:
            if r1 + r2 <= 0.0:
                continue
            new = 1 if np.random.random() * (r1 + r2) < r1 else 2
        else:
            if r0 <= 0.0:
                continue
            new = 0

        states[v] = new
        counts[old] -= 1
        counts[new] += 1
        p = patch_of[v]
        flip = 0
        if old == 2:
            count2[p] -= 1
            if count2[p] == 0:
                flip = -1
        if new == 2:
            count2[p] += 1
            if count2[p] == 1:
                flip = 1
        n_events += 1

        if watched[v]:
            if n_d == d_t.shape[0]:
                d_t = grow(d_t)
                d_v = grow(d_v)
                d_s = grow(d_s)
            d_t[n_d] = t
            d_v[n_d] = v
            d_s[n_d] = new
            n_d += 1
        if flip != 0 and p == watch_patch:
            if n_f == f_t.shape[0]:
                f_t = grow(f_t)
                f_up = grow(f_up)
            f_t[n_f] = t
            f_up[n_f] = flip
            n_f += 1

        _refresh(v, tree, size, states, count2, topo, model)
        for j in range(short_ptr[v], short_ptr[v + 1]):
            _refresh(short_idx[j], tree, size, states, count2, topo, model)
        for j in range(long_ptr[v], long_ptr[v + 1]):
            _refresh(long_idx[j], tree, size, states, count2, topo, model)
        if variant == MODIFIED and flip != 0:
            _refresh(center_of[p], tree, size, states, count2, topo, model)

        if stop_type > 0 and counts[stop_type] == 0:
            stop_time = t

    while k < n_samples:
        snaps[k, :] = states
        k += 1
    return snaps, d_t[:n_d], d_v[:n_d], d_s[:n_d], f_t[:n_f], f_up[:n_f], n_events, stop_time
