"""Compiled inner loops (numba).

Hot paths only: the switch-chain walk, Hopcroft-Karp on CSR arrays, the
independent-edge baseline trial, and the bulk layered-edge certifier.  All
randomness inside kernels comes from an explicit splitmix64 state so results
are reproducible across runs and machines.  Reference implementations of
everything here live in the pure-Python modules and are cross-tested.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U64 = np.uint64
_GAMMA = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)


@njit(cache=True, nogil=True)
def _sm64(state):
    state = state + _GAMMA
    z = state
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    z = z ^ (z >> U64(31))
    return state, z


@njit(cache=True, nogil=True)
def _bounded(state, n):
    """Unbiased uniform draw from 0..n-1 (rejection against the wrap zone)."""
    nn = U64(n)
    lim = (U64(0) - nn) % nn
    while True:
        state, x = _sm64(state)
        if x >= lim:
            return state, np.int64(x % nn)


@njit(cache=True, nogil=True)
def rng_stream(seed, count):
    """First `count` raw splitmix64 outputs; pins the kernel RNG to the Python mirror."""
    out = np.empty(count, dtype=np.uint64)
    state = U64(seed)
    for i in range(count):
        state, z = _sm64(state)
        out[i] = z
    return out


@njit(cache=True, nogil=True)
def switch_chain_run(adj, member, steps, state):
    """Run `steps` accepted switchings in place; returns the advanced RNG state.

    adj is the n x kd working out-adjacency (rows unordered); member is the
    edge set as an n x ceil(kn/64) uint64 bitset (packed for cache locality).
    A proposal picks y-vertices a, b and edge slots uniformly; the switch is
    valid exactly when both replacement edges are absent (this also rules
    out a == b and c == d).
    """
    n = adj.shape[0]
    kd = adj.shape[1]
    st = U64(state)
    one = U64(1)
    done = 0
    while done < steps:
        st, a = _bounded(st, n)
        st, b = _bounded(st, n)
        st, ci = _bounded(st, kd)
        st, di = _bounded(st, kd)
        c = adj[a, ci]
        d = adj[b, di]
        dw = d >> 6
        db = U64(d & 63)
        cw = c >> 6
        cb = U64(c & 63)
        if (member[a, dw] >> db) & one or (member[b, cw] >> cb) & one:
            continue
        adj[a, ci] = d
        adj[b, di] = c
        member[a, cw] &= ~(one << cb)
        member[b, dw] &= ~(one << db)
        member[a, dw] |= one << db
        member[b, cw] |= one << cb
        done += 1
    return st


@njit(cache=True, nogil=True)
def _hk_core(indptr, indices, na, nb, match_l, match_r, dist, queue, stack_u, stack_p):
    """Hopcroft-Karp maximum matching size on a CSR bipartite graph."""
    INF = np.int32(na + nb + 2)
    for u in range(na):
        match_l[u] = -1
    for v in range(nb):
        match_r[v] = -1
    # greedy warm start
    for u in range(na):
        for p in range(indptr[u], indptr[u + 1]):
            v = indices[p]
            if match_r[v] < 0:
                match_l[u] = v
                match_r[v] = u
                break
    size = 0
    for u in range(na):
        if match_l[u] >= 0:
            size += 1
    while True:
        # BFS layers from free left vertices
        qh = 0
        qt = 0
        for u in range(na):
            if match_l[u] < 0:
                dist[u] = 0
                queue[qt] = u
                qt += 1
            else:
                dist[u] = INF
        free_dist = INF
        while qh < qt:
            u = queue[qh]
            qh += 1
            if dist[u] >= free_dist:
                continue
            for p in range(indptr[u], indptr[u + 1]):
                v = indices[p]
                w = match_r[v]
                if w < 0:
                    if dist[u] + 1 < free_dist:
                        free_dist = dist[u] + 1
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue[qt] = w
                    qt += 1
        if free_dist == INF:
            return size
        # DFS augmentation along layered paths
        for s in range(na):
            if match_l[s] >= 0:
                continue
            top = 0
            stack_u[0] = s
            stack_p[0] = indptr[s]
            while top >= 0:
                u = stack_u[top]
                p = stack_p[top]
                if p >= indptr[u + 1]:
                    dist[u] = INF  # dead end; never revisit this phase
                    top -= 1
                    continue
                stack_p[top] = p + 1
                v = indices[p]
                w = match_r[v]
                if w < 0:
                    if dist[u] + 1 == free_dist:
                        # flip the alternating path recorded on the stack
                        match_r[v] = u
                        prev = match_l[u]
                        match_l[u] = v
                        vv = prev
                        t = top - 1
                        while t >= 0:
                            uu = stack_u[t]
                            match_r[vv] = uu
                            prev = match_l[uu]
                            match_l[uu] = vv
                            vv = prev
                            t -= 1
                        size += 1
                        top = -1  # done with this source
                elif dist[w] == dist[u] + 1:
                    top += 1
                    stack_u[top] = w
                    stack_p[top] = indptr[w]


@njit(cache=True, nogil=True)
def hk_matching_size(indptr, indices, na, nb):
    match_l = np.empty(na, dtype=np.int32)
    match_r = np.empty(nb, dtype=np.int32)
    dist = np.empty(na, dtype=np.int32)
    queue = np.empty(na, dtype=np.int32)
    stack_u = np.empty(na + 1, dtype=np.int32)
    stack_p = np.empty(na + 1, dtype=np.int64)
    return _hk_core(indptr, indices, na, nb, match_l, match_r, dist, queue, stack_u, stack_p)


@njit(cache=True, nogil=True)
def certify_upward_layer(
    a_indptr,
    a_indices,
    at_indptr,
    at_indices,
    b_indptr,
    b_indices,
    n_mid,
    n_top,
    viol_u,
    viol_v,
):
    """Check, for every edge u->v of the lower block, that the upper block
    matches the whole neighborhood of v injectively from the neighborhood
    of u.  Failing (u, v) pairs go to viol_u/viol_v; returns their count.

    Lower block A: X_prev -> X_mid (rows give Gamma(u); the transpose
    enumerates the pairs to check, v-major).  Upper block B: X_mid -> X_top
    (rows give Gamma(v)).  For each v the B-rows are pre-filtered once to
    local Gamma(v) targets; every edge into v then runs Hopcroft-Karp over
    the shared filtered rows, restricted to Gamma(u), with stamp-versioned
    state (no per-edge clearing) and early exit once the target side is
    saturated or provably not saturable.
    """
    # per-v filtered rows: hr holds, for every x in X_mid, the local target
    # indices of Gamma(x) ∩ Gamma(v)
    hr_indptr = np.empty(n_mid + 1, dtype=np.int64)
    hr_indices = np.empty(b_indices.shape[0] + 1, dtype=np.int32)
    loc_val = np.empty(n_top, dtype=np.int32)
    loc_stamp = np.full(n_top, -1, dtype=np.int64)
    # per-edge matching state; ml_val is re-initialized for Gamma(u) in
    # the greedy pass, dist is stamp-versioned per phase
    ml_val = np.empty(n_mid, dtype=np.int32)  # x -> matched local target
    dist_val = np.empty(n_mid, dtype=np.int32)
    dist_stamp = np.full(n_mid, -1, dtype=np.int64)
    max_nb = 0
    for x in range(n_mid):
        deg = b_indptr[x + 1] - b_indptr[x]
        if deg > max_nb:
            max_nb = deg
    mr = np.empty(max_nb + 1, dtype=np.int32)  # local target -> matched x
    queue = np.empty(n_mid, dtype=np.int32)
    stack_x = np.empty(n_mid + 1, dtype=np.int32)
    stack_p = np.empty(n_mid + 1, dtype=np.int64)
    INF = np.int32(2 * n_mid + 2)
    count = 0
    phase_id = np.int64(0)
    for v in range(n_mid):
        nb = np.int32(b_indptr[v + 1] - b_indptr[v])
        if at_indptr[v + 1] == at_indptr[v]:
            continue
        for j in range(nb):
            w = b_indices[b_indptr[v] + j]
            loc_val[w] = j
            loc_stamp[w] = v
        pos = 0
        hr_indptr[0] = 0
        for x in range(n_mid):
            for p in range(b_indptr[x], b_indptr[x + 1]):
                w = b_indices[p]
                if loc_stamp[w] == v:
                    hr_indices[pos] = loc_val[w]
                    pos += 1
            hr_indptr[x + 1] = pos
        for q in range(at_indptr[v], at_indptr[v + 1]):
            u = at_indices[q]
            na = a_indptr[u + 1] - a_indptr[u]
            ga = a_indices[a_indptr[u] : a_indptr[u + 1]]
            if na < nb:
                viol_u[count] = u
                viol_v[count] = v
                count += 1
                continue
            for j in range(nb):
                mr[j] = -1
            matched = np.int32(0)
            # greedy pass over Gamma(u)
            for r in range(na):
                x = ga[r]
                ml_val[x] = -1
                for p in range(hr_indptr[x], hr_indptr[x + 1]):
                    j = hr_indices[p]
                    if mr[j] < 0:
                        mr[j] = x
                        ml_val[x] = j
                        matched += 1
                        break
            # augmenting phases until the target side saturates or cannot
            while matched < nb:
                phase_id += 1
                qh = 0
                qt = 0
                for r in range(na):
                    x = ga[r]
                    if ml_val[x] < 0:
                        dist_val[x] = 0
                        dist_stamp[x] = phase_id
                        queue[qt] = x
                        qt += 1
                free_dist = INF
                while qh < qt:
                    x = queue[qh]
                    qh += 1
                    if dist_val[x] >= free_dist:
                        continue
                    for p in range(hr_indptr[x], hr_indptr[x + 1]):
                        x2 = mr[hr_indices[p]]
                        if x2 < 0:
                            if dist_val[x] + 1 < free_dist:
                                free_dist = dist_val[x] + 1
                        elif dist_stamp[x2] != phase_id:
                            dist_stamp[x2] = phase_id
                            dist_val[x2] = dist_val[x] + 1
                            queue[qt] = x2
                            qt += 1
                if free_dist == INF:
                    break
                for r in range(na):
                    s = ga[r]
                    if ml_val[s] >= 0:
                        continue
                    top = 0
                    stack_x[0] = s
                    stack_p[0] = hr_indptr[s]
                    while top >= 0:
                        x = stack_x[top]
                        p = stack_p[top]
                        if p >= hr_indptr[x + 1]:
                            dist_val[x] = INF
                            top -= 1
                            continue
                        stack_p[top] = p + 1
                        j = hr_indices[p]
                        x2 = mr[j]
                        if x2 < 0:
                            if dist_val[x] + 1 == free_dist:
                                mr[j] = x
                                prev = ml_val[x]
                                ml_val[x] = j
                                jj = prev
                                t = top - 1
                                while t >= 0:
                                    xx = stack_x[t]
                                    mr[jj] = xx
                                    prev = ml_val[xx]
                                    ml_val[xx] = jj
                                    jj = prev
                                    t -= 1
                                matched += 1
                                top = -1
                        elif (
                            dist_stamp[x2] == phase_id
                            and dist_val[x2] == dist_val[x] + 1
                        ):
                            top += 1
                            stack_x[top] = x2
                            stack_p[top] = hr_indptr[x2]
                    if matched == nb:
                        break
            if matched < nb:
                viol_u[count] = u
                viol_v[count] = v
                count += 1
    return count


@njit(cache=True, nogil=True)
def er_bipartite_trial(n, p, seed):
    """One independent-edge bipartite graph B(n, p); returns 1 if it has a
    perfect matching, else 0.

    Cells of the n x n adjacency are visited as one Bernoulli(p) stream via
    geometric gap skipping, which is exact and touches only realized edges.
    """
    if p <= 0.0:
        return 0 if n > 0 else 1
    st = U64(seed)
    total = n * n
    cap = int(total * p + 10.0 * np.sqrt(total * p) + 64.0)
    if cap > total:
        cap = total
    rows = np.empty(cap, dtype=np.int32)
    cols = np.empty(cap, dtype=np.int32)
    m = 0
    pos = -1
    log1mp = np.log1p(-p) if p < 1.0 else 0.0
    while True:
        if p >= 1.0:
            gap = 1
        else:
            st, z = _sm64(st)
            # uniform in (0,1): 53-bit mantissa
            u = (np.float64(z >> U64(11)) + 0.5) * (1.0 / 9007199254740992.0)
            gap = 1 + np.int64(np.floor(np.log(u) / log1mp))
        pos += gap
        if pos >= total:
            break
        if m >= cap:
            # extremely unlikely tail; grow
            new_rows = np.empty(cap * 2, dtype=np.int32)
            new_cols = np.empty(cap * 2, dtype=np.int32)
            new_rows[:m] = rows[:m]
            new_cols[:m] = cols[:m]
            rows = new_rows
            cols = new_cols
            cap *= 2
        rows[m] = pos // n
        cols[m] = pos % n
        m += 1
    indptr = np.zeros(n + 1, dtype=np.int64)
    for e in range(m):
        indptr[rows[e] + 1] += 1
    for i in range(n):
        indptr[i + 1] += indptr[i]
    # rows arrive in row-major order, so cols[:m] is already CSR-ordered
    size = hk_matching_size(indptr, cols[:m], n, n)
    return 1 if size == n else 0
