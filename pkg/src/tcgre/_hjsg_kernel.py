"""Compiled inner loop for the dynamic joint-state search.

Joint states are packed into one integer: robot ``i`` contributes digit
``d_i`` times ``R**(N-1-i)`` where ``R = |V_s| + 1``, digit 0 is RETIRED and
digit ``k + 1`` is the k-th super node in ascending id order. Integer order
then equals tuple order, so the heap breaks ties exactly like the pure
Python search and both engines pop the same states in the same order.
"""

from __future__ import annotations

import numpy as np
from numba import njit

CONTINUE, FOUND, EXHAUSTED, HEAP_FULL = 0, 1, 2, 3
MODE_ALL_HOME, MODE_ANYTIME, MODE_AUTO = 0, 1, 2


# 4-ary min-heap on (key, code); shallower than a binary heap, and each
# node's children share a cache line

@njit(cache=True, inline="always")
def _push(hk, hc, hsize, key, code):
    i = hsize
    while i > 0:
        p = (i - 1) >> 2
        if hk[p] < key or (hk[p] == key and hc[p] < code):
            break
        hk[i] = hk[p]
        hc[i] = hc[p]
        i = p
    hk[i] = key
    hc[i] = code
    return hsize + 1


@njit(cache=True, inline="always")
def _pop(hk, hc, hsize):
    key = hk[0]
    code = hc[0]
    hsize -= 1
    if hsize > 0:
        lk = hk[hsize]
        lc = hc[hsize]
        i = 0
        while True:
            c = 4 * i + 1
            if c >= hsize:
                break
            end = min(c + 4, hsize)
            m = c
            for r in range(c + 1, end):
                if hk[r] < hk[m] or (hk[r] == hk[m] and hc[r] < hc[m]):
                    m = r
            if lk < hk[m] or (lk == hk[m] and lc < hc[m]):
                break
            hk[i] = hk[m]
            hc[i] = hc[m]
            i = m
        hk[i] = lk
        hc[i] = lc
    return key, code, hsize


@njit(cache=True, inline="always")
def _finish(t, n, pw, goal, grp_ptr, grp_slots, mode):
    """Apply the retirement rule and goal-group canonicalization, return the code."""
    if mode == MODE_ALL_HOME:
        home = True
        for i in range(n):
            if t[i] != 0 and t[i] != goal[i]:
                home = False
                break
        if home:
            return 0
    elif mode == MODE_AUTO:
        for i in range(n):
            if t[i] == goal[i]:
                t[i] = 0
    for g in range(grp_ptr.shape[0] - 1):
        lo = grp_ptr[g]
        hi = grp_ptr[g + 1]
        # insertion sort of the digits held by this group's slots
        for a in range(lo + 1, hi):
            v = t[grp_slots[a]]
            b = a - 1
            while b >= lo and t[grp_slots[b]] > v:
                t[grp_slots[b + 1]] = t[grp_slots[b]]
                b -= 1
            t[grp_slots[b + 1]] = v
    code = 0
    for i in range(n):
        code += t[i] * pw[i]
    return code


@njit(cache=True, inline="always")
def _moved(code, s, t, n, pw, goal, grp_ptr, grp_slots, mode, nh, a, u, b, v):
    """Code of ``s`` with robot ``a`` moved to ``u`` and, if ``b >= 0``, ``b`` to ``v``."""
    if grp_ptr.shape[0] > 1:
        for i in range(n):
            t[i] = s[i]
        t[a] = u
        if b >= 0:
            t[b] = v
        return _finish(t, n, pw, goal, grp_ptr, grp_slots, mode)
    # no goal groups: update the packed code in place
    p = s[a]
    if mode == MODE_ALL_HOME:
        nh += (u != goal[a]) - (p != goal[a])
        if b >= 0:
            nh += (v != goal[b]) - (s[b] != goal[b])
        if nh == 0:
            return 0
    elif mode == MODE_AUTO:
        if u == goal[a]:
            u = 0
        if b >= 0 and v == goal[b]:
            v = 0
    code += (u - p) * pw[a]
    if b >= 0:
        code += (v - s[b]) * pw[b]
    return code


@njit(cache=True)
def run_chunk(dist, parent, visited, hk, hc, hstate, max_pops, n, pw,
              adj_ptr, adj_to, adj_cost, sup_ptr, sup_to, sup_cost, sup_mask,
              goal, grp_ptr, grp_slots, mode, pair_moves, stats):
    """Pop up to ``max_pops`` states. ``hstate = [heap size, capacity, reserve]``."""
    s = np.zeros(n, np.int64)
    t = np.zeros(n, np.int64)
    pops = 0
    while hstate[0] > 0:
        if pops >= max_pops:
            return CONTINUE
        if hstate[0] + hstate[2] > hstate[1]:
            return HEAP_FULL
        d, code, hsize = _pop(hk, hc, hstate[0])
        hstate[0] = hsize
        if visited[code]:
            continue
        visited[code] = 1
        stats[0] += 1
        pops += 1
        if code == 0:
            return FOUND
        rest = code
        nh = 0
        for i in range(n):
            s[i] = rest // pw[i]
            rest -= s[i] * pw[i]
            if s[i] != 0 and s[i] != goal[i]:
                nh += 1

        for a in range(n):
            p = s[a]
            if p == 0:
                continue
            if mode == MODE_ANYTIME and p == goal[a]:
                for i in range(n):
                    t[i] = s[i]
                t[a] = 0
                tc = _finish(t, n, pw, goal, grp_ptr, grp_slots, mode)
                if not visited[tc]:
                    stats[1] += 1
                    if d < dist[tc]:
                        dist[tc] = d
                        parent[tc] = code
                        hstate[0] = _push(hk, hc, hstate[0], d, tc)
            for e in range(adj_ptr[p], adj_ptr[p + 1]):
                tc = _moved(code, s, t, n, pw, goal, grp_ptr, grp_slots, mode, nh,
                            a, adj_to[e], -1, 0)
                if not visited[tc]:
                    stats[1] += 1
                    nd = d + adj_cost[e]
                    if nd < dist[tc]:
                        dist[tc] = nd
                        parent[tc] = code
                        hstate[0] = _push(hk, hc, hstate[0], nd, tc)

        for a in range(n):
            pa = s[a]
            if pa == 0:
                continue
            for b in range(a + 1, n):
                pb = s[b]
                if pb == 0:
                    continue
                for side in range(2):
                    if side == 0:
                        mover, pm, ps = a, pa, pb
                    else:
                        mover, pm, ps = b, pb, pa
                    for e in range(sup_ptr[pm], sup_ptr[pm + 1]):
                        if not sup_mask[e, ps]:
                            continue
                        tc = _moved(code, s, t, n, pw, goal, grp_ptr, grp_slots, mode, nh,
                                    mover, sup_to[e], -1, 0)
                        if not visited[tc]:
                            stats[1] += 1
                            nd = d + sup_cost[e]
                            if nd < dist[tc]:
                                dist[tc] = nd
                                parent[tc] = code
                                hstate[0] = _push(hk, hc, hstate[0], nd, tc)
                if pair_moves:
                    for ea in range(adj_ptr[pa], adj_ptr[pa + 1]):
                        for eb in range(adj_ptr[pb], adj_ptr[pb + 1]):
                            tc = _moved(code, s, t, n, pw, goal, grp_ptr, grp_slots, mode, nh,
                                        a, adj_to[ea], b, adj_to[eb])
                            if not visited[tc]:
                                stats[1] += 1
                                nd = d + (adj_cost[ea] + adj_cost[eb])
                                if nd < dist[tc]:
                                    dist[tc] = nd
                                    parent[tc] = code
                                    hstate[0] = _push(hk, hc, hstate[0], nd, tc)
    return EXHAUSTED
