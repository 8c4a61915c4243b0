"""Streaming sweep-line engine for one angular window.

A window of chunk ``c`` spans the unwrapped angles ``[lo, hi)`` where
``[lo, mid)`` is the owned chunk and ``[mid, hi)`` a replica of the next
chunk (shifted by 2*pi when it wraps). Points are created from sorted
begin-of-request angles and their node tokens are placed to the right of
their begin, so a single left-to-right pass sees every request before the
nodes it can match.

Per streaming annulus the engine keeps
  * an insertion buffer of begin tokens from the annulus below,
  * a node buffer of pending node tokens,
both bucketed by cell, plus a flat array of active requests that is
compacted when a cell is entered. Annulus ``j + 1`` only processes a cell
once annulus ``j`` has finished all cells overlapping it.

Replica tokens are tagged Foreign. A (request, node) pair is matched only if
at least one side is Local, which makes every pair count exactly once
across all windows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from numba import njit

from .geometry import TWO_PI, adjacent_fields, angular_deviation
from .rng import (annulus_radius, mt_new, mt_random_open, sorted_step,
                  sorted_value)

SCHEDULE_ANGULAR = 0
SCHEDULE_LOWEST_FIRST = 1

PHASE_STREAMING = 0
PHASE_FINAL = 1

# pool token float fields
F_COTH, F_ISINH, F_COS, F_SIN, F_CENTER, F_CLO, F_CHI, F_BEGIN, F_END, F_R = range(10)
NF = 10
# pool token / active int fields
I_ID, I_SRC, I_LOCAL = range(3)
NI = 3
# active float fields
A_COTH, A_ISINH, A_COS, A_SIN, A_CENTER, A_BEGIN, A_END = range(7)
NA = 7

# per-annulus counters
(C_COMPS, C_EDGES, C_LOCAL_DRAWS, C_FOREIGN_DRAWS, C_MAX_BUFFER, C_MAX_ACTIVE,
 C_FINAL_COMPS, C_FINAL_EDGES, C_MAX_CELL_BEGINS, C_CELLS) = range(10)
N_COUNTERS = 10

# window summary slots
S_LOCAL_LEFT, S_EARLY_STOP, S_FINAL_NODES, S_VERTICES = range(4)
N_SUMMARY = 4

_LOCAL_SLACK = 1e-9


class SweepError(RuntimeError):
    """Raised when a Local token would leave its window."""


def split_wraparound(a: float, b: float) -> list[tuple[float, float]]:
    """Map ``[a, b)`` onto one or two ranges inside ``[0, 2*pi)``."""
    if b - a >= TWO_PI:
        return [(0.0, TWO_PI)]
    if a < 0.0:
        return [(a + TWO_PI, TWO_PI), (0.0, b)]
    if b > TWO_PI:
        return [(a, TWO_PI), (0.0, b - TWO_PI)]
    return [(a, b)]


def clip_request(center: float, half_width: float, arc_lo: float, arc_hi: float) -> list[tuple[float, float, float]]:
    """Intersect the periodic range ``center +- half_width`` with an unwrapped arc.

    Returns ``(shifted_center, begin, end)`` pieces; each piece keeps the
    copy of the center it came from so narrower ranges in higher annuli can
    be re-centered and clipped to the piece.
    """
    pieces = []
    k_lo = math.floor((arc_lo - center - half_width) / TWO_PI)
    k_hi = math.ceil((arc_hi - center + half_width) / TWO_PI)
    for k in range(k_lo, k_hi + 1):
        c = center + k * TWO_PI
        b = max(c - half_width, arc_lo)
        e = min(c + half_width, arc_hi)
        if b < e:
            pieces.append((c, b, e))
    return pieces


@dataclass
class SweepWindow:
    """Everything one window sweep needs, as flat arrays for the kernel."""

    R: float
    alpha: float
    lo: float
    mid: float
    hi: float
    ann_lo: np.ndarray
    ann_hi: np.ndarray
    s_lo: np.ndarray
    s_hi: np.ndarray
    cells: np.ndarray
    loc_n: np.ndarray
    loc_seed_ang: np.ndarray
    loc_seed_rad: np.ndarray
    loc_base: np.ndarray
    for_n: np.ndarray
    for_seed_ang: np.ndarray
    for_seed_rad: np.ndarray
    for_base: np.ndarray
    for_a: float
    for_b: float
    for_shift: float
    g_f: np.ndarray  # (m, NF) global request pieces for the lowest annulus
    g_i: np.ndarray  # (m, NI)

    @property
    def n_annuli(self) -> int:
        return len(self.ann_lo)

    @property
    def n_local(self) -> int:
        return int(self.loc_n.sum())


# ---------------------------------------------------------------------------
# kernels


@njit(cache=True, nogil=True)
def _grow_rows(a, cap):
    b = np.empty((cap, a.shape[1]), dtype=a.dtype)
    b[: a.shape[0]] = a
    return b


@njit(cache=True, nogil=True)
def _grow_vec(a, cap):
    b = np.empty(cap, dtype=a.dtype)
    b[: a.shape[0]] = a
    return b


@njit(cache=True, nogil=True)
def _grow_active(a, cap):
    b = np.empty((a.shape[0], a.shape[1], cap), dtype=a.dtype)
    b[:, :, : a.shape[2]] = a
    return b


@njit(cache=True, nogil=True)
def _cell_of(x, cells):
    return int(math.floor(x * cells / TWO_PI))


@njit(cache=True, nogil=True)
def draw_next_point(ang_state, rad_state, y, k, a, b, s_lo, s_hi, alpha, lo, hi, R):
    """One streaming point from its annulus stream.

    Returns ``(y, beta, r, half_width)``: the updated descending maximum, the
    begin angle on ``[a, b)``, the radius in ``[lo, hi)`` and the request
    half-width ``Delta theta(r, lo)`` that places the node at ``beta + w``.
    """
    y = sorted_step(ang_state, y, k)
    beta = sorted_value(a, b, y)
    r = annulus_radius(mt_random_open(rad_state), s_lo, s_hi, alpha, lo, hi)
    return y, beta, r, angular_deviation(r, lo, R)


@njit(cache=True, nogil=True)
def process_end(act_f, act_i, j, n_act, g, cells):
    """Drop active requests whose end lies in a cell before ``g``.

    Survivors are moved down in order. Returns the new size and the number
    of Local requests removed.
    """
    w = 0
    gone_local = 0
    for s in range(n_act):
        if _cell_of(act_f[j, A_END, s], cells) < g:
            gone_local += act_i[j, I_LOCAL, s]
            continue
        if w != s:
            for f in range(NA):
                act_f[j, f, w] = act_f[j, f, s]
            for f in range(NI):
                act_i[j, f, w] = act_i[j, f, s]
        w += 1
    return w, gone_local


@njit(cache=True, nogil=True)
def process_node(act_f, act_i, j, n_act, nid, nloc, u, ncos, nsin, ncoth, nisinh,
                 cosh_R, edges, e_n, comp_base, fault_index):
    """Match one node against the active requests of annulus ``j``.

    Returns the new edge count and the number of distance evaluations.
    """
    comps = 0
    for s in range(n_act):
        sid = act_i[j, I_ID, s]
        if sid == nid:
            continue
        if nloc == 0 and act_i[j, I_LOCAL, s] == 0:
            continue
        if u < act_f[j, A_BEGIN, s] or u >= act_f[j, A_END, s]:
            continue
        if act_i[j, I_SRC, s] == j:
            # same annulus: only the request whose node lies to the left
            dc = u - act_f[j, A_CENTER, s]
            if dc < 0.0 or (dc == 0.0 and sid > nid):
                continue
        adj = adjacent_fields(act_f[j, A_COS, s], act_f[j, A_SIN, s],
                              act_f[j, A_COTH, s], act_f[j, A_ISINH, s],
                              ncos, nsin, ncoth, nisinh, cosh_R)
        if comp_base + comps == fault_index:
            adj = not adj
        comps += 1
        if adj:
            if sid < nid:
                edges[e_n, 0] = sid
                edges[e_n, 1] = nid
            else:
                edges[e_n, 0] = nid
                edges[e_n, 1] = sid
            e_n += 1
    return e_n, comps


@njit(cache=True, nogil=True)
def _activate(act_f, act_i, j, s, coth, isinh, c, sn, center, begin, end, rid, src, loc):
    act_f[j, A_COTH, s] = coth
    act_f[j, A_ISINH, s] = isinh
    act_f[j, A_COS, s] = c
    act_f[j, A_SIN, s] = sn
    act_f[j, A_CENTER, s] = center
    act_f[j, A_BEGIN, s] = begin
    act_f[j, A_END, s] = end
    act_i[j, I_ID, s] = rid
    act_i[j, I_SRC, s] = src
    act_i[j, I_LOCAL, s] = loc


@njit(cache=True, nogil=True)
def _pool_grow(tok_f, tok_i, tok_next, free_list, free_top):
    old = tok_f.shape[0]
    cap = 2 * old
    tok_f = _grow_rows(tok_f, cap)
    tok_i = _grow_rows(tok_i, cap)
    tok_next = _grow_vec(tok_next, cap)
    free_list = _grow_vec(free_list, cap)
    for s in range(cap - 1, old - 1, -1):
        free_list[free_top] = s
        free_top += 1
    return tok_f, tok_i, tok_next, free_list, free_top


@njit(cache=True, nogil=True)
def _propagate(tok_f, tok_i, t_src, jn, ann_lo, R, hi, cur_begin, cur_end):
    """Range of a begin token in annulus ``jn``; returns (begin, end, ok)."""
    w = angular_deviation(tok_f[t_src, F_R], ann_lo[jn], R)
    c = tok_f[t_src, F_CENTER]
    b = max(c - w, tok_f[t_src, F_CLO], cur_begin)
    e = min(c + w, tok_f[t_src, F_CHI], cur_end)
    return b, e, b < e and b < hi


@njit(cache=True, nogil=True)
def sweep_window(R, alpha, lo, mid, hi, ann_lo, ann_hi, s_lo, s_hi, cells,
                 loc_n, loc_seed_ang, loc_seed_rad, loc_base,
                 for_n, for_seed_ang, for_seed_rad, for_base, for_a, for_b, for_shift,
                 g_f, g_i, schedule, block, fault_index,
                 v_id, v_r, v_theta, counters, summary):
    """Generator over ``(phase, edges)`` blocks of one window sweep."""
    ks = ann_lo.shape[0]
    cosh_R = math.cosh(R)

    first = np.empty(ks, dtype=np.int64)
    last = np.empty(ks, dtype=np.int64)
    off = np.zeros(ks + 1, dtype=np.int64)
    for j in range(ks):
        first[j] = _cell_of(lo, cells[j])
        last[j] = _cell_of(hi, cells[j]) + 1
        off[j + 1] = off[j] + last[j] - first[j]
    cur = first.copy()
    begin_head = np.full(off[ks], -1, dtype=np.int64)
    node_head = np.full(off[ks], -1, dtype=np.int64)
    cell_begins = np.zeros(off[ks], dtype=np.int64)
    buf_n = np.zeros(ks, dtype=np.int64)

    cap = 1024
    tok_f = np.empty((cap, NF))
    tok_i = np.empty((cap, NI), dtype=np.int64)
    tok_next = np.empty(cap, dtype=np.int64)
    free_list = np.empty(cap, dtype=np.int64)
    free_top = 0
    for s in range(cap - 1, -1, -1):
        free_list[free_top] = s
        free_top += 1

    acap = 64
    act_f = np.empty((ks, NA, acap))
    act_i = np.empty((ks, NI, acap), dtype=np.int64)
    act_n = np.zeros(ks, dtype=np.int64)

    edges = np.empty((max(block, 16) * 2, 2), dtype=np.int64)
    e_n = 0
    comps_total = 0
    local_live = 0
    v_n = 0

    # per-annulus begin streams (0 local, 1 foreign, 2 exhausted) with a
    # one-point lookahead in nb
    sp = np.zeros(ks, dtype=np.int64)
    rem = np.zeros(ks, dtype=np.int64)
    ycur = np.ones(ks)
    nb = np.zeros(ks)
    drawn = np.zeros(ks, dtype=np.int64)
    ang_states = np.empty((ks, 313), dtype=np.uint64)
    rad_states = np.empty((ks, 313), dtype=np.uint64)
    for j in range(ks):
        sp[j] = -1
        while sp[j] < 2:
            sp[j] += 1
            if sp[j] == 0:
                rem[j] = loc_n[j]
                ang_states[j] = mt_new(loc_seed_ang[j])
                rad_states[j] = mt_new(loc_seed_rad[j])
            elif sp[j] == 1:
                rem[j] = for_n[j]
                ang_states[j] = mt_new(for_seed_ang[j])
                rad_states[j] = mt_new(for_seed_rad[j])
            if sp[j] < 2 and rem[j] > 0:
                break
        if sp[j] < 2:
            a0 = lo if sp[j] == 0 else for_a
            b0 = mid if sp[j] == 0 else for_b
            ycur[j] = sorted_step(ang_states[j], 1.0, rem[j])
            nb[j] = sorted_value(a0, b0, ycur[j])
            rem[j] -= 1

    # global pieces start in the lowest streaming annulus
    for q in range(g_f.shape[0]):
        if ks == 0:
            break
        if free_top == 0:
            tok_f, tok_i, tok_next, free_list, free_top = _pool_grow(tok_f, tok_i, tok_next, free_list, free_top)
        free_top -= 1
        t = free_list[free_top]
        tok_f[t] = g_f[q]
        tok_i[t] = g_i[q]
        slot = off[0] + _cell_of(tok_f[t, F_BEGIN], cells[0]) - first[0]
        tok_next[t] = begin_head[slot]
        begin_head[slot] = t
        cell_begins[slot] += 1
        buf_n[0] += 1
        local_live += tok_i[t, I_LOCAL]
    if ks > 0 and buf_n[0] > counters[0, C_MAX_BUFFER]:
        counters[0, C_MAX_BUFFER] = buf_n[0]

    phase = PHASE_STREAMING
    stop = False
    while not stop:
        # Angular schedule: advance the eligible annulus whose next cell ends
        # first, lower annuli winning ties. Eligible means the annulus below
        # has finished every cell overlapping this one.
        pick = -1
        if schedule == SCHEDULE_ANGULAR:
            for j in range(ks):
                if cur[j] >= last[j]:
                    continue
                if j > 0 and cur[j - 1] < last[j - 1] and (cur[j] + 1) * cells[j - 1] > cur[j - 1] * cells[j]:
                    continue
                if pick < 0 or (cur[j] + 1) * cells[pick] < (cur[pick] + 1) * cells[j]:
                    pick = j
        for j in range(ks):
            if schedule == SCHEDULE_ANGULAR and j != pick:
                continue
            while cur[j] < last[j]:
                g = cur[j]
                if j > 0 and cur[j - 1] < last[j - 1]:
                    if (g + 1) * cells[j - 1] > cur[j - 1] * cells[j]:
                        break
                c = cells[j]
                slot = off[j] + g - first[j]
                if cell_begins[slot] > counters[j, C_MAX_CELL_BEGINS]:
                    counters[j, C_MAX_CELL_BEGINS] = cell_begins[slot]
                counters[j, C_CELLS] += 1

                act_n[j], gone = process_end(act_f, act_i, j, act_n[j], g, c)
                local_live -= gone

                # begin tokens handed up from the annulus below
                t = begin_head[slot]
                begin_head[slot] = -1
                while t != -1:
                    nxt = tok_next[t]
                    buf_n[j] -= 1
                    if act_n[j] == act_f.shape[2]:
                        acap = 2 * act_f.shape[2]
                        act_f = _grow_active(act_f, acap)
                        act_i = _grow_active(act_i, acap)
                    _activate(act_f, act_i, j, act_n[j], tok_f[t, F_COTH], tok_f[t, F_ISINH],
                              tok_f[t, F_COS], tok_f[t, F_SIN], tok_f[t, F_CENTER],
                              tok_f[t, F_BEGIN], tok_f[t, F_END],
                              tok_i[t, I_ID], tok_i[t, I_SRC], tok_i[t, I_LOCAL])
                    act_n[j] += 1
                    local_live += tok_i[t, I_LOCAL]
                    moved = False
                    if j + 1 < ks:
                        b, e, ok = _propagate(tok_f, tok_i, t, j + 1, ann_lo, R, hi,
                                              tok_f[t, F_BEGIN], tok_f[t, F_END])
                        if ok:
                            tok_f[t, F_BEGIN] = b
                            tok_f[t, F_END] = e
                            s2 = off[j + 1] + _cell_of(b, cells[j + 1]) - first[j + 1]
                            if _cell_of(b, cells[j + 1]) < cur[j + 1]:
                                raise SweepError("begin token behind the sweep line")
                            tok_next[t] = begin_head[s2]
                            begin_head[s2] = t
                            cell_begins[s2] += 1
                            buf_n[j + 1] += 1
                            if buf_n[j + 1] > counters[j + 1, C_MAX_BUFFER]:
                                counters[j + 1, C_MAX_BUFFER] = buf_n[j + 1]
                            moved = True
                        elif tok_i[t, I_LOCAL] == 1 and b < e:
                            raise SweepError("local request escaped its window")
                    if not moved:
                        local_live -= tok_i[t, I_LOCAL]
                        free_list[free_top] = t
                        free_top += 1
                    t = nxt

                # points whose begin angle falls into this cell
                while sp[j] < 2:
                    shift = 0.0 if sp[j] == 0 else for_shift
                    beta = nb[j]
                    if _cell_of(beta + shift, c) > g:
                        break
                    loc = 1 if sp[j] == 0 else 0
                    r = annulus_radius(mt_random_open(rad_states[j]), s_lo[j], s_hi[j], alpha, ann_lo[j], ann_hi[j])
                    w = angular_deviation(r, ann_lo[j], R)
                    if loc == 1:
                        rid = loc_base[j] + drawn[j]
                        counters[j, C_LOCAL_DRAWS] += 1
                    else:
                        rid = for_base[j] + drawn[j]
                        counters[j, C_FOREIGN_DRAWS] += 1
                    drawn[j] += 1
                    theta = beta + w
                    if theta >= TWO_PI:
                        theta -= TWO_PI
                    u = beta + shift + w
                    sh = math.sinh(r)
                    coth = math.cosh(r) / sh
                    isinh = 1.0 / sh
                    cs = math.cos(theta)
                    sn = math.sin(theta)
                    if loc == 1 and v_id.shape[0] > 0:
                        v_id[v_n] = rid
                        v_r[v_n] = r
                        v_theta[v_n] = theta
                        v_n += 1
                    bs = beta + shift
                    end = bs + 2.0 * w
                    if end > hi:
                        if loc == 1 and end > hi + _LOCAL_SLACK:
                            raise SweepError("local request escaped its window")
                        end = hi
                    # own request: active now, and handed to the next annulus
                    if act_n[j] == act_f.shape[2]:
                        acap = 2 * act_f.shape[2]
                        act_f = _grow_active(act_f, acap)
                        act_i = _grow_active(act_i, acap)
                    _activate(act_f, act_i, j, act_n[j], coth, isinh, cs, sn, u, bs, end, rid, j, loc)
                    act_n[j] += 1
                    local_live += loc
                    if free_top < 2:
                        tok_f, tok_i, tok_next, free_list, free_top = _pool_grow(tok_f, tok_i, tok_next, free_list, free_top)
                    if j + 1 < ks:
                        free_top -= 1
                        t = free_list[free_top]
                        tok_f[t, F_COTH] = coth
                        tok_f[t, F_ISINH] = isinh
                        tok_f[t, F_COS] = cs
                        tok_f[t, F_SIN] = sn
                        tok_f[t, F_CENTER] = u
                        tok_f[t, F_CLO] = lo
                        tok_f[t, F_CHI] = hi
                        tok_f[t, F_R] = r
                        tok_i[t, I_ID] = rid
                        tok_i[t, I_SRC] = j
                        tok_i[t, I_LOCAL] = loc
                        b, e, ok = _propagate(tok_f, tok_i, t, j + 1, ann_lo, R, hi, bs, end)
                        if ok:
                            tok_f[t, F_BEGIN] = b
                            tok_f[t, F_END] = e
                            s2 = off[j + 1] + _cell_of(b, cells[j + 1]) - first[j + 1]
                            tok_next[t] = begin_head[s2]
                            begin_head[s2] = t
                            cell_begins[s2] += 1
                            buf_n[j + 1] += 1
                            if buf_n[j + 1] > counters[j + 1, C_MAX_BUFFER]:
                                counters[j + 1, C_MAX_BUFFER] = buf_n[j + 1]
                            local_live += loc
                        else:
                            free_list[free_top] = t
                            free_top += 1
                    # node token, possibly in a later cell
                    if u < hi:
                        free_top -= 1
                        t = free_list[free_top]
                        tok_f[t, F_COTH] = coth
                        tok_f[t, F_ISINH] = isinh
                        tok_f[t, F_COS] = cs
                        tok_f[t, F_SIN] = sn
                        tok_f[t, F_CENTER] = u
                        tok_i[t, I_ID] = rid
                        tok_i[t, I_SRC] = j
                        tok_i[t, I_LOCAL] = loc
                        s2 = off[j] + _cell_of(u, c) - first[j]
                        tok_next[t] = node_head[s2]
                        node_head[s2] = t
                        local_live += loc
                    elif loc == 1:
                        raise SweepError("local node escaped its window")

                    # refill the lookahead, switching to the replica stream
                    if rem[j] == 0:
                        drawn[j] = 0
                        while sp[j] < 2:
                            sp[j] += 1
                            if sp[j] == 1:
                                rem[j] = for_n[j]
                                ang_states[j] = mt_new(for_seed_ang[j])
                                rad_states[j] = mt_new(for_seed_rad[j])
                                ycur[j] = 1.0
                                if rem[j] > 0:
                                    break
                    if sp[j] < 2:
                        a0 = lo if sp[j] == 0 else for_a
                        b0 = mid if sp[j] == 0 else for_b
                        ycur[j] = sorted_step(ang_states[j], ycur[j], rem[j])
                        nb[j] = sorted_value(a0, b0, ycur[j])
                        rem[j] -= 1

                if act_n[j] > counters[j, C_MAX_ACTIVE]:
                    counters[j, C_MAX_ACTIVE] = act_n[j]

                # node tokens of this cell
                t = node_head[slot]
                node_head[slot] = -1
                while t != -1:
                    nxt = tok_next[t]
                    if e_n + act_n[j] > edges.shape[0]:
                        edges = _grow_rows(edges, 2 * (e_n + act_n[j]))
                    before = e_n
                    e_n, nc = process_node(act_f, act_i, j, act_n[j], tok_i[t, I_ID], tok_i[t, I_LOCAL],
                                           tok_f[t, F_CENTER], tok_f[t, F_COS], tok_f[t, F_SIN],
                                           tok_f[t, F_COTH], tok_f[t, F_ISINH], cosh_R,
                                           edges, e_n, comps_total, fault_index)
                    comps_total += nc
                    counters[j, C_COMPS] += nc
                    counters[j, C_EDGES] += e_n - before
                    if phase == PHASE_FINAL:
                        counters[j, C_FINAL_COMPS] += nc
                        counters[j, C_FINAL_EDGES] += e_n - before
                        summary[S_FINAL_NODES] += 1
                    local_live -= tok_i[t, I_LOCAL]
                    free_list[free_top] = t
                    free_top += 1
                    t = nxt

                cur[j] += 1
                if e_n >= block:
                    yield phase, edges[:e_n].copy()
                    e_n = 0
                if schedule == SCHEDULE_ANGULAR:
                    break

        done = True
        main_done = True
        for j in range(ks):
            if cur[j] < last[j]:
                done = False
            if sp[j] == 0 or (cur[j] < last[j] and cur[j] * TWO_PI / cells[j] < mid):
                main_done = False
        if phase == PHASE_STREAMING and main_done:
            if e_n > 0:
                yield phase, edges[:e_n].copy()
                e_n = 0
            phase = PHASE_FINAL
        if phase == PHASE_FINAL and local_live == 0 and not done:
            summary[S_EARLY_STOP] = 1
            done = True
        stop = done

    if e_n > 0:
        yield phase, edges[:e_n].copy()
    summary[S_LOCAL_LEFT] = local_live
    summary[S_VERTICES] = v_n


def run_annuli_interleaved(window: SweepWindow, *, schedule: int = SCHEDULE_ANGULAR,
                           block: int = 1 << 16, fault_index: int = -1,
                           record_vertices: bool = False) -> "WindowRun":
    """Prepare the sweep of one window; iterate the result for edge blocks."""
    return WindowRun(window, schedule, block, fault_index, record_vertices)


class WindowRun:
    """Drives :func:`sweep_window` and exposes counters and recorded vertices."""

    def __init__(self, window: SweepWindow, schedule: int, block: int,
                 fault_index: int, record_vertices: bool):
        self.window = window
        ks = window.n_annuli
        self.counters = np.zeros((ks, N_COUNTERS), dtype=np.int64)
        self.summary = np.zeros(N_SUMMARY, dtype=np.int64)
        nv = window.n_local if record_vertices else 0
        self.v_id = np.empty(nv, dtype=np.int64)
        self.v_r = np.empty(nv)
        self.v_theta = np.empty(nv)
        w = window
        self._gen = sweep_window(
            w.R, w.alpha, w.lo, w.mid, w.hi, w.ann_lo, w.ann_hi, w.s_lo, w.s_hi, w.cells,
            w.loc_n, w.loc_seed_ang, w.loc_seed_rad, w.loc_base,
            w.for_n, w.for_seed_ang, w.for_seed_rad, w.for_base, w.for_a, w.for_b, w.for_shift,
            w.g_f, w.g_i, schedule, block, fault_index,
            self.v_id, self.v_r, self.v_theta, self.counters, self.summary)
        self._pending: tuple[int, np.ndarray] | None = None
        self.finished = False

    def __iter__(self) -> Iterator[tuple[int, np.ndarray]]:
        if self._pending is not None:
            item, self._pending = self._pending, None
            yield item
        if self.window.n_annuli == 0:
            self.finished = True
            return
        for item in self._gen:
            yield item
        self.finished = True

    def blocks(self, phase: int) -> Iterator[np.ndarray]:
        """Edge blocks of one phase; stops at the first block of a later phase."""
        for ph, edges in self:
            if ph > phase:
                self._pending = (ph, edges)
                return
            yield edges

