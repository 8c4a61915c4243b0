"""Chunk-parallel orchestration: global phase, streaming phase, final phase.

Chunk ``c`` owns the angular sector ``[2 pi c / P, 2 pi (c+1) / P)``. All
points of global annuli are regenerated by every chunk task; edges among
them are emitted by chunk 0 only. Streaming annuli are swept per chunk,
continuing into a replica of the following chunk until every Local request
and node is settled.

Chunks are independent, so the number of worker threads never changes the
output: results are always handed to the sink in chunk order.
"""

from __future__ import annotations

import hashlib
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Protocol

import numpy as np
from numba import njit

from .geometry import TWO_PI, ModelParams, adjacent_fields, angular_deviation
from .partition import (DEFAULT_CELL_TARGET, AnnulusKind, AnnulusLayout,
                        build_layout, chunk_interval)
from .rng import SeedPath, draw_sorted_points
from .sweep import (C_COMPS, C_EDGES, C_LOCAL_DRAWS, F_R, NF, NI, PHASE_FINAL,
                    PHASE_STREAMING, SCHEDULE_ANGULAR, SweepWindow, WindowRun,
                    clip_request, run_annuli_interleaved)


class EdgeSink(Protocol):
    def push(self, edges: np.ndarray) -> None:
        """Receive an ``(k, 2)`` int64 block of canonical pairs ``u < v``."""


class VertexSink(Protocol):
    def push_vertices(self, ids: np.ndarray, r: np.ndarray, theta: np.ndarray) -> None: ...


@dataclass(frozen=True)
class WorkerPlan:
    P: int
    pe_id: int
    replication_depth: int = 1

    def __post_init__(self) -> None:
        if not 0 <= self.pe_id < self.P:
            raise ValueError("pe_id out of range")
        if self.replication_depth != 1:
            raise ValueError("only a replication depth of one chunk is supported")

    @property
    def owned_interval(self) -> tuple[float, float]:
        return chunk_interval(self.pe_id, self.P)

    @property
    def replica_chunk(self) -> int:
        return (self.pe_id + 1) % self.P

    @property
    def replica_shift(self) -> float:
        return TWO_PI if self.pe_id + 1 == self.P else 0.0

    @property
    def replica_interval(self) -> tuple[float, float]:
        a, b = chunk_interval(self.replica_chunk, self.P)
        return a + self.replica_shift, b + self.replica_shift


@dataclass
class GlobalPoints:
    ids: np.ndarray
    r: np.ndarray
    theta: np.ndarray
    annulus: np.ndarray

    def __len__(self) -> int:
        return len(self.ids)

    def position_hash(self) -> int:
        """Stable 64-bit digest of ids and coordinates."""
        h = hashlib.sha256()
        for a in (self.ids, self.r, self.theta):
            h.update(np.ascontiguousarray(a).tobytes())
        return int.from_bytes(h.digest()[:8], "little")


def _seed(root: SeedPath, tag: str, annulus: int, chunk: int) -> np.uint64:
    return np.uint64(root.child(tag, annulus, chunk).seed)


def generate_global_points(layout: AnnulusLayout) -> GlobalPoints:
    params = layout.params
    root = SeedPath(params.seed)
    s0 = layout.classes.streaming_start
    S = layout.sinh_half_sq
    ids, rs, ths, ann = [], [], [], []
    for i in range(s0):
        for c in range(params.P):
            cnt = int(layout.chunk_counts[i, c])
            if cnt == 0:
                continue
            a, b = chunk_interval(c, params.P)
            th, r = draw_sorted_points(_seed(root, "begin", i, c), _seed(root, "radius", i, c), cnt,
                                       a, b, S[i], S[i + 1], params.alpha,
                                       layout.boundaries[i], layout.boundaries[i + 1])
            ids.append(layout.id_base[i, c] + np.arange(cnt, dtype=np.int64))
            rs.append(r)
            ths.append(th)
            ann.append(np.full(cnt, i, dtype=np.int64))
    if not ids:
        e = np.empty(0)
        return GlobalPoints(np.empty(0, dtype=np.int64), e, e.copy(), np.empty(0, dtype=np.int64))
    return GlobalPoints(np.concatenate(ids), np.concatenate(rs), np.concatenate(ths), np.concatenate(ann))


@njit(cache=True, nogil=True)
def _all_pairs(ids, r, theta, cosh_R, fault_index):
    m = ids.shape[0]
    coth = np.empty(m)
    isinh = np.empty(m)
    cs = np.empty(m)
    sn = np.empty(m)
    for i in range(m):
        sh = math.sinh(r[i])
        coth[i] = math.cosh(r[i]) / sh
        isinh[i] = 1.0 / sh
        cs[i] = math.cos(theta[i])
        sn[i] = math.sin(theta[i])
    cap = 16
    out = np.empty((cap, 2), dtype=np.int64)
    k = 0
    comps = 0
    for i in range(m):
        for j in range(i + 1, m):
            adj = adjacent_fields(cs[i], sn[i], coth[i], isinh[i], cs[j], sn[j], coth[j], isinh[j], cosh_R)
            if comps == fault_index:
                adj = not adj
            comps += 1
            if adj:
                if k == cap:
                    cap *= 2
                    grown = np.empty((cap, 2), dtype=np.int64)
                    grown[:k] = out[:k]
                    out = grown
                a, b = ids[i], ids[j]
                out[k, 0] = min(a, b)
                out[k, 1] = max(a, b)
                k += 1
    return out[:k].copy(), comps


def global_request_pieces(layout: AnnulusLayout, pts: GlobalPoints, plan: WorkerPlan) -> tuple[np.ndarray, np.ndarray]:
    """Clip every global point's request in the lowest streaming annulus.

    Pieces inside the owned sector are Local, pieces inside the replica
    sector are Foreign.
    """
    s0 = layout.classes.streaming_start
    R = layout.params.R
    if s0 >= layout.k or len(pts) == 0:
        return np.empty((0, NF)), np.empty((0, NI), dtype=np.int64)
    ell = float(layout.boundaries[s0])
    arcs = ((*plan.owned_interval, 1), (*plan.replica_interval, 0))
    rows_f, rows_i = [], []
    for pid, r, th in zip(pts.ids.tolist(), pts.r.tolist(), pts.theta.tolist()):
        w = angular_deviation(r, ell, R)
        sh = math.sinh(r)
        coth, isinh, cs, sn = math.cosh(r) / sh, 1.0 / sh, math.cos(th), math.sin(th)
        for a, b, loc in arcs:
            for c, pb, pe in clip_request(th, w, a, b):
                rows_f.append((coth, isinh, cs, sn, c, pb, pe, pb, pe, r))
                rows_i.append((pid, -1, loc))
    if not rows_f:
        return np.empty((0, NF)), np.empty((0, NI), dtype=np.int64)
    g_f = np.array(rows_f, dtype=np.float64)
    g_i = np.array(rows_i, dtype=np.int64)
    assert g_f.shape[1] == NF and F_R == NF - 1
    return g_f, g_i


def build_window(layout: AnnulusLayout, plan: WorkerPlan, g_f: np.ndarray, g_i: np.ndarray) -> SweepWindow:
    params = layout.params
    root = SeedPath(params.seed)
    s0 = layout.classes.streaming_start
    idx = range(s0, layout.k)
    c, c2 = plan.pe_id, plan.replica_chunk
    lo, mid = plan.owned_interval
    ra, rb = chunk_interval(c2, params.P)
    S = layout.sinh_half_sq
    u64 = np.uint64
    return SweepWindow(
        R=params.R, alpha=params.alpha, lo=lo, mid=mid, hi=mid + (rb - ra),
        ann_lo=layout.boundaries[s0:-1].copy(), ann_hi=layout.boundaries[s0 + 1:].copy(),
        s_lo=S[s0:-1].copy(), s_hi=S[s0 + 1:].copy(),
        cells=layout.cell_counts[s0:].astype(np.int64),
        loc_n=layout.chunk_counts[s0:, c].astype(np.int64),
        loc_seed_ang=np.array([_seed(root, "begin", i, c) for i in idx], dtype=u64),
        loc_seed_rad=np.array([_seed(root, "radius", i, c) for i in idx], dtype=u64),
        loc_base=layout.id_base[s0:, c].astype(np.int64),
        for_n=layout.chunk_counts[s0:, c2].astype(np.int64),
        for_seed_ang=np.array([_seed(root, "begin", i, c2) for i in idx], dtype=u64),
        for_seed_rad=np.array([_seed(root, "radius", i, c2) for i in idx], dtype=u64),
        for_base=layout.id_base[s0:, c2].astype(np.int64),
        for_a=ra, for_b=rb, for_shift=plan.replica_shift,
        g_f=g_f, g_i=g_i,
    )


@dataclass
class ChunkReport:
    chunk: int
    worker: int
    global_points: int = 0
    global_comps: int = 0
    global_edges: int = 0
    streaming_vertices: int = 0
    counters: np.ndarray | None = None
    summary: np.ndarray | None = None
    edges: int = 0
    seconds: float = 0.0

    @property
    def distance_computations(self) -> int:
        streaming = int(self.counters[:, C_COMPS].sum()) if self.counters is not None else 0
        return streaming + self.global_comps


class ChunkSweep:
    """State of one chunk task across its three phases."""

    def __init__(self, layout: AnnulusLayout, plan: WorkerPlan, *, schedule: int = SCHEDULE_ANGULAR,
                 fault_index: int = -1, record_vertices: bool = False, block: int = 1 << 16):
        self.layout = layout
        self.plan = plan
        self.schedule = schedule
        self.fault_index = fault_index
        self.record_vertices = record_vertices
        self.block = block
        self.report = ChunkReport(chunk=plan.pe_id, worker=plan.pe_id)
        self.global_points: GlobalPoints | None = None
        self.run: WindowRun | None = None


def run_global_phase(sweep: ChunkSweep, sink: EdgeSink, vertex_sink: VertexSink | None = None) -> None:
    layout, plan = sweep.layout, sweep.plan
    pts = generate_global_points(layout)
    sweep.global_points = pts
    sweep.report.global_points = len(pts)
    if plan.pe_id == 0 and len(pts) > 0:
        edges, comps = _all_pairs(pts.ids, pts.r, pts.theta, math.cosh(layout.params.R), sweep.fault_index)
        sweep.report.global_comps = comps
        sweep.report.global_edges = len(edges)
        if len(edges):
            sink.push(edges)
        if vertex_sink is not None:
            vertex_sink.push_vertices(pts.ids, pts.r, pts.theta)
    g_f, g_i = global_request_pieces(layout, pts, plan)
    window = build_window(layout, plan, g_f, g_i)
    # the global phase on chunk 0 already used up comparison indices
    fault = sweep.fault_index
    if fault >= 0 and plan.pe_id == 0:
        fault -= sweep.report.global_comps
    elif plan.pe_id != 0:
        fault = -1
    sweep.run = run_annuli_interleaved(window, schedule=sweep.schedule, block=sweep.block,
                                       fault_index=fault, record_vertices=sweep.record_vertices)


def _drain(sweep: ChunkSweep, phase: int, sink: EdgeSink) -> None:
    for edges in sweep.run.blocks(phase):
        sweep.report.edges += len(edges)
        sink.push(edges)


def run_streaming_phase(sweep: ChunkSweep, sink: EdgeSink) -> None:
    _drain(sweep, PHASE_STREAMING, sink)


def run_final_phase(sweep: ChunkSweep, sink: EdgeSink, vertex_sink: VertexSink | None = None) -> None:
    _drain(sweep, PHASE_FINAL, sink)
    run = sweep.run
    sweep.report.counters = run.counters
    sweep.report.summary = run.summary
    sweep.report.streaming_vertices = int(run.counters[:, C_LOCAL_DRAWS].sum())
    sweep.report.edges += sweep.report.global_edges
    if vertex_sink is not None and len(run.v_id):
        vertex_sink.push_vertices(run.v_id, run.v_r, run.v_theta)


class _Buffer:
    def __init__(self):
        self.blocks: list[np.ndarray] = []
        self.vertices: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []

    def push(self, edges: np.ndarray) -> None:
        self.blocks.append(edges)

    def push_vertices(self, ids, r, theta) -> None:
        self.vertices.append((ids, r, theta))


def run_chunk(layout: AnnulusLayout, chunk: int, sink: EdgeSink, vertex_sink: VertexSink | None = None,
              *, worker: int = 0, **options) -> ChunkReport:
    t0 = time.perf_counter()
    sweep = ChunkSweep(layout, WorkerPlan(layout.params.P, chunk),
                       record_vertices=vertex_sink is not None, **options)
    sweep.report.worker = worker
    run_global_phase(sweep, sink, vertex_sink)
    run_streaming_phase(sweep, sink)
    run_final_phase(sweep, sink, vertex_sink)
    sweep.report.seconds = time.perf_counter() - t0
    return sweep.report


@dataclass
class GenerationResult:
    layout: AnnulusLayout
    workers: int
    chunks: list[ChunkReport] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def edges(self) -> int:
        return sum(c.edges for c in self.chunks)

    @property
    def distance_computations(self) -> int:
        return sum(c.distance_computations for c in self.chunks)

    @property
    def global_points(self) -> int:
        return self.chunks[0].global_points if self.chunks else 0

    @property
    def streaming_start(self) -> int:
        return self.layout.classes.streaming_start

    def per_annulus(self) -> tuple[np.ndarray, np.ndarray]:
        """(distance computations, edges) per streaming annulus, summed over chunks."""
        comps = sum(c.counters[:, C_COMPS] for c in self.chunks)
        edges = sum(c.counters[:, C_EDGES] for c in self.chunks)
        return np.asarray(comps), np.asarray(edges)

    def per_worker(self, key: str) -> np.ndarray:
        out = np.zeros(self.workers, dtype=np.int64)
        for c in self.chunks:
            out[c.worker] += getattr(c, key)
        return out


class _NullSink:
    def push(self, edges: np.ndarray) -> None:
        pass


def generate(params: ModelParams, *, workers: int = 1, sink: EdgeSink | None = None,
             vertex_sink: VertexSink | None = None, cell_target: int = DEFAULT_CELL_TARGET,
             schedule: int = SCHEDULE_ANGULAR, fault_index: int = -1,
             layout: AnnulusLayout | None = None, block: int = 1 << 16) -> GenerationResult:
    """Generate the graph of ``params`` and stream it into ``sink``.

    Chunk tasks are spread round-robin over ``workers`` threads; the sink
    sees edge blocks in chunk order regardless of the thread count.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    t0 = time.perf_counter()
    sink = sink if sink is not None else _NullSink()
    layout = layout if layout is not None else build_layout(params, cell_target)
    P = params.P
    options = dict(schedule=schedule, block=block)
    result = GenerationResult(layout=layout, workers=workers)

    def fault_for(c: int) -> int:
        return fault_index if c == 0 else -1

    if workers == 1:
        for c in range(P):
            result.chunks.append(run_chunk(layout, c, sink, vertex_sink, worker=0,
                                           fault_index=fault_for(c), **options))
    else:
        def task(c: int) -> tuple[ChunkReport, _Buffer]:
            buf = _Buffer()
            rep = run_chunk(layout, c, buf, buf if vertex_sink is not None else None,
                            worker=c % workers, fault_index=fault_for(c), **options)
            return rep, buf

        with ThreadPoolExecutor(max_workers=workers) as pool:
            for rep, buf in pool.map(task, range(P)):
                for block_ in buf.blocks:
                    sink.push(block_)
                if vertex_sink is not None:
                    for v in buf.vertices:
                        vertex_sink.push_vertices(*v)
                result.chunks.append(rep)
    result.seconds = time.perf_counter() - t0
    return result


def iter_edge_blocks(params: ModelParams, **kwargs) -> Iterable[np.ndarray]:
    """Convenience: collect all edge blocks in chunk order."""
    buf = _Buffer()
    generate(params, sink=buf, **kwargs)
    return buf.blocks


__all__ = [
    "AnnulusKind", "ChunkReport", "ChunkSweep", "EdgeSink", "GenerationResult", "GlobalPoints",
    "VertexSink", "WorkerPlan", "build_window", "generate", "generate_global_points",
    "global_request_pieces", "iter_edge_blocks", "run_chunk", "run_final_phase",
    "run_global_phase", "run_streaming_phase",
]
