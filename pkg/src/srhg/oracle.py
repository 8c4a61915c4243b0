"""Brute-force reference: all-pairs distances and an exact edge-set diff."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import ModelParams
from .parallel import generate

ORACLE_MAX_N = 100_000
BAND_REL = 1e-9


@dataclass
class PointTrace:
    ids: np.ndarray
    r: np.ndarray
    theta: np.ndarray

    def __len__(self) -> int:
        return len(self.ids)


class _Collector:
    def __init__(self):
        self.parts = []

    def push_vertices(self, ids, r, theta) -> None:
        self.parts.append((np.array(ids), np.array(r), np.array(theta)))


def materialize_points(params: ModelParams, P: int | None = None, **kwargs) -> PointTrace:
    """All vertex positions exactly as the generator places them, in id order."""
    if P is not None and P != params.P:
        params = ModelParams(params.n, params.alpha, params.C, params.seed, P)
    col = _Collector()
    generate(params, vertex_sink=col, **kwargs)
    ids = np.concatenate([p[0] for p in col.parts]) if col.parts else np.empty(0, dtype=np.int64)
    r = np.concatenate([p[1] for p in col.parts]) if col.parts else np.empty(0)
    th = np.concatenate([p[2] for p in col.parts]) if col.parts else np.empty(0)
    order = np.argsort(ids, kind="stable")
    return PointTrace(ids[order], r[order], th[order])


def pair_distances(r1, t1, r2, t2) -> np.ndarray:
    """Direct distance with the acosh argument as a sum of nonnegative terms."""
    h = np.sin((t1 - t2) / 2.0)
    arg = np.cosh(r1 - r2) + 2.0 * np.sinh(r1) * np.sinh(r2) * h * h
    return np.arccosh(np.maximum(arg, 1.0))


def naive_edges(trace: PointTrace, R: float, block: int = 512) -> np.ndarray:
    """All pairs closer than ``R`` as a sorted ``(m, 2)`` array of ids."""
    n = len(trace)
    if n > ORACLE_MAX_N:
        raise ValueError(f"oracle refuses n={n} (limit {ORACLE_MAX_N})")
    out = []
    for s in range(0, n, block):
        e = min(n, s + block)
        d = pair_distances(trace.r[s:e, None], trace.theta[s:e, None], trace.r[None, :], trace.theta[None, :])
        ii, jj = np.nonzero(d < R)
        keep = jj > ii + s
        ii, jj = ii[keep] + s, jj[keep]
        out.append(np.stack([trace.ids[ii], trace.ids[jj]], axis=1))
    if not out:
        return np.empty((0, 2), dtype=np.int64)
    edges = np.concatenate(out)
    edges = np.sort(edges, axis=1)
    return edges[np.lexsort((edges[:, 1], edges[:, 0]))]


@dataclass
class CompareReport:
    missing: list[tuple[int, int]] = field(default_factory=list)
    extra: list[tuple[int, int]] = field(default_factory=list)
    duplicates: int = 0
    band_missing: list[tuple[int, int]] = field(default_factory=list)
    band_extra: list[tuple[int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.missing and not self.extra and self.duplicates == 0

    def summary(self) -> str:
        return (f"missing={len(self.missing)} extra={len(self.extra)} duplicates={self.duplicates} "
                f"band_missing={len(self.band_missing)} band_extra={len(self.band_extra)}")


def compare(generated: np.ndarray, oracle: np.ndarray, trace: PointTrace | None = None,
            R: float | None = None) -> CompareReport:
    """Set difference of two edge lists plus a duplicate count.

    With ``trace`` and ``R`` given, disagreements whose distance lies within
    ``1e-9 * R`` of the threshold are reported as band entries and do not
    fail the comparison.
    """
    g = np.asarray(generated, dtype=np.int64).reshape(-1, 2)
    o = np.asarray(oracle, dtype=np.int64).reshape(-1, 2)
    g = np.sort(g, axis=1)
    o = np.sort(o, axis=1)
    gu, gcount = np.unique(g, axis=0, return_counts=True) if len(g) else (g, np.empty(0, dtype=np.int64))
    ou = np.unique(o, axis=0) if len(o) else o
    rep = CompareReport(duplicates=int((gcount - 1).sum()) if len(gcount) else 0)
    gs = {tuple(x) for x in gu.tolist()}
    os_ = {tuple(x) for x in ou.tolist()}
    missing = sorted(os_ - gs)
    extra = sorted(gs - os_)
    if trace is None or R is None:
        rep.missing, rep.extra = missing, extra
        return rep
    pos = {int(i): k for k, i in enumerate(trace.ids.tolist())}

    def in_band(pair) -> bool:
        a, b = pos[pair[0]], pos[pair[1]]
        d = float(pair_distances(trace.r[a], trace.theta[a], trace.r[b], trace.theta[b]))
        return abs(d - R) < BAND_REL * R

    for pair in missing:
        (rep.band_missing if in_band(pair) else rep.missing).append(pair)
    for pair in extra:
        (rep.band_extra if in_band(pair) else rep.extra).append(pair)
    return rep
