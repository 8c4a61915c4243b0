"""Run statistics: fingerprints, degrees, tail exponent, approximation checks."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable

import numpy as np

from .geometry import ModelParams, angular_deviation, radial_cdf
from .parallel import GenerationResult
from .sinks import DegreeSink, FingerprintSink


def _blocks(edges) -> Iterable[np.ndarray]:
    if isinstance(edges, np.ndarray):
        yield edges.reshape(-1, 2)
        return
    for block in edges:
        yield np.asarray(block, dtype=np.int64).reshape(-1, 2)


def fingerprint(edges) -> int:
    """Order-independent wrapping 64-bit sum of all endpoint ids.

    ``edges`` is an ``(m, 2)`` array or an iterable of blocks or pairs.
    """
    sink = FingerprintSink()
    for block in _blocks(edges):
        sink.push(block)
    return sink.value


def degree_histogram(edges, n: int) -> np.ndarray:
    """``hist[d]`` = number of vertices with degree ``d``."""
    sink = DegreeSink(n)
    for block in _blocks(edges):
        sink.push(block)
    return np.bincount(sink.degrees)


def powerlaw_mle(degrees: np.ndarray, d_min: float) -> float:
    """Continuous tail MLE with the usual half-unit discreteness shift."""
    tail = np.asarray(degrees, dtype=np.float64)
    tail = tail[tail >= d_min]
    if len(tail) < 100:
        raise ValueError(f"only {len(tail)} degrees >= d_min={d_min}; need at least 100")
    return 1.0 + len(tail) / float(np.log(tail / (d_min - 0.5)).sum())


def default_dmin(avg_degree: float) -> float:
    return max(10.0, avg_degree)


@dataclass
class ApproxRow:
    gap: float  # R - r - b
    r: float
    b: float
    dtheta_exact: float
    dtheta_approx: float
    dtheta_rel_err: float


@dataclass
class ApproxReport:
    dtheta: list[ApproxRow]
    cdf: list[tuple[float, float, float, float]]  # (r, exact, approx, rel_err)

    @property
    def dtheta_error_decreasing(self) -> bool:
        errs = [row.dtheta_rel_err for row in sorted(self.dtheta, key=lambda x: x.gap)]
        return all(a >= b for a, b in zip(errs, errs[1:]))


def approximation_cross_checks(params: ModelParams, gaps=(1.0, 2.0, 4.0, 6.0, 8.0, 10.0)) -> ApproxReport:
    """Exact formulas against their leading-order exponential forms.

    ``gap`` is ``r + b - R``; both radii are placed symmetrically.
    """
    R, alpha = params.R, params.alpha
    rows = []
    for gap in gaps:
        r = b = (R + gap) / 2.0
        ex = angular_deviation(r, b, R)
        ap = 2.0 * math.exp((R - r - b) / 2.0)
        rows.append(ApproxRow(gap, r, b, ex, ap, abs(ex / ap - 1.0)))
    cdf = []
    for r in np.linspace(R / 2.0, R, 9):
        ex = radial_cdf(float(r), alpha, R)
        ap = math.exp(alpha * (r - R))
        cdf.append((float(r), ex, ap, abs(ex / ap - 1.0)))
    return ApproxReport(rows, cdf)


CSV_FIELDS = ("n", "alpha", "gamma", "C", "R", "P", "workers", "seed", "m", "avg_degree",
              "expected_avg_degree", "gamma_hat", "d_min", "distance_computations",
              "overestimation_ratio", "global_vertices", "fingerprint", "seconds", "edges_per_sec")


@dataclass
class RunReport:
    n: int
    alpha: float
    gamma: float
    C: float
    R: float
    P: int
    workers: int
    seed: int
    m: int
    avg_degree: float
    expected_avg_degree: float
    gamma_hat: float
    d_min: float
    distance_computations: int
    overestimation_ratio: float
    global_vertices: int
    fingerprint: int
    seconds: float
    edges_per_sec: float
    per_annulus: list[dict] = field(default_factory=list)
    per_worker: list[dict] = field(default_factory=list)

    def to_text(self) -> str:
        lines = [f"{k}={getattr(self, k)}" for k in CSV_FIELDS]
        for row in self.per_annulus:
            lines.extend(f"annulus.{row['annulus']}.{k}={v}" for k, v in row.items() if k != "annulus")
        for row in self.per_worker:
            lines.extend(f"worker.{row['worker']}.{k}={v}" for k, v in row.items() if k != "worker")
        return "\n".join(lines) + "\n"

    def csv_row(self) -> dict:
        d = asdict(self)
        return {k: d[k] for k in CSV_FIELDS}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerow(self.csv_row())
        return buf.getvalue()

    def annulus_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=ANNULUS_FIELDS, lineterminator="\n")
        w.writeheader()
        for row in self.per_annulus:
            w.writerow(row)
        return buf.getvalue()


ANNULUS_FIELDS = ("annulus", "lower", "upper", "kind", "vertices", "distance_computations", "edges",
                  "overestimation_ratio")


def build_report(params: ModelParams, result: GenerationResult, fp: int,
                 degrees: np.ndarray | None = None, d_min: float | None = None) -> RunReport:
    m = result.edges
    layout = result.layout
    d_min = default_dmin(params.expected_avg_degree) if d_min is None else d_min
    gamma_hat = float("nan")
    if degrees is not None:
        try:
            gamma_hat = powerlaw_mle(degrees, d_min)
        except ValueError:
            pass
    comps = result.distance_computations
    s0 = result.streaming_start
    per_annulus = []
    a_comps, a_edges = result.per_annulus() if result.chunks else ([], [])
    for i in range(layout.k):
        row = dict(annulus=i, lower=float(layout.boundaries[i]), upper=float(layout.boundaries[i + 1]),
                   kind=layout.classes.kinds[i].name.lower(), vertices=int(layout.counts[i]),
                   distance_computations="", edges="", overestimation_ratio="")
        if i >= s0:
            c, e = int(a_comps[i - s0]), int(a_edges[i - s0])
            row.update(distance_computations=c, edges=e, overestimation_ratio=c / max(e, 1))
        per_annulus.append(row)
    per_worker = []
    for w in range(result.workers):
        chunks = [c for c in result.chunks if c.worker == w]
        per_worker.append(dict(worker=w, chunks=len(chunks),
                               streaming_vertices=sum(c.streaming_vertices for c in chunks),
                               distance_computations=sum(c.distance_computations for c in chunks),
                               edges=sum(c.edges for c in chunks),
                               seconds=round(sum(c.seconds for c in chunks), 6)))
    secs = result.seconds
    return RunReport(
        n=params.n, alpha=params.alpha, gamma=params.gamma, C=params.C, R=params.R, P=params.P,
        workers=result.workers, seed=params.seed, m=m, avg_degree=2.0 * m / params.n,
        expected_avg_degree=params.expected_avg_degree, gamma_hat=gamma_hat, d_min=d_min,
        distance_computations=comps, overestimation_ratio=comps / max(m, 1),
        global_vertices=result.global_points, fingerprint=fp, seconds=round(secs, 6),
        edges_per_sec=m / secs if secs > 0 else float("inf"),
        per_annulus=per_annulus, per_worker=per_worker)
