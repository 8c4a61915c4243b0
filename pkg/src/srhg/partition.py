"""Decomposition of the disk into annuli, chunks and cells."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import IntEnum

import numpy as np

from .geometry import LN2, TWO_PI, ModelParams, angular_deviation, annulus_mass
from .rng import SeedPath, multinomial_counts, split_count

DEFAULT_CELL_TARGET = 8


class AnnulusKind(IntEnum):
    CLIQUE = 0
    GLOBAL = 1
    STREAMING = 2


@dataclass(frozen=True)
class AnnulusClass:
    kinds: tuple[AnnulusKind, ...]
    r_G: float

    @property
    def streaming_start(self) -> int:
        """Index of the first streaming annulus (``len(kinds)`` if none)."""
        for i, kind in enumerate(self.kinds):
            if kind == AnnulusKind.STREAMING:
                return i
        return len(self.kinds)


@dataclass(frozen=True)
class AnnulusLayout:
    params: ModelParams
    boundaries: np.ndarray
    clique_index: int | None
    probs: np.ndarray
    counts: np.ndarray | None = None
    chunk_counts: np.ndarray | None = None
    cell_counts: np.ndarray | None = None
    classes: AnnulusClass | None = None
    id_base: np.ndarray | None = None

    @property
    def k(self) -> int:
        return len(self.boundaries) - 1

    @property
    def lower(self) -> np.ndarray:
        return self.boundaries[:-1]

    @property
    def upper(self) -> np.ndarray:
        return self.boundaries[1:]

    @property
    def coth_lower(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 1.0 / np.tanh(self.lower)

    @property
    def cosh_R_over_sinh_lower(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return math.cosh(self.params.R) / np.sinh(self.lower)

    @property
    def sinh_half_sq(self) -> np.ndarray:
        """``sinh(alpha*l/2)^2`` for every boundary, used by radius sampling."""
        return np.sinh(self.params.alpha * self.boundaries / 2.0) ** 2


def nominal_annulus_count(alpha: float, R: float) -> int:
    return max(1, math.floor(alpha * R / LN2))


def _merged_boundaries(R: float, k: int) -> tuple[list[float], int | None]:
    ell = [R * j / k for j in range(k)] + [R]
    merged = [j for j in range(1, k + 1) if ell[j] <= R / 2.0]
    if merged:
        return [0.0] + ell[merged[-1]:], 0
    return ell, None


def max_growth_ratio(boundaries, alpha: float, R: float, clique_index: int | None) -> float:
    """Largest ``p[i+1] / p[i]`` over consecutive annuli outside the clique."""
    first = 0 if clique_index is None else clique_index + 1
    masses = [annulus_mass(boundaries[i], boundaries[i + 1], alpha, R) for i in range(len(boundaries) - 1)]
    return max((masses[i + 1] / masses[i] for i in range(first, len(masses) - 1)), default=0.0)


def annulus_count(alpha: float, R: float) -> int:
    """Smallest equal-height split with heights at most ln2/alpha whose
    outward mass growth between neighbours stays within a factor two.

    Rounding ``alpha*R/ln2`` up already gives this almost always; the loop
    only adds annuli for small radii where the inner slabs are still far
    from the exponential regime.
    """
    k = max(1, math.ceil(alpha * R / LN2))
    for _ in range(4 * k + 64):
        b, clique = _merged_boundaries(R, k)
        if max_growth_ratio(b, alpha, R, clique) <= 2.0:
            return k
        k += 1
    raise RuntimeError(f"no annulus count satisfies the growth bound for alpha={alpha}, R={R}")


def chunk_interval(c: int, P: int) -> tuple[float, float]:
    lo = TWO_PI * c / P
    hi = TWO_PI if c + 1 == P else TWO_PI * (c + 1) / P
    return lo, hi


def build_annuli(params: ModelParams) -> AnnulusLayout:
    R, alpha = params.R, params.alpha
    ell, clique = _merged_boundaries(R, annulus_count(alpha, R))
    b = np.asarray(ell, dtype=np.float64)
    probs = np.array([annulus_mass(b[i], b[i + 1], alpha, R) for i in range(len(b) - 1)])
    return AnnulusLayout(params=params, boundaries=b, clique_index=clique, probs=probs)


def _split_chunks(total: int, lo: int, hi: int, node: int, path: SeedPath, out: np.ndarray) -> None:
    if hi - lo == 1:
        out[lo] = total
        return
    mid = (lo + hi) // 2
    left, right = split_count(total, mid - lo, hi - mid, path.child(node))
    _split_chunks(left, lo, mid, 2 * node, path, out)
    _split_chunks(right, mid, hi, 2 * node + 1, path, out)


def assign_counts(layout: AnnulusLayout) -> AnnulusLayout:
    params = layout.params
    root = SeedPath(params.seed)
    counts = np.array(multinomial_counts(params.n, layout.probs / layout.probs.sum(),
                                         root.child("annuli")), dtype=np.int64)
    chunk = np.zeros((layout.k, params.P), dtype=np.int64)
    for i in range(layout.k):
        _split_chunks(int(counts[i]), 0, params.P, 1, root.child("chunks", i), chunk[i])
    return replace(layout, counts=counts, chunk_counts=chunk)


def classify(layout: AnnulusLayout, P: int | None = None) -> AnnulusClass:
    P = layout.params.P if P is None else P
    R = layout.params.R
    kinds = []
    r_G = R
    for i in range(layout.k):
        lo = float(layout.boundaries[i])
        if i == layout.clique_index:
            kinds.append(AnnulusKind.CLIQUE)
        elif kinds and kinds[-1] == AnnulusKind.STREAMING:
            kinds.append(AnnulusKind.STREAMING)
        elif 2.0 * angular_deviation(lo, lo, R) <= TWO_PI / P:
            kinds.append(AnnulusKind.STREAMING)
            r_G = lo
        else:
            kinds.append(AnnulusKind.GLOBAL)
    return AnnulusClass(tuple(kinds), r_G)


def vertex_id_base(layout: AnnulusLayout) -> np.ndarray:
    flat = layout.chunk_counts.reshape(-1)
    base = np.zeros_like(flat)
    np.cumsum(flat[:-1], out=base[1:])
    return base.reshape(layout.chunk_counts.shape)


@dataclass(frozen=True)
class CellGrid:
    cells: np.ndarray

    def cell_index(self, annulus: int, theta: float) -> int:
        return int(math.floor(theta * self.cells[annulus] / TWO_PI))


def cell_count(n_i: int, target: int = DEFAULT_CELL_TARGET) -> int:
    c = 1
    while n_i // (2 * c) >= target:
        c *= 2
    return c


def cell_grid(layout: AnnulusLayout, target: int = DEFAULT_CELL_TARGET) -> CellGrid:
    if target < 1:
        raise ValueError("cell target must be >= 1")
    return CellGrid(np.array([cell_count(int(n), target) for n in layout.counts], dtype=np.int64))


def build_layout(params: ModelParams, cell_target: int = DEFAULT_CELL_TARGET) -> AnnulusLayout:
    """All partition steps in order: annuli, counts, classes, cells, ids."""
    layout = assign_counts(build_annuli(params))
    return replace(layout, classes=classify(layout),
                   cell_counts=cell_grid(layout, cell_target).cells,
                   id_base=vertex_id_base(layout))
