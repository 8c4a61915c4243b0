import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from srhg.geometry import ModelParams, angular_deviation, overestimation_factor
from srhg.partition import (
    AnnulusKind,
    annulus_count,
    assign_counts,
    build_annuli,
    build_layout,
    cell_count,
    chunk_interval,
    classify,
    max_growth_ratio,
    nominal_annulus_count,
)


def _random_params(rng, count):
    out = []
    while len(out) < count:
        n = int(10 ** rng.uniform(2, 7))
        alpha = rng.uniform(0.51, 3.0)
        d = 2 ** rng.uniform(0, 8)
        try:
            out.append(ModelParams.create(n, alpha=alpha, avg_degree=d, seed=int(rng.integers(2**32)),
                                          P=int(rng.integers(1, 65))))
        except ValueError:
            continue
    return out


def test_nominal_count_example():
    assert nominal_annulus_count(1.0, 10 * math.log(2)) == 10


def test_count_keeps_heights_within_ln2_over_alpha():
    rng = np.random.default_rng(0)
    for p in _random_params(rng, 50):
        k = annulus_count(p.alpha, p.R)
        assert k >= nominal_annulus_count(p.alpha, p.R)
        assert p.R / k <= math.log(2) / p.alpha * (1 + 1e-12)


def test_probabilities_sum_to_one():
    rng = np.random.default_rng(1)
    for p in _random_params(rng, 50):
        lay = build_annuli(p)
        assert lay.probs.sum() == pytest.approx(1.0, abs=1e-9)
        assert np.all(lay.probs >= 0)
        assert lay.boundaries[0] == 0.0 and lay.boundaries[-1] == p.R
        assert np.all(np.diff(lay.boundaries) > 0)


def test_growth_bound_between_neighbours():
    rng = np.random.default_rng(2)
    grid = [ModelParams.create(n, alpha=a, avg_degree=d)
            for n in (100, 500, 2000, 10**5, 10**6) for a in (0.55, 0.75, 1.0) for d in (4, 10, 16)]
    for p in grid + _random_params(rng, 50):
        lay = build_annuli(p)
        first = 0 if lay.clique_index is None else lay.clique_index + 1
        ratios = lay.probs[first + 1:] / lay.probs[first:-1]
        assert np.all(ratios <= 2 + 1e-9), (p, ratios.max())
        assert max_growth_ratio(lay.boundaries, p.alpha, p.R, lay.clique_index) <= 2.0


def test_clique_merge_and_equal_heights():
    rng = np.random.default_rng(3)
    for p in _random_params(rng, 50):
        lay = build_annuli(p)
        if lay.clique_index is not None:
            assert lay.clique_index == 0
            assert lay.boundaries[1] <= p.R / 2 + 1e-12
            # the next boundary is already beyond R/2
            if lay.k > 1:
                assert lay.boundaries[2] > p.R / 2
        h = np.diff(lay.boundaries[1 if lay.clique_index is not None else 0:])
        assert np.allclose(h, h[0], rtol=1e-12, atol=4 * np.spacing(p.R))


def test_overestimation_of_every_annulus_height():
    rng = np.random.default_rng(4)
    for p in _random_params(rng, 50):
        lay = build_annuli(p)
        h = lay.boundaries[-1] - lay.boundaries[-2]
        assert overestimation_factor(h, p.alpha) <= math.sqrt(math.e)


def test_assign_counts_conservation():
    for seed in range(100):
        p = ModelParams.create(5000, alpha=0.75, avg_degree=8, seed=seed, P=7)
        lay = assign_counts(build_annuli(p))
        assert lay.counts.sum() == p.n
        assert np.array_equal(lay.chunk_counts.sum(axis=1), lay.counts)
        assert lay.chunk_counts.sum() == p.n


def test_single_chunk_counts():
    p = ModelParams.create(3000, alpha=1.0, avg_degree=8, seed=3, P=1)
    lay = assign_counts(build_annuli(p))
    assert np.array_equal(lay.chunk_counts[:, 0], lay.counts)


def test_chunk_counts_concentrate():
    p = ModelParams.create(10**6, alpha=1.0, avg_degree=16, seed=9, P=8)
    lay = assign_counts(build_annuli(p))
    for n_i, row in zip(lay.counts, lay.chunk_counts):
        sigma = math.sqrt(n_i * (1 / 8) * (7 / 8))
        assert np.all(np.abs(row - n_i / 8) <= 4 * sigma + 1e-9)


def test_chunk_counts_exchangeable():
    P, seeds = 4, 400
    acc = np.zeros(P)
    totals = 0
    for s in range(seeds):
        lay = assign_counts(build_annuli(ModelParams.create(2000, alpha=1.0, avg_degree=8, seed=s, P=P)))
        acc += lay.chunk_counts[-1]
        totals += lay.counts[-1]
    sigma = math.sqrt(totals * (1 / P) * (1 - 1 / P))
    assert np.all(np.abs(acc - totals / P) <= 4 * sigma)


def test_layout_reproducible():
    p = ModelParams.create(20000, gamma=2.6, avg_degree=10, seed=77, P=5)
    a, b = build_layout(p), build_layout(p)
    for f in ("boundaries", "probs", "counts", "chunk_counts", "cell_counts", "id_base"):
        assert np.array_equal(getattr(a, f), getattr(b, f))
    assert a.classes == b.classes


def test_classification_single_chunk():
    for seed, alpha in ((0, 0.6), (1, 1.0), (2, 2.0)):
        lay = build_layout(ModelParams.create(10**5, alpha=alpha, avg_degree=10, seed=seed, P=1))
        for i, kind in enumerate(lay.classes.kinds):
            if i == lay.clique_index:
                assert kind == AnnulusKind.CLIQUE
            else:
                lo = lay.boundaries[i]
                assert (kind == AnnulusKind.STREAMING) == (2 * angular_deviation(lo, lo, lay.params.R) <= 2 * math.pi)


def test_classification_rule_and_contiguity():
    rng = np.random.default_rng(5)
    for p in _random_params(rng, 100):
        cls = classify(build_annuli(p))
        kinds = list(cls.kinds)
        assert kinds == sorted(kinds)
        lay = build_annuli(p)
        for i, kind in enumerate(kinds):
            if kind == AnnulusKind.CLIQUE:
                continue
            lo = lay.boundaries[i]
            fits = 2 * angular_deviation(lo, lo, p.R) <= 2 * math.pi / p.P
            assert fits == (kind == AnnulusKind.STREAMING)
        if AnnulusKind.STREAMING in kinds:
            assert cls.r_G == lay.boundaries[kinds.index(AnnulusKind.STREAMING)]


def test_global_radius_bound():
    for P in (2, 4, 8, 16, 64, 256, 1024):
        p = ModelParams.create(10**6, alpha=1.0, avg_degree=16, P=P)
        r_G = classify(build_annuli(p)).r_G
        assert r_G <= p.R / 2 + math.log(2 * P / math.pi) + 1


def test_vertex_id_base():
    p = ModelParams.create(5000, alpha=0.8, avg_degree=12, seed=4, P=1)
    lay = build_layout(p)
    assert np.array_equal(lay.id_base[:, 0], np.concatenate([[0], np.cumsum(lay.counts)[:-1]]))
    for seed in range(100):
        lay = build_layout(ModelParams.create(3000, alpha=0.8, avg_degree=12, seed=seed, P=6))
        flat_base, flat_n = lay.id_base.ravel(), lay.chunk_counts.ravel()
        assert np.all(np.diff(flat_base) == flat_n[:-1])
        assert flat_base[-1] + flat_n[-1] == 3000
        covered = np.zeros(3000, dtype=int)
        for b, c in zip(flat_base, flat_n):
            covered[b:b + c] += 1
        assert np.all(covered == 1)


def test_cell_counts():
    assert cell_count(0) == 1
    assert cell_count(7) == 1
    assert cell_count(64, 8) == 8
    assert cell_count(127, 8) == 8
    assert cell_count(128, 8) == 16


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**7), st.integers(1, 64))
def test_cell_count_bracket(n, target):
    c = cell_count(n, target)
    assert c & (c - 1) == 0
    if n >= target:
        assert target <= n / c < 2 * target
    else:
        assert c == 1


def test_cell_grids_refine():
    lay = build_layout(ModelParams.create(10**5, alpha=0.75, avg_degree=16, seed=2, P=2))
    cells = lay.cell_counts
    for a in cells:
        for b in cells:
            if a <= b:
                fine = set(np.arange(b) / b)
                assert set(np.arange(a) / a) <= fine


def test_chunk_intervals_partition_circle():
    for P in (1, 3, 7, 64):
        ivs = [chunk_interval(c, P) for c in range(P)]
        assert ivs[0][0] == 0.0 and ivs[-1][1] == 2 * math.pi
        assert all(a[1] == b[0] for a, b in zip(ivs, ivs[1:]))
