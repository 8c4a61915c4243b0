import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from srhg.rng import (
    SeedPath,
    UniformStream,
    annulus_radius,
    binomial,
    derive_seed,
    mt_new,
    mt_next_u64,
    multinomial_counts,
    sorted_uniforms,
    split_count,
)


def test_mt19937_64_reference_outputs():
    # Reference implementation (mt19937-64.c): init_genrand64(5489), 10000th output.
    st_ = mt_new(np.uint64(5489))
    for _ in range(9999):
        mt_next_u64(st_)
    assert int(mt_next_u64(st_)) == 9981545732273789042
    s42 = mt_new(np.uint64(42))
    assert [int(mt_next_u64(s42)) for _ in range(3)] == [
        13930160852258120406, 11788048577503494824, 13874630024467741450]


def test_derive_seed_deterministic():
    p = SeedPath(7, ("annuli", 3, 1))
    assert derive_seed(p) == derive_seed(SeedPath(7, ("annuli", 3, 1)))
    assert derive_seed(p) == p.seed
    assert SeedPath(7).child("annuli", 3).child(1) == p


def test_derive_seed_last_component_collisions():
    base = SeedPath(123, ("chunks", 5))
    seeds = {base.child(i).seed for i in range(10_000)}
    assert len(seeds) == 10_000


def test_derive_seed_order_matters():
    rng = np.random.default_rng(4)
    for a, b in rng.integers(0, 2**62, (1000, 2)):
        if a != b:
            assert SeedPath(1, (int(a), int(b))).seed != SeedPath(1, (int(b), int(a))).seed


def test_derive_seed_avalanche():
    rng = np.random.default_rng(5)
    flips = []
    for _ in range(2000):
        root = int(rng.integers(0, 2**63))
        bit = int(rng.integers(0, 64))
        a = SeedPath(root, (1, 2)).seed
        b = SeedPath(root ^ (1 << bit), (1, 2)).seed
        flips.append(bin(a ^ b).count("1"))
    # mean of 2000 Binomial(64, 1/2) draws: sd 4/sqrt(2000)
    assert abs(np.mean(flips) - 32) < 0.5


def test_uniform_stream_range_and_reproducibility():
    a, b = UniformStream(SeedPath(9)), UniformStream(SeedPath(9))
    xs = [a.random() for _ in range(10_000)]
    assert xs == [b.random() for _ in range(10_000)]
    assert min(xs) >= 0.0 and max(xs) < 1.0
    assert stats.kstest(xs, "uniform").pvalue > 0.001


def test_binomial_edges():
    s = UniformStream(1)
    assert binomial(100, 0.0, s) == 0
    assert binomial(100, 1.0, s) == 100
    assert binomial(0, 0.3, s) == 0


def test_binomial_large_mean():
    s = UniformStream(SeedPath(11, ("binomial-large",)))
    n, p, k = 10**6, 0.5, 10_000
    xs = np.array([binomial(n, p, s) for _ in range(k)])
    sigma = math.sqrt(n * p * (1 - p))
    assert abs(xs.mean() - n * p) < 4 * sigma / math.sqrt(k)
    assert abs(xs.std() / sigma - 1) < 0.05


def _chi_square_binomial(trials, p, draws, seed):
    s = UniformStream(SeedPath(seed, ("chi2", trials)))
    xs = np.array([binomial(trials, p, s) for _ in range(draws)])
    pmf = stats.binom.pmf(np.arange(trials + 1), trials, p)
    # pool sparse tails so every expected count is at least 5
    expected = pmf * draws
    obs = np.bincount(xs, minlength=trials + 1).astype(float)
    keep = expected >= 5
    lo_tail = np.arange(trials + 1) < np.argmax(keep)
    hi_tail = ~keep & ~lo_tail
    e = np.concatenate([[expected[lo_tail].sum()], expected[keep], [expected[hi_tail].sum()]])
    o = np.concatenate([[obs[lo_tail].sum()], obs[keep], [obs[hi_tail].sum()]])
    m = e > 0
    return stats.chisquare(o[m], e[m]).pvalue


def test_binomial_chi_square_inversion():
    assert _chi_square_binomial(30, 0.3, 100_000, 1) > 0.001


def test_binomial_chi_square_recursive_branch():
    # mean 120 > inversion limit, exercises the beta split
    assert _chi_square_binomial(400, 0.3, 40_000, 2) > 0.001


def test_multinomial_examples():
    path = SeedPath(3, ("m",))
    assert multinomial_counts(17, [1.0], path) == [17]
    assert multinomial_counts(0, [0.2, 0.3, 0.5], path) == [0, 0, 0]
    # two buckets is a single binomial draw from the same stream
    left = binomial(1000, 0.37, UniformStream(path))
    assert multinomial_counts(1000, [0.37, 0.63], path) == [left, 1000 - left]
    with pytest.raises(ValueError):
        multinomial_counts(10, [1.2, -0.2], path)
    with pytest.raises(ValueError):
        multinomial_counts(10, [0.5, 0.4], path)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6), st.lists(st.floats(0.0, 1.0), min_size=1, max_size=12), st.integers(0, 2**64 - 1))
def test_multinomial_conserves_total(total, weights, seed):
    w = np.asarray(weights)
    if w.sum() == 0:
        w = np.ones_like(w)
    probs = w / w.sum()
    counts = multinomial_counts(total, probs, SeedPath(seed))
    assert sum(counts) == total
    assert all(c >= 0 for c in counts)
    assert all(c == 0 for c, p in zip(counts, probs) if p == 0)


def test_split_count():
    path = SeedPath(5, ("split",))
    assert split_count(100, 0.0, 1.0, path) == (0, 100)
    assert split_count(1000, 1.0, 3.0, path) == split_count(1000, 1.0, 3.0, SeedPath(5, ("split",)))
    n = 10**6
    for i in range(100):
        left, right = split_count(n, 1.0, 1.0, path.child(i))
        assert left + right == n
        assert abs(left - n / 2) < 4 * math.sqrt(n * 0.25)


def test_sorted_uniforms_basic():
    assert list(sorted_uniforms(0, 0.0, 1.0, SeedPath(1))) == []
    vals = list(sorted_uniforms(1000, 2.0, 3.5, SeedPath(1)))
    assert len(vals) == 1000
    assert all(2.0 <= v < 3.5 for v in vals)
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_sorted_uniforms_single_is_uniform():
    xs = [next(sorted_uniforms(1, 0.0, 1.0, SeedPath(8, (i,)))) for i in range(100_000)]
    assert stats.kstest(xs, "uniform").pvalue > 0.001


def test_sorted_uniforms_joint_law_matches_sorting():
    trials, k = 100_000, 5
    ours = np.array([list(sorted_uniforms(k, 0.0, 1.0, SeedPath(21, (i,)))) for i in range(trials)])
    ref = np.sort(np.random.default_rng(22).random((trials, k)), axis=1)
    for j in range(k):
        assert stats.ks_2samp(ours[:, j], ref[:, j]).pvalue > 0.001
    # gaps carry the dependence; compare one joint functional as well
    assert stats.ks_2samp(ours[:, 3] - ours[:, 1], ref[:, 3] - ref[:, 1]).pvalue > 0.001


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2000), st.integers(0, 2**64 - 1))
def test_sorted_uniforms_monotone(count, seed):
    vals = list(sorted_uniforms(count, -1.0, 4.0, SeedPath(seed)))
    assert len(vals) == count
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    assert all(-1.0 <= v < 4.0 for v in vals)


def test_annulus_radius_inverts_restricted_cdf():
    alpha, lo, hi = 0.8, 7.0, 8.2
    s_lo, s_hi = math.sinh(alpha * lo / 2) ** 2, math.sinh(alpha * hi / 2) ** 2
    assert annulus_radius(0.0, s_lo, s_hi, alpha, lo, hi) == pytest.approx(lo, abs=1e-12)
    for u in (0.1, 0.5, 0.9):
        r = annulus_radius(u, s_lo, s_hi, alpha, lo, hi)
        frac = (math.cosh(alpha * r) - math.cosh(alpha * lo)) / (math.cosh(alpha * hi) - math.cosh(alpha * lo))
        assert frac == pytest.approx(u, rel=1e-12)
