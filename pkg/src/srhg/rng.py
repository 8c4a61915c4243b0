"""Deterministic randomness keyed by hierarchical seed paths.

Every random quantity of a graph is drawn from a stream whose seed is a hash
of a :class:`SeedPath`, so any worker can regenerate any part of the graph
without communication. Streams use the 64-bit Mersenne Twister; its numba
kernels are shared with the sweep engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from numba import njit

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

# Inversion is used while the (folded) mean stays below this; beyond it the
# starting pmf term (1-p)^n would underflow.
INVERSION_MEAN_LIMIT = 30.0


def _mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _component_word(c: int | str) -> int:
    if isinstance(c, str):
        h = 0xCBF29CE484222325  # FNV-1a
        for byte in c.encode():
            h = ((h ^ byte) * 0x100000001B3) & MASK64
        return h
    return int(c) & MASK64


@dataclass(frozen=True)
class SeedPath:
    """Root seed plus an ordered tuple of integer or string components."""

    root: int
    components: tuple = ()

    def child(self, *components: int | str) -> "SeedPath":
        return SeedPath(self.root, self.components + tuple(components))

    @property
    def seed(self) -> int:
        return derive_seed(self)


def derive_seed(path: SeedPath) -> int:
    """Fold the path into a 64-bit seed with SplitMix64 finalizer rounds."""
    h = _mix64((path.root + GOLDEN) & MASK64)
    for c in path.components:
        h = _mix64((h + GOLDEN + _mix64(_component_word(c))) & MASK64)
    return h


# ---------------------------------------------------------------------------
# MT19937-64. A state is a uint64 array of length 313; slot 312 holds the
# position in the current block.

_NN = 312
_MM = 156
_MATRIX_A = np.uint64(0xB5026F5AA96619E9)
_UM = np.uint64(0xFFFFFFFF80000000)
_LM = np.uint64(0x7FFFFFFF)
_INV53 = 1.0 / 9007199254740992.0


@njit(cache=True)
def mt_seed(state, seed):
    state[0] = np.uint64(seed)
    for i in range(1, _NN):
        prev = state[i - 1]
        state[i] = np.uint64(6364136223846793005) * (prev ^ (prev >> np.uint64(62))) + np.uint64(i)
    state[_NN] = np.uint64(_NN)


@njit(cache=True)
def mt_new(seed):
    state = np.empty(_NN + 1, dtype=np.uint64)
    mt_seed(state, seed)
    return state


@njit(cache=True)
def _mt_twist(state):
    one = np.uint64(1)
    zero = np.uint64(0)
    for i in range(_NN):
        x = (state[i] & _UM) | (state[(i + 1) % _NN] & _LM)
        y = x >> one
        if x & one:
            y ^= _MATRIX_A
        state[i] = state[(i + _MM) % _NN] ^ y
    state[_NN] = zero


@njit(cache=True)
def mt_next_u64(state):
    if state[_NN] >= np.uint64(_NN):
        _mt_twist(state)
    i = state[_NN]
    x = state[i]
    state[_NN] = i + np.uint64(1)
    x ^= (x >> np.uint64(29)) & np.uint64(0x5555555555555555)
    x ^= (x << np.uint64(17)) & np.uint64(0x71D67FFFEDA60000)
    x ^= (x << np.uint64(37)) & np.uint64(0xFFF7EEE000000000)
    x ^= x >> np.uint64(43)
    return x


@njit(cache=True)
def mt_random(state):
    """Uniform double in [0, 1) from the top 53 bits."""
    return float(mt_next_u64(state) >> np.uint64(11)) * _INV53


@njit(cache=True)
def mt_random_open(state):
    """Uniform double in the open interval (0, 1)."""
    return (float(mt_next_u64(state) >> np.uint64(11)) + 0.5) * _INV53


@njit(cache=True)
def sorted_step(state, y, k):
    """Next descending maximum ``y * U^(1/k)`` with ``U`` in (0, 1]."""
    u = 1.0 - mt_random(state)
    return y * math.exp(math.log(u) / k)


@njit(cache=True)
def sorted_value(a, b, y):
    v = a + (b - a) * (1.0 - y)
    if v >= b:
        v = np.nextafter(b, a)
    return v


@njit(cache=True)
def annulus_radius(u, s_lo, s_hi, alpha, lo, hi):
    """Inverse of the radial CDF restricted to ``[lo, hi)``.

    ``s_lo``/``s_hi`` are ``sinh(alpha*l/2)^2`` of the boundaries; since
    ``cosh x - 1 = 2 sinh(x/2)^2`` this equals the cosh-form inversion.
    """
    r = 2.0 / alpha * math.asinh(math.sqrt(s_lo + u * (s_hi - s_lo)))
    if r < lo:
        r = lo
    if r >= hi:
        r = np.nextafter(hi, lo)
    if r <= 0.0:
        r = np.nextafter(0.0, 1.0)
    return r


@njit(cache=True, nogil=True)
def draw_sorted_points(seed_angle, seed_radius, count, a, b, s_lo, s_hi, alpha, lo, hi):
    """Angles as ascending uniforms on ``[a, b)`` and radii in ``[lo, hi)``."""
    ang_state = mt_new(seed_angle)
    rad_state = mt_new(seed_radius)
    theta = np.empty(count)
    r = np.empty(count)
    y = 1.0
    for i in range(count):
        y = sorted_step(ang_state, y, count - i)
        theta[i] = sorted_value(a, b, y)
        r[i] = annulus_radius(mt_random_open(rad_state), s_lo, s_hi, alpha, lo, hi)
    return theta, r


class UniformStream:
    """Reproducible uniform stream; a single-owner object."""

    def __init__(self, seed: int | SeedPath):
        if isinstance(seed, SeedPath):
            seed = seed.seed
        self.state = mt_new(np.uint64(seed & MASK64))

    def next_u64(self) -> int:
        return int(mt_next_u64(self.state))

    def random(self) -> float:
        return mt_random(self.state)

    def random_open(self) -> float:
        return mt_random_open(self.state)

    def normal(self) -> float:
        # Marsaglia polar method, second variate discarded
        while True:
            u = 2.0 * self.random() - 1.0
            v = 2.0 * self.random() - 1.0
            s = u * u + v * v
            if 0.0 < s < 1.0:
                return u * math.sqrt(-2.0 * math.log(s) / s)

    def gamma(self, shape: float) -> float:
        """Marsaglia-Tsang sampler; requires ``shape >= 1``."""
        d = shape - 1.0 / 3.0
        c = 1.0 / math.sqrt(9.0 * d)
        while True:
            x = self.normal()
            v = 1.0 + c * x
            if v <= 0.0:
                continue
            v = v * v * v
            u = self.random_open()
            if u < 1.0 - 0.0331 * x ** 4:
                return d * v
            if math.log(u) < 0.5 * x * x + d * (1.0 - v + math.log(v)):
                return d * v

    def beta(self, a: float, b: float) -> float:
        x = self.gamma(a)
        return x / (x + self.gamma(b))


def _binomial_inversion(trials: int, p: float, stream: UniformStream) -> int:
    q = 1.0 - p
    s = p / q
    a = (trials + 1) * s
    r0 = q ** trials
    while True:
        r = r0
        u = stream.random()
        x = 0
        while u >= r:
            u -= r
            x += 1
            if x > trials:
                break
            r *= a / x - s
        else:
            return x


def binomial(trials: int, p: float, stream: UniformStream) -> int:
    """Exact Binomial(trials, p) variate.

    Small means use inversion. Larger ones condition on the median order
    statistic of the ``trials`` underlying uniforms (a Beta variate) and
    recurse into the half that still straddles ``p``.
    """
    if trials <= 0 or p <= 0.0:
        return 0
    if p >= 1.0:
        return trials
    if p > 0.5:
        return trials - binomial(trials, 1.0 - p, stream)
    if trials * p <= INVERSION_MEAN_LIMIT:
        return _binomial_inversion(trials, p, stream)
    j = (trials + 1) // 2
    y = stream.beta(j, trials - j + 1)
    if y <= p:
        return j + binomial(trials - j, (p - y) / (1.0 - y), stream)
    return binomial(j - 1, p / y, stream)


def multinomial_counts(total: int, probs, path: SeedPath) -> list[int]:
    """Conditional binomial chain; the counts always sum to ``total``."""
    probs = [float(p) for p in probs]
    if any(p < 0 for p in probs):
        raise ValueError("negative probability")
    if not probs:
        raise ValueError("empty probability list")
    if abs(sum(probs) - 1.0) > 1e-9:
        raise ValueError("probabilities must sum to 1")
    stream = UniformStream(path)
    counts = []
    remaining = total
    mass = 1.0
    for p in probs[:-1]:
        if remaining == 0 or mass <= 0.0:
            counts.append(0)
            continue
        x = binomial(remaining, min(1.0, p / mass), stream)
        counts.append(x)
        remaining -= x
        mass -= p
    counts.append(remaining)
    return counts


def split_count(total: int, mass_left: float, mass_right: float, path: SeedPath) -> tuple[int, int]:
    if mass_left < 0 or mass_right < 0 or mass_left + mass_right <= 0:
        raise ValueError("masses must be nonnegative and not both zero")
    left = binomial(total, mass_left / (mass_left + mass_right), UniformStream(path))
    return left, total - left


def sorted_uniforms(count: int, a: float, b: float, path: SeedPath) -> Iterator[float]:
    """Ascending order statistics of ``count`` uniforms on ``[a, b)``, streamed."""
    if not a < b:
        raise ValueError("need a < b")
    state = UniformStream(path).state
    y = 1.0
    for k in range(count, 0, -1):
        y = sorted_step(state, y, k)
        yield sorted_value(a, b, y)
