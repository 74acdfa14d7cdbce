"""Counter-based, splittable random streams.

Every stream is a SplitMix64 sequence: the value at position ``c`` is
``mix64(seed + (c + 1) * gamma)``. Because a value depends only on
``(seed, gamma, c)``, draws for many replicates can be produced in one
vectorised call and a replicate's numbers never depend on how the work was
chunked or how many workers ran it.

Replicate streams are derived from ``(base_seed, family_id, replicate_index)``
the same way ``SplittableRandom.split`` derives children, so two streams
built from the same triple are identical and distinct indices give
statistically independent sequences.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_G1 = np.uint64(0xFF51AFD7ED558CCD)
_G2 = np.uint64(0xC4CEB9FE1A85EC53)
_ALT = np.uint64(0xAAAAAAAAAAAAAAAA)
_MASK64 = (1 << 64) - 1
_TWO_M53 = 2.0 ** -53


def _u64(x) -> np.ndarray:
    return np.asarray(x, dtype=np.uint64)


def mix64(z) -> np.ndarray:
    """SplitMix64 output finaliser, elementwise over uint64 arrays."""
    return _mix64_inplace(np.array(z, dtype=np.uint64))


def _mix64_inplace(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z ^= z >> np.uint64(30)
        z *= _M1
        z ^= z >> np.uint64(27)
        z *= _M2
        z ^= z >> np.uint64(31)
    return z


def mix_gamma(z) -> np.ndarray:
    """Odd increment with enough bit transitions to be a good stream step."""
    z = _u64(z)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(33))) * _G1
        z = (z ^ (z >> np.uint64(33))) * _G2
    z = (z ^ (z >> np.uint64(33))) | np.uint64(1)
    sparse = np.bitwise_count(z ^ (z >> np.uint64(1))) < 24
    return np.where(sparse, z ^ _ALT, z)


def raw_at(seeds, gammas, counters) -> np.ndarray:
    """64-bit outputs at the given counter positions (broadcasting)."""
    seeds, gammas, counters = _u64(seeds), _u64(gammas), _u64(counters)
    with np.errstate(over="ignore"):
        state = counters + np.uint64(1)
        state = state * gammas
        state += seeds
    return _mix64_inplace(np.asarray(state))


def _top53(seeds, gammas, counters) -> np.ndarray:
    return (raw_at(seeds, gammas, counters) >> np.uint64(11)).astype(np.float64)


def uniform_at(seeds, gammas, counters) -> np.ndarray:
    """Uniforms on [0, 1) with 53 random bits."""
    u = _top53(seeds, gammas, counters)
    u *= _TWO_M53
    return u


def open_uniform_at(seeds, gammas, counters) -> np.ndarray:
    """Uniforms on the open interval (0, 1), safe for inverse-CDF sampling."""
    u = _top53(seeds, gammas, counters)
    u += 0.5
    u *= _TWO_M53
    return u


def std_normal_at(seeds, gammas, counters) -> np.ndarray:
    return ndtri(open_uniform_at(seeds, gammas, counters))


def family_id(label: str) -> int:
    """Stable 64-bit identifier for a scenario family label."""
    return int.from_bytes(hashlib.blake2b(label.encode(), digest_size=8).digest(), "little")


def derive_keys(base_seed: int, fam: int, indices) -> tuple[np.ndarray, np.ndarray]:
    """Seeds and gammas for many replicate indices of one family at once."""
    root = mix64(_u64((base_seed & _MASK64) ^ 0x5851F42D4C957F2D))
    parent = mix64(root ^ _u64(fam & _MASK64))
    idx = _u64(indices)
    with np.errstate(over="ignore"):
        s1 = parent + (np.uint64(2) * idx + np.uint64(1)) * _GOLDEN
        s2 = parent + (np.uint64(2) * idx + np.uint64(2)) * _GOLDEN
    return mix64(s1), mix_gamma(s2)


@dataclass
class RngStream:
    """A single deterministic stream positioned at ``counter``.

    Sequential draws advance ``counter``; the batch engine addresses positions
    directly through :func:`raw_at` using ``seed`` and ``gamma``.
    """

    seed: int
    gamma: int
    counter: int = 0
    label: tuple = field(default_factory=tuple)

    def _take(self, count: int) -> np.ndarray:
        if count < 0:
            raise ValueError("count must be non-negative")
        pos = np.arange(self.counter, self.counter + count, dtype=np.uint64)
        self.counter += count
        return pos

    def uniform(self, count: int) -> np.ndarray:
        return uniform_at(self.seed, self.gamma, self._take(count))

    def standard_normal(self, count: int) -> np.ndarray:
        return std_normal_at(self.seed, self.gamma, self._take(count))

    def copy(self) -> "RngStream":
        return RngStream(self.seed, self.gamma, self.counter, self.label)


def derive_stream(base_seed: int, fam: int | str, replicate_index: int) -> RngStream:
    """Stream for one replicate of one scenario family.

    ``fam`` may be a label string, which is hashed with :func:`family_id`.
    The delay length is deliberately not part of the family, so a replicate
    sees the same participants whatever the delay.
    """
    if isinstance(fam, str):
        fam = family_id(fam)
    seeds, gammas = derive_keys(base_seed, fam, [replicate_index])
    return RngStream(int(seeds[0]), int(gammas[0]), 0, (fam, int(replicate_index)))


def draw_normal(stream: RngStream, count: int, mu: float = 0.0, sd: float = 1.0) -> np.ndarray:
    if sd < 0:
        raise ValueError("sd must be non-negative")
    z = stream.standard_normal(count)
    if sd == 0:
        return np.full(count, float(mu))
    return mu + sd * z


def draw_bernoulli(stream: RngStream, count: int, p: float) -> np.ndarray:
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    return (stream.uniform(count) < p).astype(np.int64)
