"""Reproducible random streams.

All randomness in the library flows through keyed counter streams: the k-th
draw of stream (seed, stream_id) is a pure function of (seed, stream_id, k),
so results do not depend on scheduling, batching, or platform.  The generator
is the SplitMix64 sequence: draw k of a stream with key K is

    mix64(K + (k + 1) * GOLDEN)          (all arithmetic mod 2^64)

where mix64 is the standard SplitMix64 finalizer (xor-shift / multiply twice)
and GOLDEN = 0x9E3779B97F4A7C15.  The stream key is itself derived by mixing
seed and stream_id.  Doubles take the top 53 bits, uniform in [0, 1).

Golden vectors for this construction are frozen in tests/data/rng_golden.json;
regenerate with scripts/gen_rng_vectors.py.
"""
from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_STREAM_SALT = np.uint64(0xD1B54A32D192ED03)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TWO53 = float(1 << 53)

# Fixed stream-id blocks so independent subsystems never collide.
STREAM_START_POINT = np.uint64(1 << 20)
STREAM_FUNC_EQ = np.uint64(2 << 20)
STREAM_SPHERE_BOUNDS = np.uint64(3 << 20)
STREAM_COMPOSITION = np.uint64(4 << 20)
STREAM_PROBES = np.uint64(5 << 20)
JULIA_CHAIN_BASE = np.uint64(1) << np.uint64(32)
WALKER_BASE = np.uint64(1) << np.uint64(33)


def _mix64(x):
    """SplitMix64 finalizer, elementwise on uint64 scalars or arrays."""
    with np.errstate(over="ignore"):
        x = x ^ (x >> np.uint64(30))
        x = x * _M1
        x = x ^ (x >> np.uint64(27))
        x = x * _M2
        x = x ^ (x >> np.uint64(31))
    return x


def _as_u64(v):
    # Python ints may be negative or > 2^63; reduce mod 2^64 first.
    if isinstance(v, (int, np.integer)):
        return np.uint64(int(v) & 0xFFFFFFFFFFFFFFFF)
    a = np.asarray(v)
    if a.dtype != np.uint64:
        a = a.astype(np.uint64)
    return a


def stream_key(seed, stream_id):
    """64-bit key of stream (seed, stream_id). Vectorizes over stream_id."""
    with np.errstate(over="ignore"):
        s = _mix64(_as_u64(seed) + _GOLDEN)
        t = _mix64(_as_u64(stream_id) + _STREAM_SALT)
        return _mix64(s ^ t)


def uniform_at(key, counter):
    """Draw number `counter` of the stream with key `key`, in [0, 1).

    Both arguments broadcast; this is the primitive behind per-walker and
    per-chain streams.
    """
    with np.errstate(over="ignore"):
        raw = _mix64(_as_u64(key) + (_as_u64(counter) + np.uint64(1)) * _GOLDEN)
    return (raw >> np.uint64(11)).astype(np.float64) / _TWO53


class CounterStream:
    """Sequential view of one keyed counter stream."""

    def __init__(self, seed, stream_id):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.stream_id = int(stream_id) & 0xFFFFFFFFFFFFFFFF
        self._key = stream_key(seed, stream_id)
        self._pos = 0

    def uniform(self, n=None):
        """Next n uniforms in [0,1) (scalar when n is None)."""
        count = 1 if n is None else int(n)
        idx = np.arange(self._pos, self._pos + count, dtype=np.uint64)
        self._pos += count
        out = uniform_at(self._key, idx)
        return float(out[0]) if n is None else out

    def standard_normal(self, n):
        """n standard normals via Box-Muller on consecutive uniform pairs."""
        n = int(n)
        m = (n + 1) // 2
        u1 = np.maximum(self.uniform(m), 2.0 ** -53)
        u2 = self.uniform(m)
        r = np.sqrt(-2.0 * np.log(u1))
        out = np.concatenate([r * np.cos(2 * np.pi * u2), r * np.sin(2 * np.pi * u2)])
        return out[:n]


def rng_stream(seed, stream_id) -> CounterStream:
    """Public handle: the stream of (seed, stream_id)."""
    return CounterStream(seed, stream_id)
