"""Counter-based deterministic random streams.

Every random draw in hivekit comes from a keyed counter generator so that
streams are reproducible bit-for-bit across platforms and across
reimplementations in other languages.  The construction is SplitMix64:

    base        = mix64(mix64(key) + stream)
    raw64(i)    = mix64(base + (i + 1) * GOLDEN)

with the standard finalizer constants

    GOLDEN = 0x9E3779B97F4A7C15
    MIX_A  = 0xBF58476D1CE4E5B9
    MIX_B  = 0x94D049BB133111EB

The serialized generator state is the 256-bit tuple
(key, stream, counter, pad); `base` is derived, never stored.

Derived quantities (documented, frozen):

- uniform:  (raw >> 11) * 2**-53                      in [0, 1)
- normal:   Box-Muller, cosine branch only, two raws per draw:
            u1 = ((raw1 >> 11) + 1) * 2**-53          in (0, 1]
            u2 = (raw2 >> 11) * 2**-53
            z  = sqrt(-2 ln u1) * cos(2 pi u2)
- randbelow(n): raw64 % n  (modulo; n is tiny in all uses here)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

_M64 = (1 << 64) - 1

GOLDEN = 0x9E3779B97F4A7C15
MIX_A = 0xBF58476D1CE4E5B9
MIX_B = 0x94D049BB133111EB

# Stream channels: one env episode fans out into independent streams.
STREAM_SCENE = 0  # scene randomization draws
STREAM_SENSOR = 1  # sensor noise
STREAM_GOAL = 2  # goal randomization
STREAM_POLICY = 3  # policy action sampling


def mix64(z: int) -> int:
    """SplitMix64 finalizer (a 64-bit bijection)."""
    z &= _M64
    z = ((z ^ (z >> 30)) * MIX_A) & _M64
    z = ((z ^ (z >> 27)) * MIX_B) & _M64
    return z ^ (z >> 31)


def derive_episode_seed(seed: int, episode: int) -> int:
    """Per-episode key derived from the env seed and the episode counter."""
    return mix64((seed + GOLDEN * (episode + 1)) & _M64)


@dataclass
class CounterRng:
    """Keyed counter generator; state is (key, stream, counter, pad)."""

    key: int
    stream: int = 0
    counter: int = 0
    pad: int = 0
    _base: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.key &= _M64
        self.stream &= _M64
        self.counter &= _M64
        self._base = mix64((mix64(self.key) + self.stream) & _M64)

    # -- state ------------------------------------------------------------

    @property
    def state(self) -> tuple[int, int, int, int]:
        return (self.key, self.stream, self.counter, self.pad)

    @classmethod
    def from_state(cls, state: tuple[int, int, int, int]) -> "CounterRng":
        key, stream, counter, pad = state
        rng = cls(key, stream, counter)
        rng.pad = pad
        return rng

    def clone(self) -> "CounterRng":
        return CounterRng.from_state(self.state)

    # -- draws ------------------------------------------------------------

    def next_raw(self) -> int:
        self.counter = (self.counter + 1) & _M64
        return mix64((self._base + self.counter * GOLDEN) & _M64)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        u = (self.next_raw() >> 11) * 2.0**-53
        return lo + (hi - lo) * u

    def standard_normal(self) -> float:
        u1 = ((self.next_raw() >> 11) + 1) * 2.0**-53
        u2 = (self.next_raw() >> 11) * 2.0**-53
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def normal(self, sigma: float) -> float:
        return sigma * self.standard_normal()

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randbelow needs n >= 1")
        return self.next_raw() % n
