"""Fully specified pseudo-random streams for reproducible fixtures.

The generator is deliberately small and written down to the bit so that
simulated fixtures can be regenerated identically anywhere:

* ``uniforms(seed, count)`` returns u_k = mix64(seed + k * GAMMA) >> 11
  scaled by 2^-53, for k = 1..count, where ``mix64`` is the splitmix64
  finalizer (constants below) and all arithmetic is modulo 2^64.
* ``normals(seed, count)`` feeds consecutive uniform pairs (u1, u2)
  through the trigonometric Box-Muller transform,
  r = sqrt(-2 ln(1 - u1)), z0 = r cos(2 pi u2), z1 = r sin(2 pi u2),
  and emits z0, z1, z0, z1, ... truncated to ``count``.

The integer stream is exactly reproducible on any platform; the normal
deviates additionally depend on the accuracy of the libm log/cos/sin,
which in practice is identical across mainstream builds. Checked-in CSV
fixtures remain the byte-level ground truth.
"""

from __future__ import annotations

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_MASK = 0xFFFFFFFFFFFFFFFF


def uniforms(seed: int, count: int) -> np.ndarray:
    """``count`` deviates in [0, 1) from the splitmix64 counter stream."""
    if count < 0:
        raise ValueError("count must be non-negative")
    k = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & _MASK) + k * np.uint64(GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def normals(seed: int, count: int) -> np.ndarray:
    """``count`` standard normal deviates via Box-Muller on :func:`uniforms`."""
    if count < 0:
        raise ValueError("count must be non-negative")
    pairs = (count + 1) // 2
    u = uniforms(seed, 2 * pairs)
    u1 = u[0::2]
    u2 = u[1::2]
    r = np.sqrt(-2.0 * np.log1p(-u1))
    out = np.empty(2 * pairs)
    out[0::2] = r * np.cos(2.0 * np.pi * u2)
    out[1::2] = r * np.sin(2.0 * np.pi * u2)
    return out[:count]
