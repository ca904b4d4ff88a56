"""Accurate reduced phases ``x * alpha mod 1`` for integer x.

A float alpha is peeled into fixed-point chunks small enough that every
partial product ``x * chunk`` is an exact double; the fractional part of each
partial product is therefore exact and only the final few additions round.
This keeps the absolute phase error near 1e-16 even when ``x * alpha`` is
of order 1e12, where the naive product would already be off by 1e-4.
"""

import numpy as np

_MAX_X_BITS = 48


def reduced_phase(x, alpha):
    """Return ``r = x*alpha - round(x*alpha)`` in ``[-1/2, 1/2]``.

    ``x`` (non-negative integers) and ``alpha`` (floats) broadcast against
    each other. The result is odd in alpha bit for bit, which makes every
    exponential sum built on it exactly conjugate-symmetric.
    """
    x = np.asarray(x)
    alpha = np.asarray(alpha, dtype=np.float64)
    xf = x.astype(np.float64)
    xmax = float(xf.max()) if xf.size else 0.0
    if xmax < 0:
        raise ValueError("reduced_phase expects non-negative integers")
    xbits = max(int(xmax).bit_length(), 1)
    if xbits > _MAX_X_BITS:
        raise OverflowError(f"phase multiplier needs {xbits} bits (max {_MAX_X_BITS})")
    cbits = 52 - xbits
    sign = np.sign(alpha)
    rem = np.abs(alpha)
    # |alpha| may exceed 1/2 for callers working off the unit interval.
    whole = np.floor(rem)
    rem = rem - whole
    scale = 2.0 ** cbits
    phase = np.zeros(np.broadcast(xf, alpha).shape)
    weight = 1.0
    # Chunks beyond 2**-(60 + xbits) contribute less than 2**-60 to the phase.
    n_chunks = -(-(60 + xbits) // cbits)
    for _ in range(n_chunks):
        rem = rem * scale
        chunk = np.floor(rem)
        rem = rem - chunk
        weight /= scale
        prod = (xf * chunk) * weight  # exact: < 2**52 before an exact power-of-two scale
        phase = phase + (prod - np.floor(prod))
        phase = phase - np.round(phase)
        if not np.any(rem):
            break
    return sign * phase


def unit_phase(x, alpha):
    """``e(x * alpha) = exp(2 pi i x alpha)`` with exact phase reduction."""
    r = reduced_phase(x, alpha)
    t = 2.0 * np.pi * r
    return np.cos(t) + 1j * np.sin(t)
