"""Exact integer roots, scalar and vectorised.

Floating point is only used to seed Newton iterations; every result is
verified with an exact integer multiply before it is returned.
"""

import math

import numpy as np

# Largest argument for the int64 routines: (isqrt(n) + 1)**2 must not overflow.
_INT64_SAFE = (1 << 62) - 1


def iroot(n, k):
    """Floor of the k-th root of a non-negative Python integer."""
    if n < 0:
        raise ValueError("iroot of a negative number")
    if k < 1:
        raise ValueError("root index must be >= 1")
    if k == 1 or n < 2:
        return n
    if k == 2:
        return math.isqrt(n)
    # Start above the root; integer Newton then decreases monotonically.
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def isqrt_array(n):
    """Elementwise floor square root of a non-negative int64 array."""
    n = np.asarray(n, dtype=np.int64)
    if n.size and (n.min() < 0 or n.max() > _INT64_SAFE):
        raise OverflowError("isqrt_array argument outside [0, 2**62)")
    x = np.sqrt(n.astype(np.float64)).astype(np.int64) + 1
    # Integer Newton from above; a couple of rounds fix any seed error.
    pos = x > 0
    for _ in range(64):
        y = np.where(pos, (x + n // np.maximum(x, 1)) // 2, 0)
        if np.all(y >= x):
            break
        x = np.minimum(x, y)
    x = np.where(x * x > n, x - 1, x)
    x = np.where((x + 1) * (x + 1) <= n, x + 1, x)
    if not (np.all(x * x <= n) and np.all((x + 1) * (x + 1) > n)):
        raise ArithmeticError("isqrt_array verification failed")
    return x


def ceil_isqrt_array(n):
    """Elementwise ceiling square root of a non-negative int64 array."""
    n = np.asarray(n, dtype=np.int64)
    r = isqrt_array(n)
    return np.where(r * r == n, r, r + 1)
