"""Representation functions r''_{2,2}, r'_{2,2}, r_{2,2} over short windows.

All three count ordered pairs with strictly positive coordinates:

* ``TWO_PRIME_SQUARES``: sum of ``log p1 * log p2`` over ``p1**2 + p2**2 = n``;
* ``PRIME_SQUARE_PLUS_SQUARE``: sum of ``log p`` over ``p**2 + m**2 = n``, m >= 1;
* ``TWO_SQUARES``: number of ``(m1, m2)`` with ``m1**2 + m2**2 = n``.
"""

import enum
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._intmath import ceil_isqrt_array, isqrt_array
from .errors import PreconditionError, SizeCapError

_MAX_N = (1 << 62) - 1
_PAIR_BLOCK = 1 << 22  # candidate pairs materialised at once
BRUTE_FORCE_CAP = 10 ** 6 + 10 ** 3
DIVISOR_ORACLE_CAP = 10 ** 12


class RepKind(enum.Enum):
    TWO_PRIME_SQUARES = "prime2"
    PRIME_SQUARE_PLUS_SQUARE = "prime1"
    TWO_SQUARES = "square2"

    @property
    def prime_first(self):
        return self is not RepKind.TWO_SQUARES

    @property
    def prime_second(self):
        return self is RepKind.TWO_PRIME_SQUARES

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        for kind in cls:
            if value in (kind.value, kind.name, kind.name.lower()):
                return kind
        raise ValueError(f"unknown representation kind {value!r}")


@dataclass
class RepWindow:
    """Values ``r(n)`` for ``n = N+1 .. N+H`` and the two window sums."""

    kind: RepKind
    N: int
    H: int
    values: np.ndarray = field(repr=False)
    plain_sum: float = 0.0
    exp_weighted_sum: float = 0.0
    wall_time_s: float = 0.0

    @property
    def n(self):
        return np.arange(self.N + 1, self.N + self.H + 1, dtype=np.int64)

    def exp_weights(self):
        return np.exp(-self.n.astype(np.float64) / self.N) if self.N else np.ones(self.H)

    def to_csv(self):
        lines = ["n,value"]
        lines.extend(f"{n},{v!r}" for n, v in zip(self.n.tolist(), self.values.tolist()))
        return "\n".join(lines) + "\n"

    def summary(self, with_time=True):
        out = {
            "kind": self.kind.value,
            "N": self.N,
            "H": self.H,
            "plain_sum": self.plain_sum,
            "exp_weighted_sum": self.exp_weighted_sum,
        }
        if with_time:
            out["wall_time_s"] = self.wall_time_s
        return out

    def summary_json(self, with_time=True):
        return json.dumps(self.summary(with_time), sort_keys=False)


def read_window_csv(text):
    """Parse the ``n,value`` CSV emitted by :meth:`RepWindow.to_csv`."""
    rows = text.strip().splitlines()
    if not rows or rows[0].strip() != "n,value":
        raise ValueError("missing 'n,value' header")
    n, v = [], []
    for row in rows[1:]:
        a, b = row.split(",")
        n.append(int(a))
        v.append(float(b))
    return np.array(n, dtype=np.int64), np.array(v)


def _finish(kind, N, H, values, t0):
    values = np.asarray(values, dtype=np.float64)
    w = RepWindow(kind, N, H, values)
    w.plain_sum = math.fsum(values)
    w.exp_weighted_sum = math.fsum(values * w.exp_weights())
    # second pass: ordinary pairwise sums must agree with the exact ones
    scale = max(1.0, abs(w.plain_sum))
    if abs(np.sum(values) - w.plain_sum) > 1e-9 * scale:
        raise ArithmeticError("window sum cross-check failed")
    w.wall_time_s = time.perf_counter() - t0
    return w


def _check_window(N, H):
    if H < 1:
        raise ValueError("H must be >= 1")
    if N < 0:
        raise ValueError("N must be >= 0")
    if N + H > _MAX_N:
        raise OverflowError(f"N + H = {N + H} exceeds the int64 working range")


def _outer_coordinates(kind, top, table):
    if kind.prime_first:
        return table.primes[table.primes <= top]
    return np.arange(1, top + 1, dtype=np.int64)


def _accumulate_block(kind, a, N, H, table, log_cache):
    """Bincount the matches whose first coordinate lies in ``a``."""
    a2 = a * a
    lo = ceil_isqrt_array(np.maximum(N + 1 - a2, 1))
    hi = isqrt_array(N + H - a2)
    cnt = np.maximum(hi - lo + 1, 0)
    total = int(cnt.sum())
    if total == 0:
        return np.zeros(H)
    first = np.repeat(a, cnt)
    offsets = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(cnt) - cnt, cnt)
    second = np.repeat(lo, cnt) + offsets
    if kind.prime_second:
        keep = table.primality[second]
        first, second = first[keep], second[keep]
    idx = first * first + second * second - (N + 1)
    if kind is RepKind.TWO_SQUARES:
        weights = None
    elif kind is RepKind.PRIME_SQUARE_PLUS_SQUARE:
        weights = log_cache[first]
    else:
        weights = log_cache[first] * log_cache[second]
    return np.bincount(idx, weights=weights, minlength=H).astype(np.float64)


def _blocks(a, N, H, budget=_PAIR_BLOCK):
    """Split the outer coordinates so each block yields about ``budget`` pairs."""
    a2 = a * a
    est = (isqrt_array(N + H - a2) - ceil_isqrt_array(np.maximum(N + 1 - a2, 1)) + 1).clip(0)
    csum = np.cumsum(est)
    n_blocks = max(1, -(-int(csum[-1]) // budget))
    cuts = np.searchsorted(csum, np.arange(1, n_blocks) * budget, side="right")
    edges = np.unique(np.concatenate([[0], cuts, [len(a)]]))
    return [a[i:j] for i, j in zip(edges[:-1], edges[1:])]


def compute_window(kind, N, H, table, threads=1):
    """Exact ``r(n)`` for ``n in [N+1, N+H]`` by windowed enumeration.

    For each first coordinate ``a`` only the second coordinates ``b`` with
    ``N < a**2 + b**2 <= N + H`` are visited, so the work is proportional to
    the number of lattice points in the annulus, not to ``H * pi(sqrt N)``.

    Parameters
    ----------
    kind : RepKind or str
    N, H : int
        Window base and length, ``N >= 4`` and ``H >= 1``.
    table : PrimeTable
        Must cover ``isqrt(N + H)``.
    threads : int, optional
        Worker threads over blocks of the outer coordinate. Shards are merged
        in block order, so the result does not depend on scheduling.

    Returns
    -------
    RepWindow
    """
    t0 = time.perf_counter()
    kind = RepKind.parse(kind)
    N, H = int(N), int(H)
    _check_window(N, H)
    if N < 4:
        raise ValueError("compute_window needs N >= 4")
    top = math.isqrt(N + H - 1)
    need = math.isqrt(N + H)
    if table.limit < need:
        raise PreconditionError(
            f"sieve limit {table.limit} too small: need at least {need} for N+H={N + H}"
        )
    a = _outer_coordinates(kind, top, table)
    log_cache = None
    if kind.prime_first:
        log_cache = np.zeros(need + 1)
        p = table.primes[table.primes <= need]
        log_cache[p] = np.log(p.astype(np.float64))
    blocks = _blocks(a, N, H) if len(a) else []

    def job(blk):
        return _accumulate_block(kind, blk, N, H, table, log_cache)

    if threads and threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            shards = list(pool.map(job, blocks))
    else:
        shards = [job(b) for b in blocks]
    values = np.zeros(H)
    for s in shards:
        values += s
    return _finish(kind, N, H, values, t0)


def brute_force_window(kind, N, H, table):
    """Reference ``r(n)`` by scanning every n against every first coordinate.

    Test oracle only: ``O(H * sqrt(N))`` work, refused above ``N + H = 10**6 + 10**3``.
    """
    t0 = time.perf_counter()
    kind = RepKind.parse(kind)
    N, H = int(N), int(H)
    _check_window(N, H)
    if N + H > BRUTE_FORCE_CAP:
        raise SizeCapError(f"brute force refused for N + H = {N + H} > {BRUTE_FORCE_CAP}")
    if table.limit < math.isqrt(N + H):
        raise PreconditionError("sieve too small for brute force window")
    n = np.arange(N + 1, N + H + 1, dtype=np.int64)
    values = np.zeros(H)
    prime = table.primality
    for a in range(1, math.isqrt(N + H) + 1):
        if kind.prime_first and not prime[a]:
            continue
        rest = n - a * a
        ok = rest >= 1
        b = np.zeros_like(rest)
        b[ok] = isqrt_array(rest[ok])
        hit = ok & (b * b == rest)
        if kind.prime_second:
            hit &= prime[b]
        if kind is RepKind.TWO_SQUARES:
            values[hit] += 1.0
        elif kind is RepKind.PRIME_SQUARE_PLUS_SQUARE:
            values[hit] += math.log(a)
        else:
            values[hit] += math.log(a) * np.log(b[hit].astype(np.float64))
    return _finish(kind, N, H, values, t0)


@lru_cache(maxsize=1)
def _oracle_primes():
    from .sieve import build_prime_table

    return build_prime_table(10 ** 6).primes.tolist()


def factorize(n):
    """Prime factorisation ``{p: e}`` by trial division with primes up to 1e6."""
    n = int(n)
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    if n > DIVISOR_ORACLE_CAP:
        raise SizeCapError(f"n = {n} above the trial-division budget {DIVISOR_ORACLE_CAP}")
    out = {}
    for p in _oracle_primes():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def two_squares_divisor_oracle(n):
    """r_2(n) = 4 * sum_{d | n} chi_4(d), the count over all integer pairs."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    r = 4
    for p, e in factorize(n).items():
        if p % 4 == 1:
            r *= e + 1
        elif p % 4 == 3 and e % 2:
            return 0
    return r


def positive_two_squares(n):
    """Ordered pairs of positive integers: ``(r_2(n) - 4 [n is a square]) / 4``."""
    r2 = two_squares_divisor_oracle(n)
    square = math.isqrt(n) ** 2 == n
    return (r2 - 4 * square) // 4
