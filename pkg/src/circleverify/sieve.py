"""Segmented odd-only sieve and the von Mangoldt weight.

The table stores one bit per odd integer (bit ``i`` is the number ``2i + 1``),
packed little-endian within each byte; 2 is special-cased.
"""

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from ._intmath import iroot
from .errors import PreconditionError

DEFAULT_SEGMENT = 1 << 18  # odd numbers per segment, roughly L2 sized as bits

_MAGIC = b"CVPT"
_VERSION = 1
_HEADER = struct.Struct("<4sIQ")

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a_64(data):
    """64-bit FNV-1a hash of a bytes-like object."""
    h = _FNV_OFFSET
    for b in bytes(data):
        h = ((h ^ b) * _FNV_PRIME) & _MASK64
    return h


def _small_odd_primes(limit):
    """Odd primes <= limit by a plain sieve (used for the sieving base)."""
    if limit < 3:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = False
    p = np.flatnonzero(flags)
    return p[p > 2].astype(np.int64)


@dataclass(frozen=True)
class PrimeTable:
    """Sieved primality for ``[0, limit]``; immutable after construction.

    Attributes
    ----------
    limit : int
        Largest integer covered.
    bits : numpy.ndarray
        Packed odd-only primality flags (``uint8``, little bit order).
    primes : numpy.ndarray
        Ascending ``int64`` array of all primes ``<= limit``.
    """

    limit: int
    bits: np.ndarray = field(repr=False)
    primes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.bits.setflags(write=False)
        self.primes.setflags(write=False)

    @property
    def n_odd(self):
        return (self.limit + 1) // 2

    @property
    def primality(self):
        """Boolean array of length ``limit + 1``; ``primality[n]`` iff n is prime."""
        cached = self.__dict__.get("_primality")
        if cached is None:
            odd = np.unpackbits(self.bits, count=self.n_odd, bitorder="little").astype(bool)
            cached = np.zeros(self.limit + 1, dtype=bool)
            cached[1::2] = odd[: len(cached[1::2])]
            if self.limit >= 2:
                cached[2] = True
            cached.setflags(write=False)
            object.__setattr__(self, "_primality", cached)
        return cached

    def is_prime(self, n):
        """Primality of a scalar or an integer array (all entries in range)."""
        arr = np.asarray(n)
        if arr.size and (arr.min() < 0 or arr.max() > self.limit):
            raise IndexError(f"query outside sieved range [0, {self.limit}]")
        out = self.primality[arr]
        return bool(out) if out.ndim == 0 else out

    def prime_count(self, x=None):
        """Number of primes ``<= x`` (default: the whole table)."""
        if x is None:
            return len(self.primes)
        return int(np.searchsorted(self.primes, x, side="right"))

    def prime_powers(self, limit):
        """Prime powers ``p**k <= limit`` with their von Mangoldt weights.

        Returns ``(n, log_p)`` sorted by ``n``; the prime for each power is
        enumerated directly, so no root extraction is involved.
        """
        if limit > self.limit:
            raise PreconditionError(
                f"prime powers up to {limit} need a sieve limit of at least {limit}"
            )
        base = self.primes[self.primes <= limit]
        ns = [base]
        logs = [np.log(base.astype(np.float64))]
        pk = base.copy()
        while True:
            keep = pk <= limit // base[: len(pk)]
            if not keep.any():
                break
            pk = pk[keep] * base[: len(pk)][keep]
            base = base[: len(pk)]
            ns.append(pk)
            logs.append(np.log(base.astype(np.float64)))
        n = np.concatenate(ns)
        w = np.concatenate(logs)
        order = np.argsort(n, kind="stable")
        return n[order], w[order]

    def dump(self, path):
        """Write the binary ``CVPT`` file (header, packed bits, FNV-1a trailer)."""
        payload = _HEADER.pack(_MAGIC, _VERSION, self.limit) + self.bits.tobytes()
        with open(path, "wb") as fh:
            fh.write(payload)
            fh.write(struct.pack("<Q", fnv1a_64(payload)))

    @classmethod
    def load(cls, path):
        """Read a table written by :meth:`dump`, verifying magic and checksum."""
        with open(path, "rb") as fh:
            raw = fh.read()
        if len(raw) < _HEADER.size + 8:
            raise ValueError("truncated CVPT file")
        payload, trailer = raw[:-8], raw[-8:]
        magic, version, limit = _HEADER.unpack_from(payload)
        if magic != _MAGIC:
            raise ValueError(f"bad magic {magic!r}")
        if version != _VERSION:
            raise ValueError(f"unsupported CVPT version {version}")
        (checksum,) = struct.unpack("<Q", trailer)
        if checksum != fnv1a_64(payload):
            raise ValueError("CVPT checksum mismatch")
        bits = np.frombuffer(payload[_HEADER.size :], dtype=np.uint8).copy()
        if len(bits) != ((limit + 1) // 2 + 7) // 8:
            raise ValueError("CVPT bit array length does not match limit")
        return cls(limit, bits, _primes_from_bits(bits, limit))


def _primes_from_bits(bits, limit):
    n_odd = (limit + 1) // 2
    odd = np.unpackbits(bits, count=n_odd, bitorder="little").astype(bool)
    p = 2 * np.flatnonzero(odd).astype(np.int64) + 1
    if limit >= 2:
        p = np.concatenate([np.array([2], dtype=np.int64), p])
    return p


def build_prime_table(limit, segment_size=DEFAULT_SEGMENT):
    """Sieve ``[2, limit]`` in segments of ``segment_size`` odd numbers.

    Parameters
    ----------
    limit : int
        Largest integer to classify; must be at least 2.
    segment_size : int, optional
        Odd numbers per segment, rounded up to a multiple of 8 so segments
        pack into whole bytes. The result does not depend on it.

    Returns
    -------
    PrimeTable
    """
    limit = int(limit)
    if limit < 2:
        raise ValueError("limit must be >= 2")
    seg = max(8, -(-int(segment_size) // 8) * 8)
    n_odd = (limit + 1) // 2
    base = _small_odd_primes(math.isqrt(limit))
    packed = []
    for lo in range(0, n_odd, seg):
        hi = min(lo + seg, n_odd)
        flags = np.ones(hi - lo, dtype=bool)
        if lo == 0:
            flags[0] = False  # the number 1
        for p in base:
            # first odd multiple >= max(p*p, 2*lo+1), as an odd index
            start = max(p * p, 2 * lo + 1)
            start += (-start) % p
            if start % 2 == 0:
                start += p
            idx = (start - 1) // 2
            if idx >= hi:
                continue
            flags[idx - lo :: p] = False
        packed.append(np.packbits(flags, bitorder="little"))
    bits = np.concatenate(packed)
    return PrimeTable(limit, bits, _primes_from_bits(bits, limit))


def von_mangoldt(table, n):
    """Lambda(n): ``log p`` if ``n == p**k`` for a prime p and k >= 1, else 0."""
    n = int(n)
    if n < 2 or n > table.limit:
        raise IndexError(f"n={n} outside sieved range [2, {table.limit}]")
    for k in range(1, n.bit_length()):
        r = iroot(n, k)
        if r < 2:
            break
        if r ** k == n and table.is_prime(r):
            return math.log(r)
    return 0.0
