"""Sieve the primes once, then count representations on a short window.

Compares the fast enumeration with the brute-force scan and prints the
exp-weighted and plain window sums for all three kinds.
"""
import numpy as np

from circleverify import RepKind, build_prime_table, compute_window
from circleverify.repcount import brute_force_window

table = build_prime_table(10 ** 6)
print(f"primes up to {table.limit}: {len(table.primes)}")

N, H = 10 ** 6, 200
for kind in RepKind:
    w = compute_window(kind, N, H, table)
    b = brute_force_window(kind, N, H, table)
    agree = np.allclose(w.values, b.values, rtol=1e-12, atol=0)
    print(f"{kind.value:8s} plain {w.plain_sum:14.4f}  weighted {w.exp_weighted_sum:14.4f}  brute-force agrees: {agree}")
