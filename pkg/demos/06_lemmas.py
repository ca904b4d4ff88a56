"""Empirical constants of the pointwise and mean-square bounds over an alpha grid."""
from circleverify import build_prime_table
from circleverify.verify import lemma_suite

table = build_prime_table(10 ** 6)
for c in lemma_suite([10 ** 4, 10 ** 6], "log:-8:-0.302:40", [100, 1000], table, ms_N_grid=[10 ** 4]):
    print(f"{c.name:16s} max ratio {c.max_ratio:8.4f} (constant {c.constant:g})  {c.verdict}  at {c.argmax}")
