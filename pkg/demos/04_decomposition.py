"""Split the window integral into major-arc, minor-arc and correction pieces.

Each piece is computed on its own and the sum is compared with the
enumerated window sum.
"""
from circleverify import build_prime_table
from circleverify.circle import decompose

table = build_prime_table(10 ** 5)
for theorem, N, H, c in (("T1", 5000, 200, None), ("T2", 5000, 500, 0.1), ("T3", 2000, 200, None)):
    d = decompose(theorem, N, H, c, 1e-14, table)
    pieces = "  ".join(f"I{k}={v.real:+.4f}" for k, v in enumerate(d.I))
    print(f"{theorem} N={N} H={H}: {pieces}")
    print(f"    window sum {d.window_sum:.6f}, main term {d.main_term:.6f}, closure error {d.closure_error:.1e}")
