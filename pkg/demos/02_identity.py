"""The window sum as a full-circle integral, evaluated without quadrature.

The integrand is a trigonometric polynomial, so the integral is a product
coefficient and can be read off an FFT convolution.
"""
from circleverify import RepKind, build_prime_table
from circleverify.circle import full_circle_identity

table = build_prime_table(10 ** 4)
for kind in (RepKind.TWO_PRIME_SQUARES, RepKind.PRIME_SQUARE_PLUS_SQUARE):
    r = full_circle_identity(kind, 2000, 40, 1e-15, table)
    print(f"{kind.value:8s} lhs {r.lhs:.12f}  rhs {r.rhs:.12f}  rel diff {r.rel_diff:.1e}")
