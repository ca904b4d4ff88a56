"""Theta values on both sides of the functional equation.

Near rationals with small denominators the value collapses towards zero, and
a relative residual then says more about double precision than the code.
"""
from circleverify.expsums import CircleParams, theta_functional_residual, theta_value

for N in (10 ** 2, 10 ** 4):
    for alpha in (0.0, 1e-4, 1e-2, 0.3):
        p = CircleParams(N, alpha)
        th = theta_value(p)
        res = theta_functional_residual(p)
        print(f"N={N:<6d} alpha={alpha:<7g} |theta|={abs(th):.3e}  residual={res:.2e}  relative={res / abs(th):.2e}")
