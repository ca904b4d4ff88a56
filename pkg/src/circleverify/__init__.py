"""Numerical circle-method experiments for sums of two squares with prime entries.

Modules
-------
sieve      prime tables and the von Mangoldt weight
repcount   exact representation counts on short windows
expsums    damped exponential sums and the theta function
circle     exact full-circle integrals, arc quadrature, proof decompositions
verify     theorem-scale scans and lemma bound checks
cli        command-line front end (``python3 -m circleverify``)
"""

__version__ = "0.1.0"

from .errors import PreconditionError, QuadratureError, SizeCapError
from .repcount import RepKind, RepWindow, compute_window
from .sieve import PrimeTable, build_prime_table, von_mangoldt

__all__ = [
    "PreconditionError",
    "PrimeTable",
    "QuadratureError",
    "RepKind",
    "RepWindow",
    "SizeCapError",
    "build_prime_table",
    "compute_window",
    "von_mangoldt",
]
