"""Circle-method integrals over ``[-1/2, 1/2]``.

Two regimes. Full-circle integrals of truncated series are never
quadratured: by orthogonality they are sums of Fourier coefficients of a
trigonometric polynomial, obtained from an exact (FFT) product. Partial arcs
such as ``[-B/H, B/H]`` use composite Gauss-Legendre panels aligned to a
power-of-two lattice, so series factors can be evaluated on all panels at
once with one inverse FFT per node offset.
"""

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np
import scipy.fft
from numpy.polynomial.legendre import leggauss
from scipy.special import expi

from ._phase import unit_phase
from .errors import PreconditionError, QuadratureError, SizeCapError
from .expsums import (
    CircleParams,
    damped_square_sum,
    dual_decay_freq,
    exp_sum,
    lattice_values,
    omega_terms,
    s_tilde_series,
    t_tilde_series,
    u_kernel,
)
from .repcount import RepKind, compute_window

GL_NODES = 16
DENSE_THRESHOLD = 4096
MAX_SPAN = 1 << 27
EXACT_PATH_MAX_N = 10 ** 5
THEOREMS = ("T1", "T2", "T3", "T4")
_DIRECT_TAIL_TERMS = 8
J_DIAGNOSTIC_RTOL = 1e-6


class TrigPolynomial:
    """Sparse finite Fourier series ``sum_k c_k e(k alpha)``.

    Frequencies are kept sorted and unique; coefficients may be real or
    complex.
    """

    def __init__(self, freqs, coeffs):
        freqs = np.asarray(freqs, dtype=np.int64)
        coeffs = np.asarray(coeffs)
        if len(freqs) and np.any(np.diff(freqs) <= 0):
            freqs, coeffs = _combine(freqs, coeffs)
        self.freqs = freqs
        self.coeffs = coeffs

    @classmethod
    def from_series(cls, series):
        return cls(series.freqs, series.coeffs)

    @classmethod
    def monomial(cls, k, c=1.0):
        return cls(np.array([k]), np.array([c]))

    def __len__(self):
        return len(self.freqs)

    def __repr__(self):
        return f"TrigPolynomial(terms={len(self)}, degree={self.degree})"

    @property
    def degree(self):
        return int(np.abs(self.freqs).max()) if len(self.freqs) else 0

    @property
    def terms(self):
        return dict(zip(self.freqs.tolist(), self.coeffs.tolist()))

    @property
    def is_real(self):
        return not np.iscomplexobj(self.coeffs)

    def conj(self):
        """The polynomial whose value at alpha is the conjugate of this one's."""
        return TrigPolynomial(-self.freqs[::-1], np.conj(self.coeffs[::-1]))

    def __sub__(self, other):
        return TrigPolynomial(
            np.concatenate([self.freqs, other.freqs]),
            np.concatenate([self.coeffs, -other.coeffs]),
        )

    def coefficients(self, ks):
        """Coefficients at the integer frequencies ``ks`` (zero where absent)."""
        ks = np.asarray(ks, dtype=np.int64)
        pos = np.searchsorted(self.freqs, ks)
        pos_c = np.minimum(pos, max(len(self.freqs) - 1, 0))
        hit = (pos < len(self.freqs)) & (self.freqs[pos_c] == ks) if len(self.freqs) else np.zeros(ks.shape, bool)
        out = np.zeros(ks.shape, dtype=self.coeffs.dtype if len(self.coeffs) else float)
        out[hit] = self.coeffs[pos_c[hit]]
        return out

    def coefficient(self, k):
        return self.coefficients(np.array([k]))[0]

    def dense(self, lo, hi):
        """Coefficient array for frequencies ``lo..hi`` inclusive."""
        out = np.zeros(hi - lo + 1, dtype=self.coeffs.dtype)
        m = (self.freqs >= lo) & (self.freqs <= hi)
        out[self.freqs[m] - lo] = self.coeffs[m]
        return out

    def band(self, lo, hi):
        m = (self.freqs >= lo) & (self.freqs <= hi)
        return TrigPolynomial(self.freqs[m], self.coeffs[m])

    def window_sum(self, N, H):
        """``sum_{n=N+1}^{N+H} c_n``, the full-circle integral of ``P U(-a,H) e(-Na)``."""
        return math.fsum(np.real(self.coefficients(np.arange(N + 1, N + H + 1))))

    def shifted_window(self, N, H):
        """The trigonometric polynomial ``P(alpha) U(-alpha, H) e(-N alpha)``."""
        if not len(self.freqs):
            return TrigPolynomial([], [])
        lo, hi = int(self.freqs[0]), int(self.freqs[-1])
        s = self.dense(lo, hi)
        csum = np.concatenate([[0], np.cumsum(s)])
        k = np.arange(lo - N - H, hi - N, dtype=np.int64)
        first = np.clip(k + N + 1 - lo, 0, len(s))
        last = np.clip(k + N + H + 1 - lo, 0, len(s))
        return TrigPolynomial(k, csum[last] - csum[first])

    def __call__(self, alpha):
        return exp_sum(self.freqs, self.coeffs, alpha)

    def lattice(self, M, delta, c_lo, c_hi):
        return lattice_values(self.freqs, self.coeffs, M, delta, c_lo, c_hi)


def _combine(freqs, coeffs):
    uniq, inv = np.unique(freqs, return_inverse=True)
    if np.iscomplexobj(coeffs):
        c = np.bincount(inv, weights=coeffs.real, minlength=len(uniq)) + 1j * np.bincount(
            inv, weights=coeffs.imag, minlength=len(uniq)
        )
    else:
        c = np.bincount(inv, weights=coeffs, minlength=len(uniq))
    return uniq, c


def _as_poly(p):
    return p if isinstance(p, TrigPolynomial) else TrigPolynomial.from_series(p)


def multiply_series(a, b, method="auto", band=None):
    """Exact product of two trigonometric polynomials.

    Parameters
    ----------
    a, b : TrigPolynomial or TruncatedSeries
    method : {"auto", "direct", "fft"}
        ``auto`` uses a dense FFT convolution once the combined degree exceeds
        4096 and the sparse outer product otherwise.
    band : (int, int), optional
        Keep only output frequencies in this closed range.

    Returns
    -------
    TrigPolynomial
        Supported exactly on the sumset of the input supports.
    """
    a, b = _as_poly(a), _as_poly(b)
    if not len(a) or not len(b):
        return TrigPolynomial([], [])
    span = int(a.freqs[-1] - a.freqs[0]) + int(b.freqs[-1] - b.freqs[0]) + 1
    if span > MAX_SPAN:
        raise SizeCapError(f"product span {span} exceeds {MAX_SPAN}")
    if method == "auto":
        small = len(a) * len(b) <= DENSE_THRESHOLD
        method = "fft" if (a.degree + b.degree > DENSE_THRESHOLD and not small) else "direct"
    if method == "direct":
        out = _multiply_direct(a, b)
    elif method == "fft":
        out = _multiply_fft(a, b, span)
    else:
        raise ValueError(f"unknown method {method!r}")
    return out.band(*band) if band is not None else out


def _multiply_direct(a, b, block=1 << 22):
    rows = max(1, block // len(b))
    parts_f, parts_c = [], []
    for i in range(0, len(a), rows):
        f = (a.freqs[i : i + rows, None] + b.freqs[None, :]).ravel()
        c = (a.coeffs[i : i + rows, None] * b.coeffs[None, :]).ravel()
        f, c = _combine(f, c)
        parts_f.append(f)
        parts_c.append(c)
    return TrigPolynomial(np.concatenate(parts_f), np.concatenate(parts_c))


def _multiply_fft(a, b, span):
    lo = int(a.freqs[0] + b.freqs[0])
    da = a.dense(int(a.freqs[0]), int(a.freqs[-1]))
    db = b.dense(int(b.freqs[0]), int(b.freqs[-1]))
    size = scipy.fft.next_fast_len(span, real=True)
    if a.is_real and b.is_real:
        prod = scipy.fft.irfft(scipy.fft.rfft(da, size) * scipy.fft.rfft(db, size), size)[:span]
    else:
        prod = scipy.fft.ifft(scipy.fft.fft(da, size) * scipy.fft.fft(db, size))[:span]
    # exact support: convolve the 0/1 indicators and round the integer counts
    ia = np.zeros(len(da))
    ia[a.freqs - a.freqs[0]] = 1.0
    ib = np.zeros(len(db))
    ib[b.freqs - b.freqs[0]] = 1.0
    counts = scipy.fft.irfft(scipy.fft.rfft(ia, size) * scipy.fft.rfft(ib, size), size)[:span]
    idx = np.flatnonzero(counts > 0.5)
    return TrigPolynomial(lo + idx, prod[idx])


class IdentityResult(NamedTuple):
    lhs: float
    rhs: float

    @property
    def abs_diff(self):
        return abs(self.lhs - self.rhs)

    @property
    def rel_diff(self):
        return self.abs_diff / max(abs(self.lhs), 1.0)

    def as_dict(self):
        return {"lhs": self.lhs, "rhs": self.rhs, "abs_diff": self.abs_diff, "rel_diff": self.rel_diff}


def generating_factors(kind, N, tol, table):
    """The two series whose product generates ``e^{-n/N} r(n)`` for ``kind``."""
    kind = RepKind.parse(kind)
    if kind is RepKind.TWO_PRIME_SQUARES:
        t = t_tilde_series(2, N, tol, table)
        return t, t
    if kind is RepKind.PRIME_SQUARE_PLUS_SQUARE:
        return t_tilde_series(2, N, tol, table), omega_terms(2, N, tol)
    w = omega_terms(2, N, tol)
    return w, w


def full_circle_identity(kind, N, H, tol, table):
    """Both sides of ``sum e^{-n/N} r(n) = int F(a) U(-a,H) e(-Na) da``.

    The left side comes from the windowed enumeration; the right side is the
    window sum of Fourier coefficients of the product of the two generating
    series (``T~_2**2``, ``T~_2 omega`` or ``omega**2``). All generating
    frequencies are positive, so terms beyond ``N + H`` cannot reach the
    window and are dropped before the FFT product.
    """
    N, H = int(N), int(H)
    if N > EXACT_PATH_MAX_N:
        raise SizeCapError(f"exact identity path is capped at N <= {EXACT_PATH_MAX_N}")
    lhs = compute_window(kind, N, H, table).exp_weighted_sum
    f, g = generating_factors(kind, N, tol, table)
    top = N + H
    prod = multiply_series(
        _as_poly(f).band(0, top), _as_poly(g).band(0, top), band=(N + 1, N + H)
    )
    return IdentityResult(lhs, prod.window_sum(N, H))


# ---------------------------------------------------------------------------
# lattice-evaluable integrands


class Pointwise:
    """Wrap a closed-form vectorised function of alpha."""

    def __init__(self, fn):
        self.fn = fn

    def __call__(self, alpha):
        return self.fn(np.asarray(alpha, dtype=np.float64))

    def lattice(self, M, delta, c_lo, c_hi):
        return self.fn(np.arange(c_lo, c_hi, dtype=np.float64) / M + delta)


class Product:
    def __init__(self, *factors):
        self.factors = [as_integrand(f) for f in factors]

    def __call__(self, alpha):
        out = 1.0
        for f in self.factors:
            out = out * f(alpha)
        return out

    def lattice(self, M, delta, c_lo, c_hi):
        seen = {}
        out = 1.0
        for f in self.factors:
            key = id(f)
            if key not in seen:
                seen[key] = f.lattice(M, delta, c_lo, c_hi)
            out = out * seen[key]
        return out


class Difference:
    def __init__(self, f, g):
        self.f, self.g = as_integrand(f), as_integrand(g)

    def __call__(self, alpha):
        return self.f(alpha) - self.g(alpha)

    def lattice(self, M, delta, c_lo, c_hi):
        return self.f.lattice(M, delta, c_lo, c_hi) - self.g.lattice(M, delta, c_lo, c_hi)


class Modulus:
    """``|f|**power``."""

    def __init__(self, f, power=1):
        self.f, self.power = as_integrand(f), power

    def __call__(self, alpha):
        return np.abs(self.f(alpha)) ** self.power

    def lattice(self, M, delta, c_lo, c_hi):
        return np.abs(self.f.lattice(M, delta, c_lo, c_hi)) ** self.power


class OmegaTail:
    """``sum_{k>=1} exp(-k^2 pi^2 / z)`` on quadrature nodes.

    Summed directly where at most 8 terms matter; elsewhere (small Y) taken
    from the theta functional equation
    ``((z/pi)**(1/2) (1 + 2 omega(alpha)) - 1) / 2`` using lattice values of
    the truncated omega series.
    """

    def __init__(self, N, omega, tol=1e-15):
        self.N, self.omega, self.tol = N, omega, tol

    def _split(self, alpha):
        params = CircleParams(self.N, alpha)
        decay, freq = dual_decay_freq(params)
        direct = decay * _DIRECT_TAIL_TERMS ** 2 >= 45.0
        return params, decay, freq, direct

    def _combine(self, alpha, omega_vals):
        params, decay, freq, direct = self._split(alpha)
        out = np.empty(alpha.shape, dtype=np.complex128)
        if direct.any():
            out[direct], _ = damped_square_sum(decay[direct], freq[direct], self.tol)
        far = ~direct
        if far.any():
            w = omega_vals(far)
            root = np.sqrt(params.z[far] / np.pi)
            out[far] = 0.5 * (root * (1.0 + 2.0 * w) - 1.0)
        return out

    def __call__(self, alpha):
        alpha = np.atleast_1d(np.asarray(alpha, dtype=np.float64))
        return self._combine(alpha, lambda m: self.omega(alpha[m]))

    def lattice(self, M, delta, c_lo, c_hi):
        alpha = np.arange(c_lo, c_hi, dtype=np.float64) / M + delta
        cache = {}

        def omega_vals(mask):
            if "all" not in cache:
                cache["all"] = self.omega.lattice(M, delta, c_lo, c_hi)
            return cache["all"][mask]

        return self._combine(alpha, omega_vals)


def as_integrand(f):
    return f if hasattr(f, "lattice") else Pointwise(f)


@lru_cache(maxsize=None)
def _gauss_legendre(n):
    x, w = leggauss(n)
    return x, w


def _panel_sum(f, a, b, M):
    x, w = _gauss_legendre(GL_NODES)
    c_lo = math.ceil(a * M)
    c_hi = math.floor(b * M)
    total = 0j
    edges = []
    if c_lo < c_hi:
        h = 1.0 / M
        for xj, wj in zip(x, w):
            delta = 0.5 * h * (xj + 1.0)
            vals = f.lattice(M, delta, c_lo, c_hi)
            total += 0.5 * h * wj * np.sum(vals)
        if a < c_lo / M:
            edges.append((a, c_lo / M))
        if c_hi / M < b:
            edges.append((c_hi / M, b))
    else:
        edges.append((a, b))
    for p, q in edges:
        nodes = 0.5 * (p + q) + 0.5 * (q - p) * x
        total += 0.5 * (q - p) * np.sum(w * f(nodes))
    return complex(total)


def panel_count(a, b, bandwidth):
    """Number of lattice panels the first pass of :func:`integrate_arc` uses."""
    M = _initial_lattice(bandwidth)
    return max(1, math.floor(b * M) - math.ceil(a * M)) , M


def _initial_lattice(bandwidth):
    return 1 << max(4, math.ceil(math.log2(max(4.0 * bandwidth, 1.0))))


def integrate_arc(f, a, b, bandwidth, tol, max_refine=5):
    """Composite Gauss-Legendre integral of ``f`` over ``[a, b]``.

    Panels have width ``1/M`` with ``M`` the first power of two at least
    ``4 * bandwidth``, 16 nodes each. The panel width is halved until two
    successive values differ by at most ``tol``; the finer value is returned.

    Parameters
    ----------
    f : callable or lattice integrand
        Vectorised in alpha. Objects with a ``lattice(M, delta, c_lo, c_hi)``
        method are evaluated on whole node columns at once.
    a, b : float
        ``-1/2 <= a < b <= 1/2``.
    bandwidth : float
        Largest frequency present in the integrand.
    tol : float
        Absolute convergence threshold.

    Raises
    ------
    QuadratureError
        If ``max_refine`` halvings do not converge; ``history`` holds the
        ``(M, value)`` sequence.
    """
    if not (-0.5 <= a < b <= 0.5):
        raise ValueError("integrate_arc needs -1/2 <= a < b <= 1/2")
    f = as_integrand(f)
    M = _initial_lattice(bandwidth)
    prev = _panel_sum(f, a, b, M)
    history = [(M, prev)]
    for _ in range(max_refine):
        M *= 2
        cur = _panel_sum(f, a, b, M)
        history.append((M, cur))
        if abs(cur - prev) <= tol:
            return cur
        prev = cur
    raise QuadratureError(
        f"no convergence on [{a}, {b}] after {max_refine} halvings "
        f"(last change {abs(history[-1][1] - history[-2][1]):.3e} > tol {tol:.3e})",
        history,
    )


def arc_integral_trig(poly, a, b):
    """Exact ``int_a^b sum_k c_k e(k alpha) d alpha`` for a trigonometric polynomial."""
    poly = _as_poly(poly)
    k, c = poly.freqs, poly.coeffs
    zero = k == 0
    total = complex(np.sum(c[zero])) * (b - a)
    k, c = k[~zero], c[~zero]
    if len(k):
        mag, sgn = np.abs(k), np.sign(k)
        eb = unit_phase(mag, sgn * b)
        ea = unit_phase(mag, sgn * a)
        total += complex(np.sum(c * (eb - ea) / (2j * np.pi * k)))
    return total


def full_circle_mean_square(poly):
    """``int_{-1/2}^{1/2} |P|^2`` as the zero coefficient of ``P * conj(P)``."""
    poly = _as_poly(poly)
    return float(np.real(multiply_series(poly, poly.conj(), band=(0, 0)).coefficient(0)))


def mean_square(f, xi, tol, bandwidth):
    """``int_{-xi}^{xi} |f|^2``, computed as ``2 int_0^xi |f|^2`` (f conjugate-symmetric)."""
    if not 0 < xi <= 0.5:
        raise ValueError("xi must lie in (0, 1/2]")
    val = integrate_arc(Modulus(f, 2), 0.0, xi, bandwidth, tol / 2.0)
    return 2.0 * val.real


def _cumulative_panels(f, xis, M):
    x, w = _gauss_legendre(GL_NODES)
    top = max(xis)
    c_hi = math.floor(top * M)
    h = 1.0 / M
    panels = np.zeros(c_hi, dtype=np.complex128)
    for xj, wj in zip(x, w):
        panels += 0.5 * h * wj * f.lattice(M, 0.5 * h * (xj + 1.0), 0, c_hi)
    csum = np.concatenate([[0.0], np.cumsum(panels.real)])
    out = []
    for xi in xis:
        c = math.floor(xi * M)
        val = csum[c]
        if xi > c / M:
            p = c / M
            nodes = 0.5 * (p + xi) + 0.5 * (xi - p) * x
            val += 0.5 * (xi - p) * float(np.sum(w * np.real(f(nodes))))
        out.append(val)
    return np.array(out)


def mean_square_profile(f, xis, tol, bandwidth, max_refine=5):
    """``int_{-xi}^{xi} |f|^2`` for several xi from one cumulative panel pass.

    Same panel rule and halving test as :func:`integrate_arc`, applied to
    all xi simultaneously. ``bandwidth`` is the largest frequency of f;
    ``|f|**2`` has the same one for a one-sided series.
    """
    xis = [float(v) for v in xis]
    if not xis:
        return np.empty(0)
    if not all(0 < v <= 0.5 for v in xis):
        raise ValueError("every xi must lie in (0, 1/2]")
    g = Modulus(f, 2)
    M = _initial_lattice(bandwidth)
    prev = _cumulative_panels(g, xis, M)
    history = [(M, prev)]
    for _ in range(max_refine):
        M *= 2
        cur = _cumulative_panels(g, xis, M)
        history.append((M, cur))
        if np.max(np.abs(cur - prev)) <= tol / 2.0:
            return 2.0 * cur
        prev = cur
    raise QuadratureError("mean-square profile did not converge", history)


def inverse_z_coefficient(n, N, beta=0.5):
    """``int_{-beta}^{beta} z^{-1} e(-n alpha) d alpha`` in closed form.

    Substituting ``w = 1/N - 2 pi i alpha`` gives
    ``e^{-n/N} Im Ei(n/N + 2 pi i beta n) / pi`` for n >= 1.
    """
    n = np.asarray(n, dtype=np.float64)
    u = n / N + 2j * np.pi * beta * n
    return np.exp(-n / N) * np.imag(expi(u)) / np.pi


def arc_cut_B(N, c):
    """B(N, c) = exp(c (L / log L)**(1/3)), L = log N."""
    L = math.log(N)
    return math.exp(c * (L / math.log(L)) ** (1.0 / 3.0))


def default_A(N):
    """A = L**2 / log L, L = log N."""
    L = math.log(N)
    return L * L / math.log(L)


@dataclass
class ArcDecomposition:
    """Numeric values of the proof pieces for one ``(theorem, N, H)``."""

    theorem: str
    N: int
    H: int
    c_or_A: float
    B: float
    I: list
    window_sum: float
    main_term: float
    J: tuple = None
    wall_time_s: float = 0.0
    notes: dict = field(default_factory=dict)

    @property
    def reconstruction(self):
        return math.fsum(v.real for v in self.I)

    @property
    def closure_error(self):
        return abs(self.reconstruction - self.window_sum) / max(abs(self.window_sum), 1.0)

    def as_dict(self):
        out = {
            "theorem": self.theorem,
            "N": self.N,
            "H": self.H,
            "c_or_A": self.c_or_A,
            "B": self.B,
            "I": [{"re": v.real, "im": v.imag} for v in self.I],
            "closure_error": self.closure_error,
            "main_term": self.main_term,
        }
        if self.J is not None:
            out["J"] = [{"re": complex(v).real, "im": complex(v).imag} for v in self.J]
        return out

    def to_json(self):
        return json.dumps(self.as_dict())


def _window_kernel(N, H):
    """``U(-alpha, H) e(-N alpha)`` as a pointwise factor."""
    return Pointwise(lambda a: u_kernel(-a, H) * unit_phase(N, -a))


def _z(a, N):
    return 1.0 / N - 2j * np.pi * a


def decompose(theorem, N, H, c_or_A, tol, table, with_j=False, quad_tol=None):
    """Evaluate every piece of the circle-method splitting for one theorem.

    ``T1``: full circle, ``I0 + I1 + I2``. ``T2``: arc ``|alpha| <= B/H`` with
    ``B = arc_cut_B(N, c)``, ``I0 + ... + I3``. ``T3``: arc ``A/H`` (``c_or_A``
    is A; ``None`` means ``L**2/log L``), ``I0 + ... + I4``. ``T4``: as T3 on the
    arc ``B/H``.

    Full-circle pieces are exact coefficient extractions (``I0``, the minor
    arc pieces as full circle minus the exact arc integral of a
    trigonometric polynomial, and T1's ``I1`` through the exponential
    integral). Arc pieces involving ``z`` powers use :func:`integrate_arc`.

    Returns
    -------
    ArcDecomposition
        ``window_sum`` is the independent exp-weighted enumeration, so
        ``closure_error`` measures all numerical error at once.
    """
    import time

    t0 = time.perf_counter()
    theorem = str(theorem).upper()
    if theorem not in THEOREMS:
        raise ValueError(f"theorem must be one of {THEOREMS}")
    N, H = int(N), int(H)
    if N > EXACT_PATH_MAX_N:
        raise SizeCapError(f"decomposition is capped at N <= {EXACT_PATH_MAX_N}")
    if H < 1:
        raise ValueError("H must be >= 1")
    if quad_tol is None:
        quad_tol = max(tol, 1e-13) * max(1.0, float(H))
    two_primes = theorem in ("T1", "T2")
    kind = RepKind.TWO_PRIME_SQUARES if two_primes else RepKind.PRIME_SQUARE_PLUS_SQUARE
    window = compute_window(kind, N, H, table)
    n = window.n
    main_term = math.pi / 4.0 * math.fsum(np.exp(-n / N))

    S = TrigPolynomial.from_series(s_tilde_series(2, N, tol, table))
    T = TrigPolynomial.from_series(t_tilde_series(2, N, tol, table))
    kern = _window_kernel(N, H)
    lo_band = (N + 1, N + H)

    cut, c_or_A_out = 0.0, c_or_A
    if theorem in ("T2", "T4"):
        c = 0.1 if c_or_A is None else float(c_or_A)
        cut, c_or_A_out = arc_cut_B(N, c), c
    elif theorem == "T3":
        cut = default_A(N) if c_or_A is None else float(c_or_A)
        c_or_A_out = cut
        if not 1.0 < cut < H / 2.0:
            raise PreconditionError(f"T3 needs 1 < A < H/2, got A={cut:.4g}, H={H}")
    beta = cut / H
    if theorem != "T1" and not 0 < beta < 0.5:
        raise PreconditionError(f"arc cut {cut:.4g}/H = {beta:.4g} outside (0, 1/2)")

    J = None
    if two_primes:
        SS = multiply_series(S, S)
        TT = multiply_series(T, T, band=lo_band)
        I0 = TT.window_sum(N, H) - SS.window_sum(N, H)
        bw = 2 * S.degree + H
        E2 = Difference(S, Pointwise(lambda a: math.sqrt(math.pi) / (2.0 * np.sqrt(_z(a, N)))))
        if theorem == "T1":
            I1 = math.pi / 4.0 * math.fsum(inverse_z_coefficient(n, N))
            I2 = SS.window_sum(N, H) - I1
            pieces = [I0, I1, I2]
            if with_j:
                # |U| has kinks at its zeros, so these converge slowly; they are
                # magnitude diagnostics and get a looser tolerance
                absU = Pointwise(lambda a: np.abs(u_kernel(a, H)))
                j_tol = J_DIAGNOSTIC_RTOL * H * math.sqrt(N)
                J = (
                    2.0 * integrate_arc(Product(Modulus(E2), absU, Pointwise(lambda a: np.abs(_z(a, N)) ** -0.5)),
                                        0.0, 0.5, bw, j_tol).real,
                    2.0 * integrate_arc(Product(Modulus(E2, 2), absU), 0.0, 0.5, bw, j_tol).real,
                )
        else:
            main = Pointwise(lambda a: math.pi / (4.0 * _z(a, N)))
            I1 = integrate_arc(Product(main, kern), -beta, beta, N + H, quad_tol)
            I2 = integrate_arc(Product(Difference(Product(S, S), main), kern), -beta, beta, bw, quad_tol)
            shifted = SS.shifted_window(N, H)
            I3 = SS.window_sum(N, H) - arc_integral_trig(shifted, -beta, beta)
            pieces = [I0, I1, I2, I3]
            if with_j:
                J = (
                    integrate_arc(Product(Modulus(E2), Pointwise(lambda a: np.abs(_z(a, N)) ** -0.5)),
                                  -beta, beta, bw, quad_tol).real,
                    integrate_arc(Modulus(E2, 2), -beta, beta, bw, quad_tol).real,
                )
    else:
        W = omega_terms(2, N, tol)
        Wp = TrigPolynomial.from_series(W)
        Sw = multiply_series(S, Wp)
        I0 = multiply_series(T - S, Wp, band=lo_band).window_sum(N, H)
        bw = S.degree + Wp.degree + H
        main = Pointwise(
            lambda a: math.pi / (4.0 * _z(a, N)) - math.sqrt(math.pi) / (4.0 * np.sqrt(_z(a, N)))
        )
        E2 = Difference(S, Pointwise(lambda a: math.sqrt(math.pi) / (2.0 * np.sqrt(_z(a, N)))))
        I1 = integrate_arc(Product(main, kern), -beta, beta, N + H, quad_tol)
        I2 = integrate_arc(Product(E2, W, kern), -beta, beta, bw, quad_tol)
        tail = OmegaTail(N, W)
        I3 = integrate_arc(
            Product(Pointwise(lambda a: math.pi / (2.0 * _z(a, N))), tail, kern), -beta, beta, bw, quad_tol
        )
        I4 = Sw.window_sum(N, H) - arc_integral_trig(Sw.shifted_window(N, H), -beta, beta)
        pieces = [I0, I1, I2, I3, I4]
        if with_j and theorem == "T4":
            J = (
                integrate_arc(Modulus(E2, 2), -beta, beta, bw, quad_tol).real,
                integrate_arc(Modulus(W, 2), -beta, beta, bw, quad_tol).real,
            )

    return ArcDecomposition(
        theorem=theorem,
        N=N,
        H=H,
        c_or_A=c_or_A_out if c_or_A_out is not None else float("nan"),
        B=cut,
        I=[complex(v) for v in pieces],
        window_sum=window.exp_weighted_sum,
        main_term=main_term,
        J=J,
        wall_time_s=time.perf_counter() - t0,
    )
