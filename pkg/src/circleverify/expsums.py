"""Generating functions on the unit circle.

Every infinite series here has a factor ``exp(-n**l / N)``; it is truncated
once ``n**l / N`` passes ``45 + log(coefficient scale)`` (and the requested
tolerance), and a geometric majorant bounds what was dropped. Phases are
reduced exactly (see ``_phase``) so the truncated sums are accurate to
rounding.

Conventions: ``e(x) = exp(2 pi i x)``, ``z = 1/N - 2 pi i alpha``,
``Y = Re(1/z)``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._phase import reduced_phase, unit_phase
from .errors import PreconditionError

CUTOFF_EXPONENT = 45.0
_BLOCK = 1 << 21  # phase-matrix entries per block
_LATTICE_FFT_RATIO = 4.0  # direct entries per FFT butterfly at equal cost, measured


@dataclass(frozen=True)
class CircleParams:
    """A point (or array of points) ``alpha`` on the circle at weight scale N."""

    N: int
    alpha: float

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")
        a = np.asarray(self.alpha, dtype=np.float64)
        if np.any(np.abs(a) > 0.5):
            raise ValueError("alpha must lie in [-1/2, 1/2]")

    @property
    def z(self):
        return 1.0 / self.N - 2j * np.pi * np.asarray(self.alpha, dtype=np.float64)

    @property
    def Y(self):
        a = np.asarray(self.alpha, dtype=np.float64)
        return self.N / (1.0 + 4.0 * np.pi ** 2 * a ** 2 * float(self.N) ** 2)

    @property
    def abs_z2(self):
        a = np.asarray(self.alpha, dtype=np.float64)
        return (1.0 / self.N) ** 2 + (2.0 * np.pi * a) ** 2


def exp_sum(freqs, coeffs, alpha):
    """``sum_k coeffs[k] * e(freqs[k] * alpha)`` for a scalar or array alpha.

    The sum is evaluated in blocks of alpha so the phase matrix stays bounded
    in memory.
    """
    freqs = np.asarray(freqs, dtype=np.int64)
    coeffs = np.asarray(coeffs)
    alpha = np.asarray(alpha, dtype=np.float64)
    flat = alpha.ravel()
    out = np.empty(flat.shape, dtype=np.complex128)
    step = max(1, _BLOCK // max(len(freqs), 1))
    real = not np.iscomplexobj(coeffs)
    mag = np.abs(freqs)[None, :]
    sgn = np.sign(freqs)[None, :]
    for i in range(0, len(flat), step):
        r = sgn * reduced_phase(mag, flat[i : i + step, None])
        t = 2.0 * np.pi * r
        if real:
            out[i : i + step] = np.cos(t) @ coeffs + 1j * (np.sin(t) @ coeffs)
        else:
            out[i : i + step] = (np.cos(t) + 1j * np.sin(t)) @ coeffs
    return out.reshape(alpha.shape) if alpha.ndim else complex(out[0])


def _geometric_tail(n0, ell, N, log_weight):
    """Bound on ``sum_{n > n0} w(n) exp(-n**ell / N)`` with w = log or 1."""
    n1 = n0 + 1
    q = math.exp(-((n1 + 1) ** ell - n1 ** ell) / N)
    first = math.exp(-(n1 ** ell) / N)
    if log_weight:
        q *= math.log(n1 + 1) / math.log(n1)
        first *= math.log(n1)
    if q >= 1.0:
        return math.inf
    return first / (1.0 - q)


def series_cutoff(ell, N, tol, log_weight=True):
    """Largest base ``n`` kept in a truncated series and the tail bound.

    Starts from ``ceil((N log(N**(1/ell) L / tol))**(1/ell))``, raises it to
    satisfy ``n**ell / N >= 45 + log(scale)``, then grows it until the
    geometric tail bound is at most ``tol``.
    """
    if not 0 < tol <= 1e-6:
        raise ValueError("tol must lie in (0, 1e-6]")
    if ell < 1:
        raise ValueError("ell must be >= 1")
    L = max(math.log(N), 1.0)
    n = math.ceil((N * math.log(N ** (1.0 / ell) * L / tol)) ** (1.0 / ell))
    scale = math.log(max(n, 3)) if log_weight else 1.0
    n = max(n, math.ceil((N * (CUTOFF_EXPONENT + math.log(scale))) ** (1.0 / ell)))
    n = max(n, 3)
    bound = _geometric_tail(n, ell, N, log_weight)
    while bound > tol:
        n = int(n * 1.02) + 1
        bound = _geometric_tail(n, ell, N, log_weight)
    return n, bound


@dataclass
class TruncatedSeries:
    """A finite trigonometric polynomial standing in for a damped series.

    ``freqs[k] = base[k]**ell`` and ``coeffs[k]`` already include the damping
    factor; ``tail_bound`` bounds the absolute sum of the dropped terms.
    """

    freqs: np.ndarray = field(repr=False)
    coeffs: np.ndarray = field(repr=False)
    cutoff: int
    tail_bound: float
    ell: int = 1
    N: int = 1
    label: str = ""

    @property
    def terms(self):
        return dict(zip(self.freqs.tolist(), self.coeffs.tolist()))

    @property
    def degree(self):
        return int(self.freqs.max()) if len(self.freqs) else 0

    def __call__(self, alpha):
        return exp_sum(self.freqs, self.coeffs, alpha)

    def lattice(self, M, delta, c_lo, c_hi):
        """Values at ``alpha = c/M + delta`` for integers ``c_lo <= c < c_hi``."""
        return lattice_values(self.freqs, self.coeffs, M, delta, c_lo, c_hi)


def lattice_values(freqs, coeffs, M, delta, c_lo, c_hi):
    """Trigonometric polynomial on the shifted lattice ``c/M + delta``.

    ``e(f (c/M + delta)) = e(f delta) e((f c mod M) / M)``: the first factor is
    folded into the coefficients once, the second is an exact integer
    residue. Small blocks use the residue matrix directly; large ones bin the
    coefficients by ``f mod M`` and take one length-M inverse FFT.
    """
    count = c_hi - c_lo
    if count <= 0:
        return np.empty(0, dtype=np.complex128)
    freqs = np.asarray(freqs, dtype=np.int64)
    w = np.asarray(coeffs) * unit_phase(np.abs(freqs), np.sign(freqs) * delta)
    res = freqs % M
    if count * len(freqs) <= _LATTICE_FFT_RATIO * M * max(1, int(M).bit_length()):
        # c = base + j: e(r c/M) = e(r base/M) e(r j/M), one matrix product
        J = max(1, math.isqrt(count))
        bases = np.arange(c_lo, c_hi, J, dtype=np.int64) % M
        inner = _residue_phases(np.arange(J, dtype=np.int64), res, M)
        outer = _residue_phases(bases, res, M) * w[None, :]
        vals = (outer @ inner.T).ravel()
        return vals[:count]
    bins = np.bincount(res, weights=w.real, minlength=M) + 1j * np.bincount(
        res, weights=w.imag, minlength=M
    )
    full = np.fft.ifft(bins) * M
    return full[np.arange(c_lo, c_hi) % M]


def _residue_phases(c, res, M):
    """Matrix ``e((c_i * res_k mod M) / M)`` with exact integer residues."""
    t = (2.0 * np.pi / M) * ((c[:, None] * res[None, :]) % M)
    return np.cos(t) + 1j * np.sin(t)


def _check_table(table, cutoff):
    if table.limit < cutoff:
        raise PreconditionError(
            f"sieve limit {table.limit} too small: truncation needs primes up to {cutoff}"
        )


def s_tilde_series(ell, N, tol, table):
    """Truncated ``sum_n Lambda(n) exp(-n**ell/N) e(n**ell alpha)``."""
    cutoff, bound = series_cutoff(ell, N, tol, log_weight=True)
    _check_table(table, cutoff)
    n, lam = table.prime_powers(cutoff)
    return _build(n, lam, ell, N, cutoff, bound, "S~")


def t_tilde_series(ell, N, tol, table):
    """Truncated ``sum_p log p exp(-p**ell/N) e(p**ell alpha)``."""
    cutoff, bound = series_cutoff(ell, N, tol, log_weight=True)
    _check_table(table, cutoff)
    p = table.primes[table.primes <= cutoff]
    return _build(p, np.log(p.astype(np.float64)), ell, N, cutoff, bound, "T~")


def omega_terms(ell, N, tol):
    """Truncated ``sum_{m >= 1} exp(-m**ell/N) e(m**ell alpha)``."""
    cutoff, bound = series_cutoff(ell, N, tol, log_weight=False)
    m = np.arange(1, cutoff + 1, dtype=np.int64)
    return _build(m, np.ones(len(m)), ell, N, cutoff, bound, "omega")


def _build(base, weights, ell, N, cutoff, bound, label):
    base = np.asarray(base, dtype=np.int64)
    f = base ** ell
    if len(f) and int(base[-1]) ** ell >= 1 << 48:
        raise OverflowError("series frequencies exceed the exact-phase range")
    damp = np.exp(-(base.astype(np.float64) ** ell) / N)
    return TruncatedSeries(f, weights * damp, cutoff, bound, ell, N, label)


def s_tilde(ell, params, tol, table):
    """S~_l(alpha) with truncation error at most ``tol``."""
    return s_tilde_series(ell, params.N, tol, table)(params.alpha)


def t_tilde(ell, params, tol, table):
    """T~_l(alpha): as :func:`s_tilde` but over primes only."""
    return t_tilde_series(ell, params.N, tol, table)(params.alpha)


def omega_series(ell, params, tol):
    """omega_l(alpha); ``ell = 1`` is evaluated but no bound is claimed for it."""
    return omega_terms(ell, params.N, tol)(params.alpha)


def u_kernel(alpha, H):
    """U(alpha, H) = sum_{1 <= m <= H} e(m alpha) in closed form.

    ``e((H+1) alpha/2) sin(pi H alpha) / sin(pi alpha)``, with both large
    arguments reduced exactly; equals H at alpha = 0.
    """
    H = int(H)
    if H < 1:
        raise ValueError("H must be >= 1")
    alpha = np.asarray(alpha, dtype=np.float64)
    half = alpha / 2.0
    rot = unit_phase(H + 1, half)
    num = np.sin(2.0 * np.pi * reduced_phase(H, half))
    den = np.sin(np.pi * alpha)
    zero = alpha == 0
    ratio = np.where(zero, float(H), num / np.where(zero, 1.0, den))
    out = rot * ratio
    return complex(out) if out.ndim == 0 else out


def gamma_factor(ell, params):
    """Gamma(1/l) / (l z**(1/l)) on the principal branch (Re z > 0)."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    out = math.gamma(1.0 / ell) / (ell * params.z ** (1.0 / ell))
    return complex(out) if np.ndim(out) == 0 else out


def e_tilde(ell, params, tol, table):
    """E~_l(alpha) = S~_l(alpha) - Gamma(1/l)/(l z**(1/l))."""
    return s_tilde(ell, params, tol, table) - gamma_factor(ell, params)


def damped_square_sum(decay, freq, tol):
    """``sum_{n >= 1} exp(-n**2 decay) e(n**2 freq)``, arrays broadcast.

    Returns ``(value, tail_bound)``.
    """
    decay, freq = np.broadcast_arrays(
        np.asarray(decay, dtype=np.float64), np.asarray(freq, dtype=np.float64)
    )
    if np.any(decay <= 0):
        raise ValueError("theta series needs a positive real part")
    need = max(CUTOFF_EXPONENT, math.log(1.0 / tol) + 5.0)
    kmax = int(math.ceil(math.sqrt(need / float(decay.min()))))
    k = np.arange(1, kmax + 1, dtype=np.int64)
    k2 = k * k
    flat_d, flat_f = decay.ravel(), freq.ravel()
    out = np.empty(flat_d.shape, dtype=np.complex128)
    step = max(1, _BLOCK // kmax)
    for i in range(0, len(flat_d), step):
        d = flat_d[i : i + step, None]
        f = flat_f[i : i + step, None]
        mag = np.exp(-k2[None, :] * d)
        r = reduced_phase(k2[None, :], f)
        t = 2.0 * np.pi * r
        out[i : i + step] = (mag * np.cos(t)).sum(axis=1) + 1j * (mag * np.sin(t)).sum(axis=1)
    K1 = kmax + 1
    dmin = float(decay.min())
    bound = math.exp(-K1 * K1 * dmin) / (1.0 - math.exp(-(2 * K1 + 1) * dmin))
    val = out.reshape(decay.shape)
    return (complex(val) if val.ndim == 0 else val), bound


def theta_value(params, tol=1e-15):
    """theta(z) = sum_{n in Z} exp(-n**2 z) = 1 + 2 omega_2(alpha)."""
    s, _ = damped_square_sum(1.0 / params.N, params.alpha, tol)
    return 1.0 + 2.0 * s


def dual_decay_freq(params):
    """Decay and frequency of ``exp(-k**2 pi**2 / z)`` written as ``exp(-k**2 d) e(k**2 f)``."""
    a = np.asarray(params.alpha, dtype=np.float64)
    decay = np.pi ** 2 * params.Y
    freq = -(np.pi ** 2) * a / params.abs_z2
    return decay, freq


def omega_tail(params, tol=1e-15):
    """sum_{k >= 1} exp(-k**2 pi**2 / z), the correction term of omega's approximation."""
    decay, freq = dual_decay_freq(params)
    val, _ = damped_square_sum(decay, freq, tol)
    return val


def omega_tail_bound(Y):
    """Majorant for :func:`omega_tail`: ``2 e^{-pi^2 Y}`` (Y >= 1) or ``2 (1 + Y^{-1/2})``."""
    Y = np.asarray(Y, dtype=np.float64)
    return np.where(Y >= 1.0, 2.0 * np.exp(-np.pi ** 2 * Y), 2.0 * (1.0 + Y ** -0.5))


def theta_functional_residual(params, tol=1e-15):
    """``|theta(z) - (pi/z)**(1/2) theta(pi**2/z)|``, both sides truncated to ``tol``."""
    lhs = theta_value(params, tol)
    rhs = np.sqrt(np.pi / params.z) * (1.0 + 2.0 * omega_tail(params, tol))
    return np.abs(lhs - rhs)


def omega_approx(params, tol=1e-15):
    """omega_2 through the theta functional equation:
    ``(1/2)(pi/z)**(1/2) - 1/2 + (pi/z)**(1/2) * omega_tail``."""
    root = np.sqrt(np.pi / params.z)
    return 0.5 * root - 0.5 + root * omega_tail(params, tol)


def finite_t2(alpha, N):
    """T_2(alpha) = sum_{1 <= m**2 <= N} e(m**2 alpha)."""
    m = np.arange(1, math.isqrt(int(N)) + 1, dtype=np.int64)
    return exp_sum(m * m, np.ones(len(m)), alpha)


def finite_f2(alpha, N):
    """f_2(alpha) = (1/2) sum_{1 <= m <= N} m**(-1/2) e(m alpha)."""
    m = np.arange(1, int(N) + 1, dtype=np.int64)
    return exp_sum(m, 0.5 / np.sqrt(m.astype(np.float64)), alpha)
