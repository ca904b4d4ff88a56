"""Theorem-scale experiments and the lemma-bound suite.

Window sums are compared with the main term ``pi H / 4``; the error-term
shapes are recorded as ratios, never asserted. The lemma suite reports the
supremum of LHS / RHS-shape for each bound over a grid.
"""

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .circle import mean_square_profile
from .expsums import (
    CircleParams,
    finite_f2,
    finite_t2,
    omega_tail,
    omega_terms,
    s_tilde_series,
    t_tilde_series,
    u_kernel,
)
from .repcount import RepKind, compute_window

THEOREM_KIND = {
    "T1": RepKind.TWO_PRIME_SQUARES,
    "T2": RepKind.TWO_PRIME_SQUARES,
    "T3": RepKind.PRIME_SQUARE_PLUS_SQUARE,
    "T4": RepKind.PRIME_SQUARE_PLUS_SQUARE,
}
SCAN_COLUMNS = ("theorem", "N", "H", "exact_sum", "main_term", "residual", "relative_error", "range_diag")
EXACT_CONSTANT = 1.0
ASYMPTOTIC_CONSTANT = 10.0
# ratios are computed in floating point; equality cases may land a few ulp above
ROUNDING_SLACK = 16 * np.finfo(np.float64).eps
MEAN_SQUARE_MAX_N = 3 * 10 ** 4  # keeps the quadrature lattice at 2**23 points


def _logs(N):
    L = math.log(N)
    return L, math.log(L)


def rh_error_shape(theorem, N, H):
    """Conditional error shape: ``H^2/N + H^{1/2} N^{1/4} L^{3/2}`` (two prime squares)
    or ``H^2/N + H log L / L^{1/2}`` (prime square plus square)."""
    L, LL = _logs(N)
    if THEOREM_KIND[theorem] is RepKind.TWO_PRIME_SQUARES:
        return H * H / N + math.sqrt(H) * N ** 0.25 * L ** 1.5
    return H * H / N + H * LL / math.sqrt(L)


def unconditional_error_shape(N, H, C=1.0):
    """``H exp(-C (L / log L)^{1/3})``; C is not explicit, 1 is used."""
    L, LL = _logs(N)
    return H * math.exp(-C * (L / LL) ** (1.0 / 3.0))


def range_diagnostic(theorem, N, H):
    """How far H sits inside the uniformity range.

    Conditional theorems need ``H / (sqrt(N) L^k)`` to be large (k = 3 for two
    prime squares, 2 otherwise); the unconditional ones need
    ``log H / log N`` in ``(7/12, 1)``, and that exponent is returned.
    """
    L, _ = _logs(N)
    if theorem in ("T1", "T3"):
        k = 3 if theorem == "T1" else 2
        return H / (math.sqrt(N) * L ** k)
    return math.log(H) / L


@dataclass
class TheoremRun:
    theorem: str
    N: int
    H: int
    exact_sum: float
    main_term: float
    weighted: bool = False

    @property
    def residual(self):
        return self.exact_sum - self.main_term

    @property
    def relative_error(self):
        return self.residual / self.main_term

    @property
    def range_diag(self):
        return range_diagnostic(self.theorem, self.N, self.H)

    @property
    def rh_ratio(self):
        return abs(self.residual) / rh_error_shape(self.theorem, self.N, self.H)

    @property
    def unconditional_ratio(self):
        return abs(self.residual) / unconditional_error_shape(self.N, self.H)

    def row(self):
        return {
            "theorem": self.theorem,
            "N": self.N,
            "H": self.H,
            "exact_sum": self.exact_sum,
            "main_term": self.main_term,
            "residual": self.residual,
            "relative_error": self.relative_error,
            "range_diag": self.range_diag,
        }


def main_term(H, weighted=False):
    """``pi H / 4``, or ``pi H / (4 e)`` for the exp-weighted sums."""
    m = math.pi * H / 4.0
    return m / math.e if weighted else m


def run_theorem(theorem, N, H, table, threads=1):
    """Unweighted window sum for a theorem against ``pi H / 4``.

    Range membership is reported through ``range_diag``, not enforced.
    """
    theorem = str(theorem).upper()
    if theorem not in THEOREM_KIND:
        raise ValueError(f"theorem must be one of {tuple(THEOREM_KIND)}")
    if H < 1:
        raise ValueError("H must be >= 1")
    window = compute_window(THEOREM_KIND[theorem], N, H, table, threads=threads)
    return TheoremRun(theorem, int(N), int(H), window.plain_sum, main_term(H))


@dataclass
class ExponentFit:
    """Least-squares line through ``(log N, log |residual|)``."""

    points: list
    slope: float
    intercept: float
    r_squared: float


def fit_exponent(points):
    """Fit ``log|residual| = slope log N + intercept``; needs at least 4 points."""
    pts = [(float(x), float(y)) for x, y in points if math.isfinite(y)]
    if len(pts) < 4:
        raise ValueError("an exponent fit needs at least 4 points")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return ExponentFit(pts, float(slope), float(intercept), r2)


@dataclass
class ScanReport:
    runs: list = field(default_factory=list)
    fit: ExponentFit = None

    def to_csv(self):
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=SCAN_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in self.runs:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.row().items()})
        return buf.getvalue()


def read_scan_csv(text):
    rows = list(csv.DictReader(io.StringIO(text)))
    if text.strip() and tuple(text.splitlines()[0].split(",")) != SCAN_COLUMNS:
        raise ValueError("unexpected scan CSV header")
    for r in rows:
        for k in SCAN_COLUMNS[1:]:
            r[k] = int(r[k]) if k in ("N", "H") else float(r[k])
    return rows


def scan(theorem, schedule, table, threads=1):
    """Run ``theorem`` over a list of ``(N, H)``; fit the residual exponent when possible."""
    runs = [run_theorem(theorem, N, H, table, threads) for N, H in schedule]
    fit = None
    pts = [(math.log(r.N), math.log(abs(r.residual))) for r in runs if r.residual != 0]
    if len(pts) >= 4:
        fit = fit_exponent(pts)
    return ScanReport(runs, fit)


def two_squares_cumulative(N, table):
    """``sum_{n <= N} r_{2,2}(n)`` together with the classical shape ``pi N/4 - sqrt N``."""
    w = compute_window(RepKind.TWO_SQUARES, 4, N - 4, table)
    # n = 1..4: only 2 = 1 + 1 is represented
    total = w.plain_sum + 1.0
    return total, math.pi * N / 4.0 - math.sqrt(N)


@dataclass
class BoundCheck:
    name: str
    grid_size: int
    max_ratio: float
    constant: float
    argmax: dict = field(default_factory=dict)

    @property
    def verdict(self):
        ok = math.isfinite(self.max_ratio) and self.max_ratio <= self.constant * (1 + ROUNDING_SLACK)
        return "pass" if ok else "fail"

    def as_dict(self):
        d = asdict(self)
        d["verdict"] = self.verdict
        return d


def alpha_grid(spec):
    """Build an alpha grid from ``lin:a:b:n`` or ``log:e0:e1:n``.

    ``log`` gives ``+-10**e`` for n exponents evenly spaced in ``[e0, e1]``
    (mirrored, so 2n points); ``lin`` gives n points in ``[a, b]``. All values
    are clipped to ``[-1/2, 1/2]``. An array-like is passed through.
    """
    if not isinstance(spec, str):
        return np.clip(np.asarray(spec, dtype=np.float64), -0.5, 0.5)
    parts = spec.split(":")
    if len(parts) != 4 or parts[0] not in ("lin", "log"):
        raise ValueError(f"alpha grid spec must be lin:a:b:n or log:e0:e1:n, got {spec!r}")
    a, b, n = float(parts[1]), float(parts[2]), int(parts[3])
    if n < 1:
        raise ValueError("alpha grid needs n >= 1")
    if parts[0] == "lin":
        g = np.linspace(a, b, n)
    else:
        pos = 10.0 ** np.linspace(a, b, n)
        g = np.concatenate([-pos[::-1], pos])
    return np.clip(g, -0.5, 0.5)


def _check(name, ratios, constant, labels):
    ratios = np.asarray(ratios, dtype=np.float64)
    i = int(np.argmax(ratios))
    return BoundCheck(name, int(ratios.size), float(ratios[i]), constant, labels(i))


def check_u_kernel(alphas, H_list):
    rs, lab = [], []
    for H in H_list:
        a = alphas
        u = np.abs(u_kernel(a, H))
        bound = np.where(a == 0, float(H), np.minimum(float(H), 1.0 / np.where(a == 0, 1.0, np.abs(a))))
        rs.append(u / bound)
        lab.extend({"H": int(H), "alpha": float(x)} for x in a)
    return _check("UH-estim", np.concatenate(rs), EXACT_CONSTANT, lambda i: lab[i])


def check_z(alphas, N_grid):
    rs, lab = [], []
    for N in N_grid:
        p = CircleParams(N, alphas)
        inv = 1.0 / np.sqrt(p.abs_z2)
        safe = np.where(alphas == 0, 1.0, 2.0 * np.pi * np.abs(alphas))
        bound = np.where(alphas == 0, float(N), np.minimum(float(N), 1.0 / safe))
        rs.append(inv / bound)
        lab.extend({"N": int(N), "alpha": float(x)} for x in alphas)
    return _check("z-estim", np.concatenate(rs), EXACT_CONSTANT, lambda i: lab[i])


def check_omega_y(alphas, N_grid):
    rs, lab = [], []
    for N in N_grid:
        p = CircleParams(N, alphas)
        Y = p.Y
        tail = np.abs(omega_tail(p))
        shape = np.where(Y >= 1.0, np.exp(-np.pi ** 2 * Y), Y ** -0.5)
        # both sides underflow together for large Y
        r = np.where(shape > 0, tail / np.where(shape > 0, shape, 1.0), 0.0)
        rs.append(r)
        lab.extend({"N": int(N), "alpha": float(x)} for x in alphas)
    return _check("omega-Y", np.concatenate(rs), ASYMPTOTIC_CONSTANT, lambda i: lab[i])


def check_trivial_lemma(alphas, N_grid, table, tol=1e-14):
    rs, lab = [], []
    for N in N_grid:
        s = s_tilde_series(2, N, tol, table)
        t = t_tilde_series(2, N, tol, table)
        rs.append(np.abs(s(alphas) - t(alphas)) / N ** 0.25)
        lab.extend({"N": int(N), "alpha": float(x)} for x in alphas)
    return _check("trivial-lemma", np.concatenate(rs), ASYMPTOTIC_CONSTANT, lambda i: lab[i])


def check_remark(alphas, N_grid):
    rs, lab = [], []
    for N in N_grid:
        d = np.abs(finite_t2(alphas, N) - finite_f2(alphas, N))
        rs.append(d / np.sqrt(1.0 + np.abs(alphas) * N))
        lab.extend({"N": int(N), "alpha": float(x)} for x in alphas)
    return _check("remark-T2-f2", np.concatenate(rs), ASYMPTOTIC_CONSTANT, lambda i: lab[i])


def _xi_grid(alphas, N):
    xi = np.unique(np.abs(alphas))
    return xi[(xi >= 1.0 / N) & (xi > 0) & (xi <= 0.5)]


def check_mean_squares(alphas, N_grid, table, tol=1e-14):
    """Mean squares of omega_2 and S~_2 over ``[-xi, xi]``, xi from the positive grid."""
    checks = []
    for label, series_of, shape in (
        ("zac-lemma-omega", lambda N: omega_terms(2, N, tol), lambda N, xi, L: xi * math.sqrt(N) + L),
        ("zac-lemma-S", lambda N: s_tilde_series(2, N, tol, table), lambda N, xi, L: xi * math.sqrt(N) * L + L * L),
    ):
        rs, lab = [], []
        for N in N_grid:
            xis = _xi_grid(alphas, N)
            if not len(xis):
                continue
            f = series_of(N)
            L = math.log(N)
            vals = mean_square_profile(f, xis, 1e-9 * math.sqrt(N) * L, f.degree)
            rs.extend(v / shape(N, xi, L) for v, xi in zip(vals, xis))
            lab.extend({"N": int(N), "xi": float(xi)} for xi in xis)
        if rs:
            checks.append(_check(label, rs, ASYMPTOTIC_CONSTANT, lambda i, lab=lab: lab[i]))
    return checks


def check_weight_removal(N_grid, H_list, table):
    """``|sum e^{-n/N} r - e^{-1} sum r| <= C (H/N) sum r`` for two prime squares."""
    rs, lab = [], []
    for N in N_grid:
        for H in H_list:
            if H >= N:
                continue
            w = compute_window(RepKind.TWO_PRIME_SQUARES, N, H, table)
            if w.plain_sum == 0:
                continue
            rs.append(abs(w.exp_weighted_sum - w.plain_sum / math.e) / (H / N * w.plain_sum))
            lab.append({"N": int(N), "H": int(H)})
    if not rs:
        return None
    return _check("weight-removal", rs, ASYMPTOTIC_CONSTANT, lambda i: lab[i])


def lemma_suite(N_grid, alpha_grid_spec, H_list, table, tol=1e-14, mean_squares=True, ms_N_grid=None):
    """All bound checks over the given grids, in a fixed order.

    The mean-square checks integrate numerically and use ``ms_N_grid``
    (default: the entries of ``N_grid`` up to ``MEAN_SQUARE_MAX_N``).

    Returns
    -------
    list of BoundCheck
        Deterministic for fixed inputs; see :func:`suite_json`.
    """
    alphas = alpha_grid(alpha_grid_spec)
    N_grid = [int(n) for n in N_grid]
    H_list = [int(h) for h in H_list]
    checks = [
        check_u_kernel(alphas, H_list),
        check_z(alphas, N_grid),
        check_omega_y(alphas, N_grid),
        check_trivial_lemma(alphas, N_grid, table, tol),
        check_remark(alphas, N_grid),
    ]
    if mean_squares:
        if ms_N_grid is None:
            ms_N_grid = [n for n in N_grid if n <= MEAN_SQUARE_MAX_N]
        checks.extend(check_mean_squares(alphas, [int(n) for n in ms_N_grid], table, tol))
    wr = check_weight_removal(N_grid, H_list, table)
    if wr is not None:
        checks.append(wr)
    return checks


def suite_json(checks):
    return json.dumps([c.as_dict() for c in checks])
