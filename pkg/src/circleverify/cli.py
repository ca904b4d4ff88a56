"""Command-line entry point: ``python3 -m circleverify <command> ...``.

Exit status: 0 on success, 1 on a computational failure (sieve too small,
size cap, quadrature non-convergence), 2 on a usage error.
"""

import argparse
import json
import math
import os
import platform
import sys
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation

import numpy as np
import scipy

from . import __version__
from .circle import decompose, full_circle_identity
from .errors import PreconditionError, QuadratureError, SizeCapError
from .expsums import (
    CircleParams,
    gamma_factor,
    omega_terms,
    s_tilde_series,
    series_cutoff,
    t_tilde_series,
    theta_value,
    u_kernel,
)
from .repcount import RepKind, compute_window
from .sieve import PrimeTable, build_prime_table
from .verify import alpha_grid, lemma_suite, run_theorem, scan, suite_json

COMMANDS = ("sieve", "reps", "expsum", "identity", "decompose", "theorem", "scan", "lemmas")
FUNCTIONS = ("S", "T", "omega", "E", "U", "gamma", "theta")
THREADS_ENV = "CIRCLEVERIFY_THREADS"


class UsageError(Exception):
    pass


def exact_int(text):
    """Parse ``1e8``-style input to an exact int; reject non-integral values."""
    try:
        d = Decimal(str(text).strip())
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not d.is_finite() or d != d.to_integral_value():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(d)


def tolerance(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < v <= 1e-6:
        raise argparse.ArgumentTypeError("tol must lie in (0, 1e-6]")
    return v


def int_list(text):
    return [exact_int(t) for t in text.split(",") if t.strip()]


def schedule(text):
    """``N:H,N:H,...``; an empty string is an empty schedule."""
    out = []
    for item in filter(None, (t.strip() for t in text.split(","))):
        try:
            n, h = item.split(":")
        except ValueError:
            raise argparse.ArgumentTypeError(f"schedule entry {item!r} is not N:H") from None
        out.append((exact_int(n), exact_int(h)))
    return out


@dataclass
class RunConfig:
    command: str
    N: int = None
    H: int = None
    kind: RepKind = RepKind.TWO_PRIME_SQUARES
    ell: int = 2
    tol: float = 1e-14
    c: float = 0.1
    A: float = None
    which: str = "T1"
    function: str = "S"
    alpha: str = "lin:-0.5:0.5:11"
    threads: int = 1
    output: str = None
    format: str = None
    limit: int = None
    table: str = None
    schedule: list = field(default_factory=list)
    n_list: list = field(default_factory=list)
    h_list: list = field(default_factory=list)
    seed_report: bool = False
    with_j: bool = False

    def echo(self):
        out = {}
        for k, v in self.__dict__.items():
            out[k] = v.value if isinstance(v, RepKind) else v
        return out


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=tolerance, default=1e-14)
    common.add_argument("--threads", type=exact_int, default=None, help=f"0 = auto; falls back to ${THREADS_ENV}")
    common.add_argument("--output", "-o", default=None, help="file path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--limit", type=exact_int, default=None, help="sieve limit (default: what the run needs)")
    common.add_argument("--table", default=None, help="load a saved CVPT prime table")
    common.add_argument("--seed-report", action="store_true", help="embed config echo and versions")

    p = argparse.ArgumentParser(prog="circleverify", description="Circle-method numerics for sums of two squares.")
    p.add_argument("--version", action="version", version=f"circleverify {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("sieve", parents=[common], help="build a prime table; --output saves it")

    def window(sp, kind=True):
        sp.add_argument("--n", type=exact_int, required=True)
        sp.add_argument("--h", type=exact_int, required=True)
        if kind:
            sp.add_argument("--kind", type=RepKind.parse, default=RepKind.TWO_PRIME_SQUARES,
                            help="prime2 | prime1 | square2")

    window(sub.add_parser("reps", parents=[common], help="representation values on a window"))
    window(sub.add_parser("identity", parents=[common], help="full-circle identity check"))

    e = sub.add_parser("expsum", parents=[common], help="evaluate a generating function on an alpha grid")
    e.add_argument("--function", choices=FUNCTIONS, default="S")
    e.add_argument("--ell", type=exact_int, default=2)
    e.add_argument("--n", type=exact_int, required=True)
    e.add_argument("--h", type=exact_int, default=None, help="H for the U kernel")
    e.add_argument("--alpha", default="lin:-0.5:0.5:11", help="lin:a:b:n, log:e0:e1:n or a,b,c")

    d = sub.add_parser("decompose", parents=[common], help="I_j pieces of a theorem's splitting")
    window(d, kind=False)
    d.add_argument("--which", choices=("T1", "T2", "T3", "T4"), default="T1")
    d.add_argument("--c", type=float, default=0.1, help="constant in B = exp(c (L/log L)^(1/3))")
    d.add_argument("--A", type=float, default=None, help="T3 arc cut (default L^2/log L)")
    d.add_argument("--with-j", action="store_true")

    t = sub.add_parser("theorem", parents=[common], help="window sum against the main term")
    window(t, kind=False)
    t.add_argument("--which", choices=("T1", "T2", "T3", "T4"), default="T1")

    sc = sub.add_parser("scan", parents=[common], help="run a theorem over an (N, H) schedule")
    sc.add_argument("--which", choices=("T1", "T2", "T3", "T4"), default="T1")
    sc.add_argument("--schedule", type=schedule, default=[], help="N:H,N:H,...")

    lm = sub.add_parser("lemmas", parents=[common], help="lemma bound suite")
    lm.add_argument("--n-list", type=int_list, default=[10 ** 4])
    lm.add_argument("--h-list", type=int_list, default=[100])
    lm.add_argument("--alpha", default="log:-6:-0.31:50")
    return p


def _resolve_threads(value):
    if value is None:
        env = os.environ.get(THREADS_ENV)
        if env is None:
            return 1
        try:
            value = exact_int(env)
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"{THREADS_ENV}: {exc}") from None
    if value < 0:
        raise UsageError("threads must be >= 0")
    return value or (os.cpu_count() or 1)


def parse_args(argv):
    """Validate ``argv`` into a :class:`RunConfig`; raises ``SystemExit(2)`` on bad usage."""
    parser = _parser()
    ns = parser.parse_args(argv)
    try:
        threads = _resolve_threads(ns.threads)
    except UsageError as exc:
        parser.error(str(exc))
    cfg = RunConfig(command=ns.command, tol=ns.tol, threads=threads, output=ns.output,
                    format=ns.format, limit=ns.limit, table=ns.table, seed_report=ns.seed_report)
    for key in ("kind", "ell", "c", "A", "which", "function", "alpha", "schedule", "n_list", "h_list", "with_j"):
        if hasattr(ns, key):
            setattr(cfg, key, getattr(ns, key))
    cfg.N = getattr(ns, "n", None)
    cfg.H = getattr(ns, "h", None)
    if cfg.H is not None and cfg.H < 1:
        parser.error("--h must be >= 1")
    if cfg.N is not None and cfg.N < 1:
        parser.error("--n must be >= 1")
    if cfg.command == "sieve" and (cfg.limit is None or cfg.limit < 2):
        parser.error("sieve needs --limit >= 2")
    if cfg.command == "expsum":
        if cfg.function == "U" and cfg.H is None:
            parser.error("--function U needs --h")
        try:
            alpha_arg(cfg.alpha)
        except ValueError as exc:
            parser.error(str(exc))
        if cfg.ell < 1:
            parser.error("--ell must be >= 1")
    if cfg.command == "lemmas":
        try:
            alpha_arg(cfg.alpha)
        except ValueError as exc:
            parser.error(str(exc))
    if cfg.format is None:
        cfg.format = "csv" if cfg.command in ("reps", "expsum", "scan") else "json"
    return cfg


def alpha_arg(text):
    if ":" in text:
        return alpha_grid(text)
    try:
        vals = np.array([float(t) for t in text.split(",") if t.strip()])
    except ValueError:
        raise ValueError(f"bad alpha list {text!r}") from None
    if np.any(np.abs(vals) > 0.5):
        raise ValueError("alpha values must lie in [-1/2, 1/2]")
    return vals


def required_limit(cfg):
    """Smallest sieve limit a run needs."""
    need = 2
    if cfg.command == "sieve":
        return cfg.limit
    if cfg.N is not None and cfg.H is not None:
        need = max(need, math.isqrt(cfg.N + cfg.H))
    series = cfg.command in ("identity", "decompose") or (
        cfg.command == "expsum" and cfg.function in ("S", "T", "E")
    )
    if series:
        ell = cfg.ell if cfg.command == "expsum" else 2
        need = max(need, series_cutoff(ell, cfg.N, cfg.tol)[0])
    if cfg.command == "scan" and cfg.schedule:
        need = max(need, max(math.isqrt(n + h) for n, h in cfg.schedule))
    if cfg.command == "lemmas":
        need = max(need, max(series_cutoff(2, n, cfg.tol)[0] for n in cfg.n_list))
        need = max(need, max(math.isqrt(n + h) for n in cfg.n_list for h in cfg.h_list))
    return need


def _table(cfg):
    if cfg.table:
        return PrimeTable.load(cfg.table)
    return build_prime_table(cfg.limit if cfg.limit is not None else required_limit(cfg))


def _csv_rows(header, rows):
    lines = [",".join(header)]
    lines.extend(",".join(repr(v) if isinstance(v, float) else str(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _expsum(cfg, table):
    alphas = alpha_arg(cfg.alpha)
    N, ell, tol = cfg.N, cfg.ell, cfg.tol
    bound = 0.0
    if cfg.function in ("S", "T", "omega", "E"):
        if cfg.function == "omega":
            ser = omega_terms(ell, N, tol)
        elif cfg.function == "T":
            ser = t_tilde_series(ell, N, tol, table)
        else:
            ser = s_tilde_series(ell, N, tol, table)
        vals = ser(alphas)
        bound = ser.tail_bound
        if cfg.function == "E":
            vals = vals - gamma_factor(ell, CircleParams(N, alphas))
    elif cfg.function == "U":
        vals = u_kernel(alphas, cfg.H)
    elif cfg.function == "gamma":
        vals = gamma_factor(ell, CircleParams(N, alphas))
    else:
        vals = theta_value(CircleParams(N, alphas), tol)
    vals = np.atleast_1d(vals)
    rows = [(float(a), float(v.real), float(v.imag), float(bound)) for a, v in zip(alphas, vals)]
    header = ("alpha", "re", "im", "tail_bound")
    if cfg.format == "json":
        return json.dumps([dict(zip(header, r)) for r in rows])
    return _csv_rows(header, rows)


def _theorem_payload(run, fmt):
    row = run.row()
    if fmt == "csv":
        return _csv_rows(tuple(row), [tuple(row.values())])
    row.update(rh_ratio=run.rh_ratio, unconditional_ratio=run.unconditional_ratio)
    return json.dumps(row)


def run(cfg):
    """Execute a validated config and return the text to emit."""
    table = _table(cfg)
    if cfg.command == "sieve":
        if cfg.output:
            table.dump(cfg.output)
        return json.dumps({"limit": table.limit, "prime_count": table.prime_count()}), bool(cfg.output)
    if cfg.command == "reps":
        w = compute_window(cfg.kind, cfg.N, cfg.H, table, threads=cfg.threads)
        return (w.to_csv() if cfg.format == "csv" else w.summary_json(with_time=False)), False
    if cfg.command == "expsum":
        return _expsum(cfg, table), False
    if cfg.command == "identity":
        r = full_circle_identity(cfg.kind, cfg.N, cfg.H, cfg.tol, table)
        return json.dumps(r.as_dict()), False
    if cfg.command == "decompose":
        c_or_A = cfg.A if cfg.which == "T3" else cfg.c
        d = decompose(cfg.which, cfg.N, cfg.H, c_or_A, cfg.tol, table, with_j=cfg.with_j)
        return d.to_json(), False
    if cfg.command == "theorem":
        return _theorem_payload(run_theorem(cfg.which, cfg.N, cfg.H, table, cfg.threads), cfg.format), False
    if cfg.command == "scan":
        rep = scan(cfg.which, cfg.schedule, table, cfg.threads)
        if cfg.format == "csv":
            return rep.to_csv(), False
        return json.dumps([r.row() for r in rep.runs]), False
    checks = lemma_suite(cfg.n_list, cfg.alpha, cfg.h_list, table, cfg.tol)
    return suite_json(checks), False


def seed_report(cfg):
    return {
        "config": cfg.echo(),
        "versions": {
            "circleverify": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
    }


def _embed(cfg, text):
    rep = seed_report(cfg)
    if cfg.format == "json":
        return json.dumps({"seed_report": rep, "result": json.loads(text)})
    return "".join(f"# {line}\n" for line in json.dumps(rep, indent=1).splitlines()) + text


def execute(cfg, stdout=None):
    """Run ``cfg`` and write its output; returns the exit status."""
    stdout = stdout or sys.stdout
    try:
        text, wrote_file = run(cfg)
    except (PreconditionError, SizeCapError, QuadratureError, OverflowError, MemoryError, ArithmeticError) as exc:
        print(f"circleverify: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"circleverify: usage error: {exc}", file=sys.stderr)
        return 2
    if cfg.seed_report:
        text = _embed(cfg, text)
    if not text.endswith("\n"):
        text += "\n"
    if cfg.output and not wrote_file:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return 0


def main(argv=None):
    try:
        cfg = parse_args(sys.argv[1:] if argv is None else argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    return execute(cfg)


if __name__ == "__main__":
    sys.exit(main())
