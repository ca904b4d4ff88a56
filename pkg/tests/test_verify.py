import json
import math

import numpy as np
import pytest

from circleverify.repcount import RepKind, compute_window
from circleverify.verify import (
    BoundCheck,
    alpha_grid,
    fit_exponent,
    lemma_suite,
    main_term,
    range_diagnostic,
    read_scan_csv,
    rh_error_shape,
    run_theorem,
    scan,
    suite_json,
    two_squares_cumulative,
)


def test_main_term():
    assert main_term(10 ** 6) == pytest.approx(785398.1633974483, rel=1e-15)
    assert main_term(10, weighted=True) == pytest.approx(math.pi * 10 / (4 * math.e))


def test_run_theorem_consistency(table):
    r = run_theorem("T3", 10 ** 6, 5000, table)
    w = compute_window(RepKind.PRIME_SQUARE_PLUS_SQUARE, 10 ** 6, 5000, table)
    assert r.exact_sum == pytest.approx(math.fsum(w.values), rel=1e-12)
    assert r.relative_error == pytest.approx(r.residual / r.main_term)
    assert r.main_term > 0


@pytest.mark.parametrize("theorem", ["T1", "T3"])
def test_theorem_at_1e8(theorem, table):
    r = run_theorem(theorem, 10 ** 8, 10 ** 6, table)
    assert abs(r.relative_error) <= 0.05


def test_theorem_rejects_bad_input(table):
    with pytest.raises(ValueError):
        run_theorem("T9", 1000, 10, table)
    with pytest.raises(ValueError):
        run_theorem("T1", 1000, 0, table)


def test_range_diagnostics():
    N, H = 10 ** 8, 10 ** 6
    L = math.log(N)
    assert range_diagnostic("T1", N, H) == pytest.approx(H / (math.sqrt(N) * L ** 3))
    assert range_diagnostic("T2", N, H) == pytest.approx(0.75)
    assert rh_error_shape("T3", N, H) > 0


def test_empty_scan(table):
    rep = scan("T1", [], table)
    assert rep.runs == [] and rep.fit is None
    assert read_scan_csv(rep.to_csv()) == []


def test_two_squares_scan_residuals(table):
    for N in (10 ** 4, 10 ** 5, 10 ** 6):
        total, shape = two_squares_cumulative(N, table)
        assert abs(total - shape) <= 5 * N ** (1 / 3)
        assert total - math.pi * N / 4 < 0


def test_scan_fit_and_csv(table):
    sched = [(n, int(n ** 0.7)) for n in (10 ** 6, 10 ** 7, 10 ** 8, 10 ** 9)]
    rep = scan("T1", sched, table)
    assert rep.fit is not None and len(rep.fit.points) == 4
    rows = read_scan_csv(rep.to_csv())
    assert [r["N"] for r in rows] == [n for n, _ in sched]
    assert rows[2]["exact_sum"] == rep.runs[2].exact_sum


def test_fit_exponent_recovers_slope():
    x = np.log([1e4, 1e5, 1e6, 1e7])
    fit = fit_exponent(list(zip(x, 0.5 * x + 1.0)))
    assert fit.slope == pytest.approx(0.5)
    assert fit.r_squared == pytest.approx(1.0)
    with pytest.raises(ValueError):
        fit_exponent([(1, 1), (2, 2), (3, 3)])


def test_alpha_grid_specs():
    g = alpha_grid("log:-3:-1:3")
    assert g.tolist() == pytest.approx([-0.1, -0.01, -0.001, 0.001, 0.01, 0.1])
    assert alpha_grid("lin:-0.5:0.5:5").tolist() == [-0.5, -0.25, 0.0, 0.25, 0.5]
    with pytest.raises(ValueError):
        alpha_grid("grid:1:2:3")


def test_lemma_suite_deterministic_and_passing(table):
    args = ([3000, 10 ** 4], "log:-6:-0.31:25", [50, 400], table)
    a = lemma_suite(*args)
    b = lemma_suite(*args)
    assert suite_json(a) == suite_json(b)
    names = [c.name for c in a]
    assert names == [
        "UH-estim", "z-estim", "omega-Y", "trivial-lemma", "remark-T2-f2",
        "zac-lemma-omega", "zac-lemma-S", "weight-removal",
    ]
    for c in a:
        assert math.isfinite(c.max_ratio)
        assert c.verdict == "pass", c
    exact = {c.name: c for c in a}
    assert exact["UH-estim"].constant == 1.0 and exact["z-estim"].constant == 1.0
    parsed = json.loads(suite_json(a))
    assert parsed[0]["verdict"] == "pass"


def test_bound_check_verdict():
    assert BoundCheck("x", 3, 1.0, 1.0).verdict == "pass"
    assert BoundCheck("x", 3, 1.5, 1.0).verdict == "fail"
    assert BoundCheck("x", 3, float("nan"), 1.0).verdict == "fail"


def test_bound_check_allows_rounding_only():
    assert BoundCheck("x", 1, 1.0000000000000002, 1.0).verdict == "pass"
    assert BoundCheck("x", 1, 1.000001, 1.0).verdict == "fail"
