import json
import math
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from circleverify.errors import PreconditionError, SizeCapError
from circleverify.repcount import (
    RepKind,
    brute_force_window,
    compute_window,
    factorize,
    positive_two_squares,
    read_window_csv,
    two_squares_divisor_oracle,
)

KINDS = list(RepKind)


def value_at(kind, n, table):
    w = compute_window(kind, n - 1, 1, table)
    return float(w.values[0])


def python_enumeration(kind, N, H):
    """Pure-python double loop over all coordinate pairs."""
    def prime(k):
        return k > 1 and all(k % d for d in range(2, math.isqrt(k) + 1))

    out = [0.0] * H
    top = math.isqrt(N + H)
    for a in range(1, top + 1):
        for b in range(1, top + 1):
            n = a * a + b * b
            if not N < n <= N + H:
                continue
            if kind is RepKind.TWO_SQUARES:
                out[n - N - 1] += 1
            elif kind is RepKind.PRIME_SQUARE_PLUS_SQUARE and prime(a):
                out[n - N - 1] += math.log(a)
            elif kind is RepKind.TWO_PRIME_SQUARES and prime(a) and prime(b):
                out[n - N - 1] += math.log(a) * math.log(b)
    return out


def test_single_values(small_table):
    assert value_at("prime2", 8, small_table) == pytest.approx(math.log(2) ** 2, rel=1e-15)
    assert value_at("prime2", 13, small_table) == pytest.approx(2 * math.log(2) * math.log(3), rel=1e-15)
    assert value_at("prime1", 13, small_table) == pytest.approx(math.log(2) + math.log(3), rel=1e-15)
    assert value_at("square2", 25, small_table) == 2.0


def test_two_squares_window_against_python_loop(small_table):
    w = compute_window(RepKind.TWO_SQUARES, 100, 20, small_table)
    assert w.values.tolist() == python_enumeration(RepKind.TWO_SQUARES, 100, 20)


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("N,H", [(4, 300), (997, 150), (12345, 400)])
def test_enumeration_matches_python_loop(kind, N, H, small_table):
    w = compute_window(kind, N, H, small_table)
    np.testing.assert_allclose(w.values, python_enumeration(kind, N, H), rtol=1e-13, atol=0)


def test_brute_force_small_window_values(small_table):
    w = brute_force_window(RepKind.TWO_SQUARES, 0, 50, small_table)
    assert w.values[1] == 1.0  # n = 2
    assert w.values[3] == 0.0  # n = 4


def test_brute_force_prime2_support(small_table):
    w = brute_force_window(RepKind.TWO_PRIME_SQUARES, 0, 100, small_table)
    primes = [2, 3, 5, 7]
    expected = sorted({p * p + q * q for p in primes for q in primes if p * p + q * q <= 100})
    got = [int(n) for n, v in zip(w.n, w.values) if v]
    assert got == expected == [8, 13, 18, 29, 34, 50, 53, 58, 74, 98]


@pytest.mark.parametrize("kind", KINDS)
@given(N=st.integers(min_value=4, max_value=99_000), H=st.integers(min_value=1, max_value=1000))
@settings(max_examples=15, deadline=None)
def test_enumeration_equals_brute_force(kind, N, H, small_table):
    a = compute_window(kind, N, H, small_table)
    b = brute_force_window(kind, N, H, small_table)
    np.testing.assert_allclose(a.values, b.values, rtol=1e-12, atol=0)


def test_two_squares_divisor_examples():
    assert two_squares_divisor_oracle(25) == 12
    assert positive_two_squares(25) == 2
    assert two_squares_divisor_oracle(2) == 4
    assert positive_two_squares(2) == 1
    assert two_squares_divisor_oracle(3) == 0
    assert positive_two_squares(3) == 0
    with pytest.raises(ValueError):
        two_squares_divisor_oracle(0)


@given(st.integers(min_value=1, max_value=3000))
def test_divisor_oracle_against_lattice_count(n):
    r = math.isqrt(n)
    count = sum(1 for a in range(-r, r + 1) for b in range(-r, r + 1) if a * a + b * b == n)
    assert two_squares_divisor_oracle(n) == count


def test_two_squares_window_matches_divisor_formula(small_table):
    w = compute_window(RepKind.TWO_SQUARES, 50_000, 2000, small_table)
    assert w.values.tolist() == [positive_two_squares(int(n)) for n in w.n]


def test_factorize_caps():
    assert factorize(2 ** 10 * 999_983) == {2: 10, 999_983: 1}
    with pytest.raises(SizeCapError):
        factorize(10 ** 12 + 1)


def test_window_sums(small_table):
    w = compute_window(RepKind.PRIME_SQUARE_PLUS_SQUARE, 5000, 300, small_table)
    assert w.plain_sum == math.fsum(w.values)
    assert w.exp_weighted_sum == pytest.approx(
        math.fsum(v * math.exp(-n / 5000) for n, v in zip(w.n.tolist(), w.values)), rel=1e-15
    )
    assert np.all(w.values >= 0)


def test_prime2_symmetric_in_coordinates(small_table):
    # every ordered pair (p, q) has its mirror, so r'' is a sum over unordered pairs counted twice off the diagonal
    w = compute_window(RepKind.TWO_PRIME_SQUARES, 20_000, 500, small_table)
    p = small_table.primes[small_table.primes <= 150]
    lp = np.log(p.astype(float))
    n = p[:, None] ** 2 + p[None, :] ** 2
    upper = np.triu(np.ones_like(n, dtype=bool), 1)
    ref = np.zeros(500)
    sel = upper & (n > 20_000) & (n <= 20_500)
    np.add.at(ref, n[sel] - 20_001, 2 * (lp[:, None] * lp[None, :])[sel])
    diag = (p * p * 2 > 20_000) & (p * p * 2 <= 20_500)
    np.add.at(ref, 2 * p[diag] ** 2 - 20_001, lp[diag] ** 2)
    np.testing.assert_allclose(w.values, ref, rtol=1e-13)


def test_threads_are_schedule_independent(table):
    a = compute_window(RepKind.TWO_PRIME_SQUARES, 10 ** 9, 10 ** 5, table, threads=1)
    b = compute_window(RepKind.TWO_PRIME_SQUARES, 10 ** 9, 10 ** 5, table, threads=4)
    assert np.array_equal(a.values, b.values)
    assert a.plain_sum == b.plain_sum


def test_precondition_and_overflow(small_table):
    with pytest.raises(PreconditionError):
        compute_window(RepKind.TWO_SQUARES, 10 ** 9, 10, small_table)
    with pytest.raises(OverflowError):
        compute_window(RepKind.TWO_SQUARES, 2 ** 62, 10, small_table)
    with pytest.raises(ValueError):
        compute_window(RepKind.TWO_SQUARES, 100, 0, small_table)
    with pytest.raises(SizeCapError):
        brute_force_window(RepKind.TWO_SQUARES, 10 ** 6, 2000, small_table)


def test_cost_tracks_matches_not_window_length(table):
    def timed(H):
        t0 = time.perf_counter()
        compute_window(RepKind.TWO_PRIME_SQUARES, 10 ** 10, H, table)
        return time.perf_counter() - t0

    small = min(timed(10 ** 5) for _ in range(3))
    large = timed(10 ** 6)
    assert large <= 20 * max(small, 1e-3)


def test_csv_and_json_roundtrip(small_table):
    w = compute_window(RepKind.PRIME_SQUARE_PLUS_SQUARE, 1000, 30, small_table)
    n, v = read_window_csv(w.to_csv())
    assert n.tolist() == w.n.tolist()
    assert v.tolist() == w.values.tolist()
    summary = json.loads(w.summary_json())
    assert set(summary) == {"kind", "N", "H", "plain_sum", "exp_weighted_sum", "wall_time_s"}
    assert summary["kind"] == "prime1"


def test_kind_parsing():
    assert RepKind.parse("prime2") is RepKind.TWO_PRIME_SQUARES
    assert RepKind.parse("TWO_SQUARES") is RepKind.TWO_SQUARES
    with pytest.raises(ValueError):
        RepKind.parse("cubes")
