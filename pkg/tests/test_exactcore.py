import math
import random
from fractions import Fraction

import mpmath
import pytest

from gpade.numberfield import (NumberField, NFElement, QQ, lcm_upto, house_of,
                               norm_in, parse_rational, format_rational)
from gpade.linalg import (solve_exact, det_exact, rank_bareiss, rank_modular,
                          rref, IncrementalRREF, mat_mul_vec)


def brute_lcm(n):
    out = 1
    for k in range(1, n + 1):
        out = out * k // math.gcd(out, k)
    return out


class TestLcm:
    def test_trivial(self):
        assert lcm_upto(1) == 1

    def test_frozen(self):
        # independent oracle: direct lcm of 1..6 and 1..10
        assert brute_lcm(6) == 60
        assert brute_lcm(10) == 2520
        assert lcm_upto(6) == 60
        assert lcm_upto(10) == 2520

    def test_divisibility_and_growth_trend(self):
        d = lcm_upto(200)
        for k in range(1, 201):
            assert d % k == 0
        # monitor log(d_n)/n toward 1 (= log e) on n <= 10^4; trend, not a limit
        def rate(n):
            return math.log(lcm_upto(n)) / n if n <= 300 else \
                lcm_upto(n).bit_length() * math.log(2) / n
        r = [rate(n) for n in (100, 1000, 10000)]
        assert all(0.5 < v < 1.3 for v in r)
        assert abs(r[2] - 1.0) <= abs(r[0] - 1.0)


class TestHouseNorm:
    def test_rational_house(self):
        assert house_of(Fraction(3, 2)) == mpmath.mpf(3) / 2

    def test_sqrt2(self):
        K = NumberField([-2, 0, 1])
        r2 = K.generator()
        with mpmath.workprec(160):
            h = r2.house(96)
            ref = mpmath.sqrt(2)
            assert abs(h - ref) < mpmath.mpf(2) ** -80
            assert h >= ref  # certified upper bound
        assert r2.norm() == -2      # product of conjugates

    def test_one_plus_i(self):
        K = NumberField([1, 0, 1])
        x = K.element([1, 1])
        assert x.norm() == 2        # (1+i)(1-i)
        with mpmath.workprec(160):
            assert abs(x.house(96) - mpmath.sqrt(2)) < mpmath.mpf(2) ** -80
        assert not K.is_real()

    def test_rational_norm_in_degree_d(self):
        K = NumberField([-2, 0, 1])
        assert norm_in(Fraction(3, 5), K) == Fraction(9, 25)

    def test_house_submultiplicative_norm_multiplicative(self):
        K = NumberField([-2, 0, 1])
        rng = random.Random(7)
        for _ in range(10):
            x = K.element([Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(2)])
            y = K.element([Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(2)])
            assert (x * y).norm() == x.norm() * y.norm()
            if x and y:
                with mpmath.workprec(200):
                    hx, hy, hxy = x.house(128), y.house(128), (x * y).house(128)
                    assert hxy <= hx * hy * (1 + mpmath.mpf(2) ** -90) + mpmath.mpf(2) ** -90

    def test_division(self):
        K = NumberField([1, 0, 1])
        x = K.element([2, 3])
        assert (x / x) == 1
        y = K.element([1, 1])
        assert (x / y) * y == x

    def test_reducible_rejected(self):
        with pytest.raises(ValueError):
            NumberField([1, 2, 1])  # (x+1)^2
        with pytest.raises(ValueError):
            NumberField([-1, 0, 0, 0, 1])  # x^4-1

    def test_x4_plus_1_accepted(self):
        # irreducible over Q but reducible mod every prime
        K = NumberField([1, 0, 0, 0, 1])
        assert K.degree == 4

    def test_degree_cap(self):
        with pytest.raises(ValueError):
            NumberField([2] + [0] * 8 + [1])

    def test_rational_io(self):
        assert parse_rational("-3/7") == Fraction(-3, 7)
        assert format_rational(Fraction(-3, 7)) == "-3/7"
        assert format_rational(Fraction(5)) == "5"


def naive_row_reduce_rank(M):
    """Independent elimination oracle (plain forward elimination)."""
    M = [row[:] for row in M]
    rows, cols = len(M), len(M[0])
    rank = 0
    for c in range(cols):
        piv = None
        for r in range(rank, rows):
            if M[r][c] != 0:
                piv = r
                break
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for r in range(rows):
            if r != rank and M[r][c] != 0:
                f = M[r][c] / M[rank][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[rank])]
        rank += 1
    return rank


class TestSolveExact:
    def test_identity(self):
        M = [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]
        res = solve_exact(M, [Fraction(1), Fraction(2), Fraction(3)])
        assert res.particular == [1, 2, 3]
        assert res.rank == 3
        assert res.kernel == []

    def test_zero_matrix(self):
        M = [[Fraction(0)] * 2 for _ in range(2)]
        res = solve_exact(M, [Fraction(0), Fraction(0)])
        assert res.rank == 0
        assert len(res.kernel) == 2

    def test_inconsistent(self):
        M = [[Fraction(1), Fraction(1)], [Fraction(1), Fraction(1)]]
        res = solve_exact(M, [Fraction(1), Fraction(2)])
        assert not res.consistent
        assert res.particular is None

    def test_random_rank_matches_independent_oracle(self):
        rng = random.Random(20240)
        for trial in range(4):
            n = 20
            M = [[Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(n)]
                 for _ in range(n)]
            # inject rank deficiency sometimes
            if trial % 2:
                M[7] = [3 * a - 2 * b for a, b in zip(M[1], M[4])]
            r_ref = naive_row_reduce_rank(M)
            res = solve_exact(M, None)
            assert res.rank == r_ref
            assert rank_bareiss(M) == r_ref
            assert rank_modular(M) == r_ref

    def test_solution_properties(self):
        rng = random.Random(99)
        m, n = 8, 11
        M = [[Fraction(rng.randint(-5, 5)) for _ in range(n)] for _ in range(m)]
        x = [Fraction(rng.randint(-4, 4)) for _ in range(n)]
        b = mat_mul_vec(M, x)
        res = solve_exact(M, b)
        assert res.consistent
        assert mat_mul_vec(M, res.particular) == b
        for k in res.kernel:
            assert all(v == 0 for v in mat_mul_vec(M, k))
        assert res.rank + len(res.kernel) == n

    def test_det(self):
        M = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(1)]]
        assert det_exact(M) == 1
        M2 = [[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]]
        assert det_exact(M2) == 0

    def test_det_over_number_field(self):
        K = NumberField([1, 0, 1])
        i = K.generator()
        M = [[i, K.one()], [K.one(), i]]
        assert det_exact(M) == K.from_rational(-2)

    def test_incremental_rref_rank(self):
        rng = random.Random(5)
        rows = [[Fraction(rng.randint(-3, 3)) for _ in range(6)] for _ in range(10)]
        inc = IncrementalRREF()
        for row in rows:
            inc.add({j: v for j, v in enumerate(row) if v})
        assert inc.rank == naive_row_reduce_rank(rows)
