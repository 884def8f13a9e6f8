import math
from fractions import Fraction

import mpmath
import pytest
from mpmath import mp, mpc, mpf

from gpade.approximants import construct
from gpade.balls import Ball, ball_linear_solve, ball_power_frac
from gpade.builtins import builtin, geometric_operator, polylog_operator
from gpade.companion import build_system, derived_rows_for
from gpade.continuation import (CompanionIntegrator, PathError, continue_family, gp,
                                plan_loop, plan_path, plan_radial_path,
                                _sing_points_numeric)
from gpade.contours import ContourGeometryError, contour_bounds, jf_decay_bound
from gpade.evalnum import continue_solution, jf_eval, jf_eval_checked
from gpade.operators import profile
from gpade.partialfractions import jf_series
from gpade.polylogs import (BranchCutError, bernoulli_polynomial, li_series,
                            li_value, polylog_connection, provider_for,
                            var1_li_closed_form)
from gpade.quadrature import gauss_jacobi_01
from gpade.verify import variation_data, ball_valuation

F = Fraction


class TestBalls:
    def test_arith_containment(self):
        with mpmath.workprec(128):
            a = Ball.exact(F(1, 3))
            b = Ball.exact(F(2, 7))
            c = (a + b) * (a - b)
            ref = F(1, 9) - F(4, 49)
            assert c.contains_value(mpf(ref.numerator) / ref.denominator)

    def test_division_guard(self):
        with mpmath.workprec(64):
            z = Ball(mpc(0), mpf("0.1"))
            with pytest.raises(ZeroDivisionError):
                z.reciprocal()

    def test_linear_solve(self):
        with mpmath.workprec(128):
            M = [[Ball.exact(F(2)), Ball.exact(F(1))],
                 [Ball.exact(F(1)), Ball.exact(F(3))]]
            b = [Ball.exact(F(5)), Ball.exact(F(10))]
            x = ball_linear_solve(M, b)
            assert x[0].contains_value(1) and x[1].contains_value(3)


class TestPolylogOracle:
    def test_connection_s2_identity(self):
        with mpmath.workprec(256):
            z = Ball(mpc(-2, 3))
            lhs = polylog_connection(2, z)
            lg = z.log()
            lg = lg if lg.mid.imag > 0 else Ball(lg.mid + 2j * mpmath.pi())
            rhs = -li_series(2, z.reciprocal()) + Ball(mpmath.pi() ** 2 / 3) \
                - lg * lg * F(1, 2) + Ball(mpc(0, 1) * mpmath.pi()) * lg
            assert lhs.overlaps(rhs)
            assert abs(lhs.mid - rhs.mid) < mpf(2) ** -200

    def test_s1_is_log(self):
        with mpmath.workprec(192):
            z = Ball(mpc(3, 1))
            v = polylog_connection(1, z)
            assert abs(v.mid + mpmath.log(1 - z.mid)) < mpf(2) ** -150

    def test_li2_half_classical(self):
        with mpmath.workprec(192):
            v = li_value(2, F(1, 2))
            ref = mpmath.pi() ** 2 / 12 - mpmath.log(2) ** 2 / 2
            assert v.contains_value(ref)

    def test_branch_cut_rejected(self):
        with mpmath.workprec(64):
            with pytest.raises(BranchCutError):
                polylog_connection(2, F(3, 2))

    def test_bernoulli(self):
        assert bernoulli_polynomial(1).coeffs == [F(-1, 2), F(1)]
        assert bernoulli_polynomial(3).coeffs == [F(0), F(1, 2), F(-3, 2), F(1)]


class TestContinuation:
    def test_geometric_to_2_upper(self):
        op = geometric_operator()
        prof = profile(op)
        sing = _sing_points_numeric(op)
        path = plan_path(gp(F(2)), sing, upper=True)
        vals = continue_solution(op, prof, 1, [F(1)] * 300, gp(F(2)), 128,
                                 path=path)
        with mpmath.workprec(160):
            tF = vals[-1]
            assert tF.contains_value(-1)
            assert tF.rad < mpf(2) ** -80

    def test_li2_at_half_closed_form(self):
        op = polylog_operator(2)
        prof = profile(op)
        coeffs = provider_for("li2").coefficients(400)
        vals = continue_solution(op, prof, 1, coeffs, gp(F(1, 2)), 160)
        with mpmath.workprec(220):
            ref = mpmath.pi() ** 2 / 12 - mpmath.log(2) ** 2 / 2
            li2_at_half = vals[-prof.mu]   # theta^0 F component
            assert li2_at_half.contains_value(ref)
            # direct series summation oracle
            direct = li_series(2, Ball.exact(F(1, 2)))
            assert li2_at_half.overlaps(direct)

    def test_precision_scaling(self):
        op = geometric_operator()
        prof = profile(op)
        r1 = continue_solution(op, prof, 1, [F(1)] * 200, gp(F(2, 3)), 96)
        r2 = continue_solution(op, prof, 1, [F(1)] * 400, gp(F(2, 3)), 192)
        with mpmath.workprec(96):
            l1 = mpmath.log(r1[-1].rad, 2)
            l2 = mpmath.log(r2[-1].rad, 2)
            assert l2 <= l1 / 2  # doubling precision at least halves log-radius

    def test_homotopy_invariance(self):
        op = geometric_operator()
        prof = profile(op)
        sing = _sing_points_numeric(op)
        target = gp(F(-3, 2), F(1, 2))
        a = continue_solution(op, prof, 2, [F(1)] * 300, target, 96)
        pb = plan_path(target, sing, upper=False)
        b = continue_solution(op, prof, 2, [F(1)] * 300, target, 96, path=pb)
        assert all(x.overlaps(y) for x, y in zip(a, b))

    def test_connection_vs_continuation_offcut(self):
        # spot instance of the acceptance-5 sweep
        op = polylog_operator(3)
        prof = profile(op)
        coeffs = provider_for("li3").coefficients(700)
        target = gp(F(-2), F(1))
        vals = continue_solution(op, prof, 0, coeffs, target, 160)
        with mpmath.workprec(220):
            oracle = polylog_connection(3, Ball(mpc(-2, 1)))
            got = vals[0]
            assert got.overlaps(oracle)
            assert abs(got.mid - oracle.mid) < mpf(2) ** -100

    def test_step_size_guard(self):
        op = geometric_operator()
        integ = CompanionIntegrator(build_system(profile(op), op, 1), 64)
        with mpmath.workprec(96):
            with pytest.raises(PathError):
                integ.step(gp(F(9, 10)), mpc("0.2"), [([mpc(1), mpc(1)], mpf(0))])


class TestVariationNumeric:
    def test_var1_li_s_closed_form(self):
        # var_1 Li_s = -2 i pi log(z)^(s-1)/(s-1)! for s <= 4 via loop monodromy
        for s in (1, 2, 3):
            op = polylog_operator(s)
            prof = profile(op)
            vd = variation_data(op, prof, 0, F(1), precision=128, local_order=24)
            with mpmath.workprec(160):
                idx = next(i for i, b in enumerate(vd.basis0.solutions)
                           if not b.is_holomorphic() or b.series.coefficient(1) != 0
                           if b.exponent == 1)
                # Li_s column: variation of theta^0 f at base point
                base = vd.base_point
                zb = Ball(mpc(mpf(base[0].numerator) / base[0].denominator,
                              mpf(base[1].numerator) / base[1].denominator))
                # reconstruct var(Y^f) at base from local coords
                acc = Ball(0)
                wb = zb - Ball.exact(F(1))
                logw = wb.log()
                t0 = prof.ell1 * 0 + 0  # S=0: components are theta^u f only
                for j, c in enumerate(vd.var_coords[idx]):
                    from gpade.continuation import eval_nilsson_at
                    val = eval_nilsson_at(vd.local_vectors[j][0], wb, logw, mpf(1))
                    acc = acc + val * c
                ref = var1_li_closed_form(s, zb.log())
                assert acc.overlaps(ref), s
                assert abs(acc.mid - ref.mid) < mpf(2) ** -64

    def test_meromorphic_variation_zero(self):
        op = geometric_operator()
        prof = profile(op)
        vd = variation_data(op, prof, 1, F(1), precision=128, local_order=24)
        with mpmath.workprec(160):
            # F = 1/(1-z) meromorphic at 1: variation of theta^0F vanishes;
            # the nonzero variation coords must weigh only integrable parts
            idx = 0
            # theta-block coordinate of var: reconstruct component ell1*S+0
            base = vd.base_point
            wb = Ball(mpc(mpf(base[0].numerator) / base[0].denominator) - 1)
            logw = wb.log()
            from gpade.continuation import eval_nilsson_at
            comp_idx = vd.comp.q - 1  # theta^0 f is the last (mu=1)
            acc = Ball(0)
            for j, c in enumerate(vd.var_coords[idx]):
                val = eval_nilsson_at(vd.local_vectors[j][comp_idx], wb, logw, mpf(1))
                acc = acc + val * c
            assert acc.contains_zero() or acc.abs_upper() < mpf(2) ** -60

    def test_lemma_finite_derivatives(self):
        # if f^(k) bounded at alpha for k <= K then var has order > K:
        # F_1^[s]-components of geometric F have s-1 bounded derivatives at 1
        op = geometric_operator()
        prof = profile(op)
        a = construct(op, None, n=2, r=0, S=3)
        from gpade.verify import variation_series
        vd = variation_data(op, prof, 3, F(1), precision=128, local_order=24)
        ts = variation_series(a, vd, 0)
        v, _w = ball_valuation(ts)
        # var_1(J_F) has order >= (S-r)n - kappa; here just positivity of order
        assert v is None or v >= 1


class TestJfEval:
    def test_three_way_small(self):
        op = geometric_operator()
        prof = profile(op)
        n, r, S = 1, 0, 1
        a = construct(op, [F(1)] * 100, n=n, r=r, S=S)
        comp = build_system(prof, op, S)
        vals = continue_solution(op, prof, S, [F(1)] * 300, gp(F(1, 3)), 128)
        with mpmath.workprec(160):
            prov = provider_for("geometric")
            primary, cross = jf_eval_checked(a, comp, 1, F(1, 3), vals, prov)
            # direct series summation of eq. (1.3)
            js = jf_series([F(1)] * 240, n, r, S, 200)
            zb = Ball.exact(F(1, 3))
            lz = zb.log()
            direct = js.eval_numeric(lambda k: ball_power_frac(zb, lz, k), lz)
            assert primary.overlaps(direct)
            assert primary.overlaps(cross)
            # frozen oracle: J_F(1/3) = sum z0^(k+2)/((k+1)(k+2))
            ref = mpmath.nsum(lambda k: (mpf(1) / 3) ** (k + 2) / ((k + 1) * (k + 2)),
                              [0, mpmath.inf])
            assert primary.contains_value(ref)

    def test_k2_quadrature(self):
        op = geometric_operator()
        prof = profile(op)
        a = construct(op, [F(1)] * 150, n=2, r=1, S=2)
        comp = build_system(prof, op, 2)
        vals = continue_solution(op, prof, 2, [F(1)] * 300, gp(F(1, 3)), 128)
        with mpmath.workprec(160):
            prov = provider_for("geometric")
            primary, cross = jf_eval_checked(a, comp, 2, F(1, 3), vals, prov,
                                             quad_nodes=16)
            assert primary.overlaps(cross)


class TestContours:
    def test_half_inside(self):
        with mpmath.workprec(96):
            cd = contour_bounds(provider_for("geometric"), mpc("0.5"), [mpc(1)])
            assert cd.epsilon > mpf("0.2")
            assert cd.g == max(mpf(1), 1 / cd.epsilon)
            assert cd.h > 0 and mpmath.isfinite(cd.h)

    def test_monotone_on_negative_ray(self):
        with mpmath.workprec(96):
            g = provider_for("geometric")
            gs = [contour_bounds(g, mpc(-mpf(t)), [mpc(1)]).g
                  for t in ("0.2", "0.5", "0.9", "2.0")]
            assert all(gs[i] >= gs[i + 1] - mpf("1e-20") for i in range(3))

    def test_on_cut_error(self):
        with mpmath.workprec(64):
            with pytest.raises(ContourGeometryError):
                contour_bounds(provider_for("geometric"), mpc(2), [mpc(1)])


class TestQuadratureNodes:
    def test_moments(self):
        with mpmath.workprec(128):
            for (a, b, N) in [(2, 3, 6), (9, 4, 12)]:
                nodes, weights = gauss_jacobi_01(a, b, N)
                for m in (0, 2, 5):
                    got = sum(w * t ** m for t, w in zip(nodes, weights))
                    ref = F(math.factorial(a + m) * math.factorial(b),
                            math.factorial(a + m + b + 1))
                    assert abs(got - mpf(ref.numerator) / ref.denominator) \
                        < mpf(2) ** -100
