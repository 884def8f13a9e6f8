import math
from fractions import Fraction

import mpmath
import pytest
from mpmath import mpf

from gpade.approximants import construct
from gpade.builtins import geometric_operator, polylog_operator
from gpade.certificates import (CertificateError, LindepCertificate, asymptotic_policy,
                                certify, criterion, delta_nK, house_growth,
                                measured_reduction_D, norm_clearing_factor,
                                predicted_bound)
from gpade.companion import build_system, derived_rows_for
from gpade.numberfield import NumberField, QQ, lcm_upto
from gpade.operators import profile

F = Fraction


class TestDelta:
    def test_formula_collapse(self):
        # v=1, S=1, ell=1, trivial T-norm: delta = d_n * D
        for n in (3, 7, 12):
            assert delta_nK(1, n, 1, 1, 5, 1) == lcm_upto(n) * 5

    def test_growth_trend(self):
        # delta^(1/n) drifts toward v * C2^S * e^S (monitored, D = 1 here)
        v, S, ell = 3, 2, 1
        rates = [math.log(delta_nK(v, n, S, ell, 1, 1)) / n for n in (50, 200, 800)]
        target = math.log(v) + S          # log(v e^S) with C2 = 1
        assert abs(rates[-1] - target) <= abs(rates[0] - target) + 0.05

    def test_integrality_clears_rows(self):
        op = geometric_operator()
        prof = profile(op)
        comp = build_system(prof, op, 2)
        a = construct(op, None, n=4, r=1, S=2)
        rows = derived_rows_for(a, comp, comp.q)
        z0 = F(1, 3)
        D, flag = measured_reduction_D(a, 4, 2)
        nf = norm_clearing_factor(comp.T_poly, z0, 3, 4 * comp.q, QQ)
        dl = delta_nK(3, 4, 2, prof.ell, D, nf)
        for k in range(1, comp.q + 1):
            for i in range(comp.q):
                v = rows.value(k, i, z0) * dl
                assert F(v).denominator == 1

    def test_exact_D_from_reduction_route(self):
        a = construct(polylog_operator(2), None, n=3, r=1, S=2, route="reduction")
        D, flag = measured_reduction_D(a, 3, 2)
        assert flag == "exact" and D == a.reduction_denominator


class TestCriterion:
    def test_synthetic_exact_rates(self):
        # houses 2^n, forms 4^-n -> tau = 2, bound = 3/[K:Q] to 1e-12
        with mpmath.workprec(96):
            hr = [(n, mpf(2) ** n) for n in range(4, 16)]
            fr = [(n, mpf(4) ** -n) for n in range(4, 16)]
            out = criterion(hr, fr, 1, False)
            assert abs(out["tau"] - 2) < 1e-12
            assert abs(out["bound_real"] - 3) < 1e-12
            assert out["bound_integer"] == 3

    def test_complex_field_doubling(self):
        with mpmath.workprec(96):
            hr = [(n, mpf(2) ** n) for n in range(4, 12)]
            fr = [(n, mpf(4) ** -n) for n in range(4, 12)]
            K = NumberField([1, 0, 1])
            out = criterion(hr, fr, K.degree, not K.is_real())
            assert abs(out["bound_real"] - 2 * (2 + 1) / 2) < 1e-12

    def test_degenerate_no_information(self):
        with mpmath.workprec(96):
            hr = [(n, mpf(2) ** n) for n in range(4, 12)]
            fr = [(n, mpf(2) ** (2 * n)) for n in range(4, 12)]  # growing forms
            out = criterion(hr, fr, 1, False)
            assert out["tau"] <= -1 + 1e-9
            assert not out["informative"]

    def test_scaling_invariance(self):
        # scaling every row by a common rational does not change invertibility
        from gpade.linalg import det_exact
        M = [[F(2), F(1)], [F(1), F(1)]]
        s = F(7, 3)
        d1 = det_exact(M)
        d2 = det_exact([[x * s for x in row] for row in M])
        assert bool(d1) == bool(d2)


class TestPolicy:
    def test_spec_values(self):
        assert asymptotic_policy(100)[0] == 4
        assert asymptotic_policy(3)[0] == 2

    def test_predicted_bound_monotone(self):
        vals = [predicted_bound(S, 1, 1.0, math.e) for S in (4, 16, 64, 256)]
        assert all(a < b for a, b in zip(vals, vals[1:]))


class TestHouseGrowth:
    def test_measured(self):
        op = geometric_operator()
        prof = profile(op)
        comp = build_system(prof, op, 2)
        approxes = [construct(op, None, n=n, r=1, S=2) for n in (3, 5, 7, 9)]
        out = house_growth(approxes, F(1, 3), comp.q, comp)
        assert all(h > 0 and mpmath.isfinite(h) for _n, h in out["houses"])
        hs = [h for _n, h in out["houses"]]
        assert hs[-1] > hs[0]
        assert out["within_envelope"]
        assert out["flag"] == "measured"


class TestCertify:
    def test_geometric_small_grid(self):
        cert = certify(geometric_operator(), [F(1)] * 500, F(1, 3),
                       function_name="geometric", S=4, r=2,
                       n_grid=[4, 6, 8, 10], precision=128,
                       escalate_once=False)
        assert cert.tau > 0
        assert cert.bound_integer >= 2
        assert all(b.invertible for b in cert.batches)
        assert cert.flags["integrality"] == "exact-checked"
        text = cert.serialize()
        assert "gpade-lindep-certificate" in text
        assert "tau" in text
        csv_text = cert.csv_table()
        assert csv_text.splitlines()[0].startswith("n,delta")

    def test_outside_disk_completes(self):
        # z0 = -2 (outside the unit disk, off the cut [1, inf))
        cert = certify(geometric_operator(), [F(1)] * 500, F(-2),
                       function_name="geometric", S=4, r=2,
                       n_grid=[4, 6, 8], precision=128, escalate_once=False)
        ms = [max(b.form_sizes) for b in cert.batches]
        assert ms[-1] < ms[0]   # forms shrink despite divergence of the series

    def test_z0_on_cut_rejected(self):
        with pytest.raises(CertificateError):
            certify(geometric_operator(), [F(1)] * 200, F(3, 2),
                    n_grid=[3, 4], escalate_once=False)

    def test_z0_singularity_rejected(self):
        with pytest.raises(CertificateError):
            certify(geometric_operator(), [F(1)] * 200, F(1),
                    n_grid=[3, 4], escalate_once=False)

    def test_determinism(self):
        kw = dict(function_name="geometric", S=3, r=1, n_grid=[3, 5],
                  precision=96, escalate_once=False)
        c1 = certify(geometric_operator(), [F(1)] * 300, F(1, 4), **kw)
        c2 = certify(geometric_operator(), [F(1)] * 300, F(1, 4), **kw)
        assert c1.serialize() == c2.serialize()
        assert c1.csv_table() == c2.csv_table()
