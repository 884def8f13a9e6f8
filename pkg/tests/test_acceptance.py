"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run as `pytest -v -s tests/test_acceptance.py` to see the per-criterion lines
alongside pytest's own verdicts.
"""
import math
import random
import time
from fractions import Fraction

import mpmath
import pytest
from mpmath import mp, mpc, mpf

from gpade.approximants import construct, count_equations, jf_of_solution
from gpade.balls import Ball
from gpade.builtins import geometric_operator, polylog_operator
from gpade.certificates import certify
from gpade.companion import (build_system, derived_rows_for, generic_rank,
                             kernel_solution_vector, polynomial_relations,
                             select_rows)
from gpade.continuation import eval_nilsson_at, gp
from gpade.contours import contour_bounds, jf_decay_bound
from gpade.evalnum import continue_solution, jf_eval
from gpade.localbasis import local_basis
from gpade.nilsson import NilssonSeries, binomial_telescoping_check
from gpade.numberfield import lcm_upto
from gpade.operators import profile
from gpade.partialfractions import partial_fractions
from gpade.polylogs import polylog_connection, provider_for, var1_li_closed_form
from gpade.verify import variation_data, verify_pade

F = Fraction


def _report(num: int, name: str, ok: bool, detail: str = ""):
    line = f"ACCEPTANCE {num} [{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f" -- {detail}"
    print("\n" + line)
    assert ok, line


_CONSTRUCT_CACHE = {}


def _constructed(op_name, n, r, S):
    key = (op_name, n, r, S)
    if key not in _CONSTRUCT_CACHE:
        if op_name == "geometric":
            op = geometric_operator()
            Fc = [F(1)] * 400
        else:
            op = polylog_operator(2)
            Fc = None
        _CONSTRUCT_CACHE[key] = (op, construct(op, Fc, n=n, r=r, S=S))
    return _CONSTRUCT_CACHE[key]


def test_criterion_1_partial_fractions():
    t0 = time.time()
    rng = random.Random(20260809)
    checked = 0
    for n in range(0, 21):
        for r in range(0, 3):
            for S in range(max(r, 1), 5):
                t = partial_fractions(n, r, S)
                dS = lcm_upto(max(n, 1)) ** S
                env = F((r * n + 1) * 2 ** S) * F(max(1, r ** r) * 2 ** (S + r + 1)) ** n
                for cv in t.c.values():
                    assert (cv * dS).denominator == 1
                    assert abs(cv) <= env
                hits = 0
                while hits < 20:
                    k = F(rng.randint(-80, 80), rng.choice([1, 2, 3, 5]))
                    if k.denominator == 1 and -int(k) in range(1, n + 2):
                        continue
                    assert t.reconstruct(k) == t.weight(k), (n, r, S, k)
                    hits += 1
                checked += 1
    el = time.time() - t0
    _report(1, "partial-fraction suite (exact, n<=20, r<=2, S<=4)",
            el < 60, f"{checked} tables, {el:.1f}s")


def test_criterion_2_fjs_suite():
    t0 = time.time()
    rng = random.Random(77)
    for trial in range(200):
        terms = {}
        for _ in range(rng.randint(1, 8)):
            k = F(rng.randint(-4, 8), rng.choice([1, 2]))
            terms[(k, rng.randint(0, 3))] = F(rng.randint(-9, 9), rng.randint(1, 4))
        f = NilssonSeries(terms, order=10)
        j = rng.randint(1, 4)
        s = rng.randint(0, 4)
        a = f.fjs(j, s)
        b = f.fjs_recursive(j, s)
        assert (a - b).is_zero() and a.order == b.order
    for i in range(13):
        for j in range(i + 1):
            for s in range(13):
                assert binomial_telescoping_check(i, j, s)
    el = time.time() - t0
    _report(2, "f_j^[s] explicit==recursive (200 random) + identity (2.4)",
            el < 60, f"{el:.1f}s")


def test_criterion_3_pade_construction():
    t0 = time.time()
    worst_kappa = F(0)
    count = 0
    for op_name in ("geometric", "li2"):
        for S in (2, 3):
            for r in (0, 1, 2):
                base_op, _ = _constructed(op_name, 1, 0, max(S, 2)) \
                    if False else (None, None)
                op = geometric_operator() if op_name == "geometric" \
                    else polylog_operator(2)
                prof = profile(op)
                for n in range(prof.ell1, prof.ell1 + 6):
                    _, approx = _constructed(op_name, n, r, S)
                    rep = verify_pade(approx, op, prof=prof, precision=256)
                    assert rep.all_passed, (op_name, n, r, S, [
                        rc for rc in rep.records if not rc.passed])
                    worst_kappa = max(worst_kappa, rep.kappa_measured)
                    count += 1
    el = time.time() - t0
    _report(3, "Pade construction + Theorem conditions (both demo operators)",
            el < 600 and worst_kappa <= 10,
            f"{count} instances, kappa<= {worst_kappa}, {el:.1f}s")


def test_criterion_4_shidlovsky():
    t0 = time.time()
    ok_rank = True
    z0 = F(1, 3)
    for op_name in ("geometric", "li2"):
        op = geometric_operator() if op_name == "geometric" else polylog_operator(2)
        prof = profile(op)
        for (n, r, S) in [(3, 1, 2), (4, 2, 3), (5, 1, 3)]:
            _, approx = _constructed(op_name, n, r, S)
            comp = build_system(prof, op, S)
            rows = derived_rows_for(approx, comp, max(comp.q, 6))
            # Eq (5.2) exact for k <= 6 on every basis solution
            basis = local_basis(op, 0, 40)
            fam_polys = approx.polynomials_in_index_order()
            for sol in basis.solutions:
                f = sol.series
                Y = [f.fjs(u, s_) for u in range(1, prof.ell1 + 1)
                     for s_ in range(1, S + 1)]
                g = f
                for u in range(prof.mu):
                    Y.append(g)
                    if u + 1 < prof.mu:
                        g = g.theta()
                R = None
                for p, y in zip(fam_polys, Y):
                    part = y.mul_poly(p.coeffs)
                    R = part if R is None else R + part
                for k in range(1, 7):
                    lhs = R
                    for _ in range(k - 1):
                        lhs = lhs.derivative()
                    for _ in range(k - 1):
                        lhs = lhs.mul_poly(comp.T_poly.coeffs)
                    acc = None
                    for i, y in enumerate(Y):
                        part = y.mul_poly(rows.numerators[k - 1][i].coeffs)
                        acc = part if acc is None else acc + part
                    lim = min(lhs.order, acc.order)
                    assert (lhs - acc).truncate(lim).is_zero(), (op_name, n, r, S, k)
            # rank(M) = q - rho for r >= 1
            rk = generic_rank(rows)
            ok_rank &= (rk == comp.q - prof.rho)
            # J_f == 0 exactly for polynomial kernel solutions
            for fp in prof.polynomial_kernel:
                Yp = kernel_solution_vector(fp, comp)
                for k in range(1, comp.q + 1):
                    acc = None
                    for i in range(comp.q):
                        t_ = rows.numerators[k - 1][i] * Yp[i]
                        acc = t_ if acc is None else acc + t_
                    assert acc.is_zero()
            # row selection within the cap
            rel = polynomial_relations(op, z0, comp, prof.polynomial_kernel)
            sel = select_rows(rows, z0, prof.rho,
                              reduced_columns=rel.reduced_indices(comp.q))
            assert sel.K_max <= 4 * comp.q
    el = time.time() - t0
    _report(4, "Shidlovsky suite (Eq 5.2 exact, rank q-rho, selection cap)",
            ok_rank and el < 300, f"{el:.1f}s")


def test_criterion_5_analytic_continuation():
    t0 = time.time()
    rng = random.Random(5)
    pts = []
    while len(pts) < 20:
        re = F(rng.randint(-40, 40), 10)
        im = F(rng.randint(-40, 40), 10)
        zr = mpc(float(re), float(im))
        if abs(zr) <= 1.05 or (im == 0 and re > 0):
            continue
        pts.append((re, im))
    checked = 0
    with mpmath.workprec(320):
        for idx, (re, im) in enumerate(pts):
            s = 1 + (idx % 5)
            op = polylog_operator(s)
            prof = profile(op)
            coeffs = provider_for(f"li{s}").coefficients(1200)
            vals = continue_solution(op, prof, 0, coeffs, gp(re, im), 256)
            oracle = polylog_connection(s, Ball(mpc(mpf(re.numerator) / re.denominator,
                                                    mpf(im.numerator) / im.denominator)))
            got = vals[0]
            assert got.overlaps(oracle), (re, im, s)
            checked += 1
        # var_1 Li_s closed form for s <= 5
        for s in range(1, 6):
            op = polylog_operator(s)
            prof = profile(op)
            vd = variation_data(op, prof, 0, F(1), precision=256, local_order=24)
            idx = next(i for i, b in enumerate(vd.basis0.solutions)
                       if b.exponent == 1)
            base = vd.base_point
            zb = Ball(mpc(mpf(base[0].numerator) / base[0].denominator,
                          mpf(base[1].numerator) / base[1].denominator))
            wb = zb - Ball.exact(F(1))
            logw = wb.log()
            acc = Ball(0)
            for j, c in enumerate(vd.var_coords[idx]):
                val = eval_nilsson_at(vd.local_vectors[j][0], wb, logw, mpf(1))
                acc = acc + val * c
            ref = var1_li_closed_form(s, zb.log())
            assert acc.overlaps(ref), s
    el = time.time() - t0
    _report(5, "Li_s continuation vs connection formula (20 pts) + var_1 Li_s",
            el < 300, f"{checked} points, s<=5, {el:.1f}s")


def test_criterion_6_decay_outside_disk():
    t0 = time.time()
    op = geometric_operator()
    prof = profile(op)
    r, S = 1, 4
    # z0 ~ 2 e^{i pi/3} as an exact Gaussian rational
    z0 = (F(1), F(1732050808, 10 ** 9))
    comp = build_system(prof, op, S)
    vals = continue_solution(op, prof, S, [F(1)] * 900, z0, 224)
    with mpmath.workprec(280):
        zm = mpc(mpf(z0[0].numerator) / z0[0].denominator,
                 mpf(z0[1].numerator) / z0[1].denominator)
        cd = contour_bounds(provider_for("geometric"), zm, [mpc(1)])
        rhs = jf_decay_bound(zm, cd.g, r, S)
        zball = Ball(zm)
        sizes = []
        for n in range(4, 17):
            approx = construct(op, [F(1)] * 400, n=n, r=r, S=S, prof=prof)
            rows = derived_rows_for(approx, comp, 1)
            J = jf_eval(rows, 1, zball, vals)
            up = J.abs_upper()
            sizes.append((n, up, up ** (mpf(1) / n)))
        shrink = sizes[-1][1] < sizes[0][1] * mpf("1e-6") and sizes[-1][1] < 1
        within = all(root <= mpf("1.2") * rhs for _n, _u, root in sizes)
        detail = (f"|J| from {mpmath.nstr(sizes[0][1], 3)} to "
                  f"{mpmath.nstr(sizes[-1][1], 3)}; max root "
                  f"{mpmath.nstr(max(s[2] for s in sizes), 4)} vs bound "
                  f"{mpmath.nstr(mpf('1.2') * rhs, 4)}")
    el = time.time() - t0
    _report(6, "J_F decay outside the disk (z0 = 2e^{i pi/3}, r=1, S=4)",
            bool(shrink and within and el < 300), detail + f", {el:.1f}s")


def test_criterion_7_end_to_end_certificate():
    t0 = time.time()
    cert = certify(geometric_operator(), [F(1)] * 1200, F(1, 3),
                   function_name="geometric",
                   n_grid=[2, 4, 6, 8, 10, 12, 14, 16],
                   precision=256)
    el = time.time() - t0
    ok = (cert.tau > 0 and cert.bound_integer >= 2
          and all(b.invertible for b in cert.batches)
          and cert.flags["integrality"] == "exact-checked"
          and el < 1800)
    _report(7, "end-to-end certificate at z0=1/3 (dim span {1, Li_s(1/3)} >= 2)",
            ok, f"tau={cert.tau:.4f}, real bound={cert.bound_real:.4f}, "
                f"integer bound={cert.bound_integer}, S={cert.S}, r={cert.r}, "
                f"{el:.1f}s")


def test_criterion_8_counting_identity():
    t0 = time.time()
    profs = [profile(geometric_operator()),
             profile(polylog_operator(2)),
             profile(geometric_operator(), m_override=3)]
    for prof in profs:
        lead_unknowns = prof.ell1 * 5 + prof.mu
        lead_equations = prof.mu + prof.ell * 5 + (prof.m - 1) * 5
        assert lead_unknowns == lead_equations   # via ell1 = ell + m - 1 at S=5
        for (r, S) in [(1, 3), (2, 5)]:
            diffs = {count_equations(prof, n, r, S)[2]
                     for n in range(6, 12)}
            assert len(diffs) == 1
    el = time.time() - t0
    _report(8, "counting identity (difference constant in n, 3 profiles)",
            el < 1.0, f"{el:.3f}s")
