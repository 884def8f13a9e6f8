"""Verification of the Pade approximation problem for a constructed
approximant set: exact order checks at 0, exact monomial/valuation checks,
and certified-numerical variation order checks at the nonzero singularities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp, mpf

from .approximants import ApproximantSet, jf_of_solution
from .balls import Ball, ball_linear_solve
from .companion import CompanionSystem, build_system
from .continuation import (CompanionIntegrator, eval_nilsson_at, gp, gp_to_mpc,
                           initial_columns, plan_loop, plan_path)
from .localbasis import LocalBasis, local_basis
from .nilsson import NilssonSeries
from .operators import DifferentialOperator, OperatorProfile, profile
from .polynomials import Poly


@dataclass
class ConditionRecord:
    condition: str            # "(i)-hol", "(i)-nonhol", "(ii)@alpha", "(iii)"
    subject: str              # which basis element / polynomial
    required: Fraction | None
    achieved: Fraction | None
    kappa: Fraction | None
    passed: bool
    exactness: str            # "exact" | "certified-numerical"
    note: str = ""


@dataclass
class PadeReport:
    records: list[ConditionRecord]
    kappa_measured: Fraction
    unknowns: int
    equations: int
    all_passed: bool

    def lines(self) -> list[str]:
        out = []
        for r in self.records:
            status = "pass" if r.passed else "FAIL"
            req = "-" if r.required is None else str(r.required)
            ach = "-" if r.achieved is None else str(r.achieved)
            out.append(f"[{status}] {r.condition:<12} {r.subject:<12} "
                       f"required>={req:<8} achieved={ach:<8} ({r.exactness})"
                       + (f"  {r.note}" if r.note else ""))
        out.append(f"kappa measured: {self.kappa_measured}")
        out.append(f"counting: {self.unknowns} unknowns vs {self.equations} equations")
        return out


# ---------------------------------------------------------------------------
# exact local companion basis at a nonzero point alpha in K

def local_companion_basis(comp: CompanionSystem, alpha, order: int
                          ) -> list[list[NilssonSeries]]:
    """q exact solution vectors of Y' = AY expanded at alpha (in w = z-alpha):
    mu lifts of the local L-basis (ev_alpha-normalized primitives) plus
    ell1*S log-free cascade solutions."""
    L, prof, S = comp.L, comp.prof, comp.S
    ell1, mu, q = prof.ell1, prof.mu, comp.q
    lb = local_basis(L, alpha, truncation_order=order)
    inv_alpha_w = _inverse_linear_series(alpha, order + 2)
    out = []
    for sol in lb.solutions:
        g = sol.series
        vec: list[NilssonSeries] = [None] * q
        # theta^u g with theta = (alpha + w) d/dw
        cur = g
        for u in range(mu):
            vec[ell1 * S + u] = cur
            if u + 1 < mu:
                cur = cur.derivative().mul_poly([alpha, Fraction(1)])
        for u in range(1, ell1 + 1):
            prev = None
            for s in range(1, S + 1):
                if s == 1:
                    integrand = g.mul_poly(_linear_power(alpha, u - 1))
                else:
                    integrand = prev * inv_alpha_w
                ys = integrand.primitive_ev0()
                vec[(u - 1) * S + (s - 1)] = ys
                prev = ys
        out.append(vec)
    for u0 in range(1, ell1 + 1):
        for s0 in range(1, S + 1):
            vec = [NilssonSeries.zero(Fraction(order)) for _ in range(q)]
            cur = NilssonSeries.monomial(Fraction(1), 0, 0, order=Fraction(order))
            vec[(u0 - 1) * S + (s0 - 1)] = cur
            for s in range(s0 + 1, S + 1):
                cur = (cur * inv_alpha_w).primitive_ev0()
                vec[(u0 - 1) * S + (s - 1)] = cur
            out.append(vec)
    return out


def _inverse_linear_series(alpha, T: int) -> NilssonSeries:
    """1/(alpha + w) as a truncated series in w (alpha != 0)."""
    inv = Fraction(1) / alpha if isinstance(alpha, Fraction) else alpha.inverse()
    terms = {}
    cur = inv
    for t in range(T):
        terms[(Fraction(t), 0)] = cur
        cur = -cur * inv
    return NilssonSeries(terms, order=Fraction(T))


def _linear_power(alpha, e: int) -> list:
    out = Poly([Fraction(1)])
    lin = Poly([alpha, Fraction(1)])
    for _ in range(e):
        out = out * lin
    return out.coeffs if out.coeffs else [Fraction(0)]


def remainder_series(approx: ApproximantSet, vec: list[NilssonSeries], alpha
                     ) -> NilssonSeries:
    """R(B) = sum_i P_i(alpha + w) B_i(w), exact at alpha."""
    polys = approx.polynomials_in_index_order()
    acc = None
    for p, comp_series in zip(polys, vec):
        if p.is_zero():
            continue
        part = comp_series.mul_poly(p.shift(alpha).coeffs)
        acc = part if acc is None else acc + part
    return acc if acc is not None else NilssonSeries.zero(vec[0].order)


# ---------------------------------------------------------------------------
# variation data via loop continuation (cached per (L,S,alpha,prec))

_VARIATION_CACHE: dict = {}


@dataclass
class VariationData:
    alpha: object
    base_point: tuple
    comp: CompanionSystem
    basis0: LocalBasis
    local_vectors: list[list[NilssonSeries]]
    var_coords: list[list[Ball]]     # per 0-basis f: coords of var(Y^f) in local vecs
    sol_coords: list[list[Ball]]     # per 0-basis f: coords of Y^f itself
    nonhol_flags: list[bool]         # per local vector: non-holomorphic at alpha
    precision: int


def variation_data(L: DifferentialOperator, prof: OperatorProfile, S: int,
                   alpha, precision: int = 256,
                   local_order: int = 48) -> VariationData:
    key = (L.hash_key(), S, repr(alpha), precision, local_order, prof.m)
    hit = _VARIATION_CACHE.get(key)
    if hit is not None:
        return hit
    a_gp = gp(alpha) if isinstance(alpha, (int, Fraction)) else alpha
    with mpmath.workprec(precision + 32):
        comp = build_system(prof, L, S)
        integ = CompanionIntegrator(comp, precision)
        base, loop = plan_loop(a_gp, integ.sing)
        path = plan_path(base, integ.sing)
        z0 = gp_to_mpc(path.waypoints[0])
        rmin = min((abs(p) for p in integ.sing if abs(p) > mpf("1e-30")),
                   default=mpf(1))
        bits = -mpmath.log(abs(z0) / (rmin * mpf("0.95")), 2)
        need = int(mpmath.ceil((precision + 24) / max(mpf("0.5"), bits))) + 24
        basis0 = local_basis(L, 0, truncation_order=need)
        cols0 = initial_columns(comp, basis0, path.waypoints[0], precision)
        colsb = integ.run(path, cols0)
        colst = integ.run(loop, colsb)
        V = [[t - b for t, b in zip(ct, cb)] for ct, cb in zip(colst, colsb)]
        # exact local vectors at alpha, evaluated at the base point
        lv = local_companion_basis(comp, Fraction(alpha) if not isinstance(alpha, Fraction) else alpha,
                                   local_order)
        wb = Ball(gp_to_mpc(base) - gp_to_mpc(a_gp))
        logw = wb.log()
        dloc = _local_radius(a_gp, integ.sing)
        M = [[eval_nilsson_at(lv[j][i], wb, logw, dloc) for j in range(comp.q)]
             for i in range(comp.q)]
        var_coords = [ball_linear_solve(M, v) for v in V]
        sol_coords = [ball_linear_solve(M, y) for y in colsb]
        nonhol = []
        for vec in lv:
            flag = False
            for s in vec:
                if s.max_log_power() > 0 or any(k < 0 or k.denominator != 1
                                                for (k, _i) in s.terms):
                    flag = True
                    break
            nonhol.append(flag)
        vd = VariationData(alpha=alpha, base_point=base, comp=comp, basis0=basis0,
                           local_vectors=lv, var_coords=var_coords,
                           sol_coords=sol_coords, nonhol_flags=nonhol,
                           precision=precision)
    _VARIATION_CACHE[key] = vd
    return vd


def _local_radius(a_gp, sing):
    am = gp_to_mpc(a_gp)
    others = [p for p in sing if abs(p - am) > mpf("1e-30")]
    return min([min((abs(am - p) for p in others), default=mpf(1)), abs(am)])


def variation_series(approx: ApproximantSet, vd: VariationData, f_index: int
                     ) -> NilssonSeries:
    """var_alpha(J_f) = sum_j c_j R(B_j) with ball coefficients (exact R)."""
    acc = None
    for j, c in enumerate(vd.var_coords[f_index]):
        R = remainder_series(approx, vd.local_vectors[j],
                             Fraction(vd.alpha) if not isinstance(vd.alpha, Fraction)
                             else vd.alpha)
        part = R.map_coefficients(lambda x: Ball.exact(x) * c)
        acc = part if acc is None else acc + part
    return acc


def ball_valuation(series: NilssonSeries):
    """(achieved_order, witness): least exponent whose coefficient ball
    excludes zero; exponents below must all be consistent with zero."""
    for (k, i) in sorted(series.terms):
        c = series.terms[(k, i)]
        if isinstance(c, Ball):
            if not c.contains_zero():
                return k, c
        elif c:
            return k, c
    return None, None


# ---------------------------------------------------------------------------

def verify_pade(approx: ApproximantSet, L: DifferentialOperator,
                prof: OperatorProfile | None = None,
                check_variation: bool = True,
                precision: int = 256,
                kappa_cap: int = 10) -> PadeReport:
    """Run the full condition suite; (i)/(iii) exact, (ii) certified-numerical."""
    from .approximants import count_equations
    if prof is None:
        prof = profile(L, m_override=approx.m)
    n, r, S = approx.n, approx.r, approx.S
    records: list[ConditionRecord] = []
    kappa = Fraction(0)
    guard = n + 8
    basis0 = local_basis(L, 0, truncation_order=(r + 1) * n + 2 + prof.mu + guard)
    # (i): orders at 0, exact
    for idx, sol in enumerate(basis0.solutions):
        f = sol.series
        jf = jf_of_solution(approx, f, route="poly")
        v = jf.valuation()
        hol = sol.is_holomorphic()
        name = f"f[{idx}]"
        if hol:
            req = Fraction((r + 1) * n + 1)
            if v is None:
                ok, ach = True, None
                note = "J_f identically zero (polynomial kernel)" \
                    if basis0.polynomial_flags[idx] else "J_f vanished to guard order"
            else:
                ok, ach, note = v >= req, v, ""
            records.append(ConditionRecord("(i)-hol", name, req, ach, None, ok,
                                           "exact", note))
        else:
            req = Fraction(n - kappa_cap)
            ach = v if v is not None else None
            kk = max(Fraction(0), Fraction(n) - ach) if ach is not None else Fraction(0)
            kappa = max(kappa, kk)
            ok = ach is None or ach >= req
            records.append(ConditionRecord("(i)-nonhol", name, req, ach, kk, ok,
                                           "exact"))
        if basis0.polynomial_flags[idx] and r >= 1:
            ok = v is None
            records.append(ConditionRecord("(i)-polyker", name, None,
                                           v if v is not None else None, None, ok,
                                           "exact",
                                           "J_f must vanish identically for r>=1"))
    # (iii): monomial / valuation conditions, exact
    for u in range(1, prof.m):
        for s in range(1, S + 1):
            p = approx.P[(u, s)]
            val = Fraction(p.valuation()) if not p.is_zero() else None
            req = Fraction(n + 1 - u)
            ok = p.is_zero() or (val >= req and p.degree == n + 1 - u)
            records.append(ConditionRecord("(iii)", f"P[{u},{s}]", req, val, None,
                                           ok, "exact"))
    # (ii): variation orders at each nonzero singularity, certified-numerical
    if check_variation and r < S:
        for sng in prof.sigma:
            if not sng.exact:
                records.append(ConditionRecord(
                    "(ii)", repr(sng), None, None, None, False,
                    "certified-numerical",
                    "singularity not representable in K; variation not checked"))
                continue
            alpha = sng.value
            need = (S - r) * n + 12
            vd = variation_data(L, prof, S, alpha, precision=precision,
                                local_order=need)
            with mpmath.workprec(precision + 32):
                for idx in range(len(vd.basis0.solutions)):
                    ts = variation_series(approx, vd, idx)
                    ach, _w = ball_valuation(ts)
                    req = Fraction((S - r) * n - kappa_cap)
                    # identically-zero (within balls) <-> holomorphic at alpha
                    var_zero = ach is None
                    hol_at_alpha = all(
                        c.contains_zero() for j, c in
                        enumerate(vd.sol_coords[idx]) if vd.nonhol_flags[j])
                    kk = max(Fraction(0), Fraction((S - r) * n) - ach) \
                        if ach is not None else Fraction(0)
                    kappa = max(kappa, kk)
                    ok = var_zero or ach >= req
                    note = ""
                    if var_zero != hol_at_alpha:
                        ok = False
                        note = "zero-iff-holomorphic dichotomy violated"
                    elif var_zero:
                        note = "var == 0 (holomorphic at alpha)"
                    records.append(ConditionRecord(
                        f"(ii)@{alpha}", f"f[{idx}]", req, ach, kk, ok,
                        "certified-numerical", note))
    unknowns, equations, _diff = count_equations(prof, n, r, S)
    return PadeReport(records=records, kappa_measured=kappa,
                      unknowns=unknowns, equations=equations,
                      all_passed=all(rec.passed for rec in records))
