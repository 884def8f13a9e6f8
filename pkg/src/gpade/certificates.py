"""Siegel-type linear independence certificates.

Pipeline per point z0: construct approximants over an n-grid, select derived
rows of full rank at z0, clear denominators with exact delta_{n,K}, measure
the integer linear forms |sum p * theta| with certified balls, check
invertibility exactly, fit the growth rates and emit the dimension bound
(tau+1)/[K:Q] (doubled for complex fields).  Every ingredient carries an
exact / certified / measured / extrapolated flag.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp, mpf, mpc

from .approximants import ApproximantSet, construct, count_equations
from .balls import Ball
from .companion import (CompanionSystem, DerivedRows, build_system, derived_rows_for,
                        polynomial_relations, select_rows)
from .continuation import FamilyValues, combine_columns, continue_family, gp, solution_in_basis
from .numberfield import NFElement, NumberField, QQ, lcm_upto, house_of
from .operators import DifferentialOperator, OperatorProfile, profile
from .polynomials import Poly

CERT_VERSION = 1


class CertificateError(RuntimeError):
    pass


def delta_nK(v: int, n: int, S: int, ell: int, D: int, norm_factor: int) -> int:
    """delta_{n,K} = v^(n+1+S(ell-1)) d_n^S D |N_{K/Q}(v^(K deg T) T(z0)^K)|."""
    if v < 1:
        raise ValueError("v must clear the denominator of z0")
    return (v ** (n + 1 + S * (ell - 1))) * (lcm_upto(max(n, 1)) ** S) * D \
        * abs(norm_factor)


def norm_clearing_factor(T_poly: Poly, z0, v: int, K_cap: int,
                         fld: NumberField) -> int:
    """|N_{K/Q}((v^deg(T) T(z0))^K)| as a positive rational integer."""
    tz = T_poly(z0)
    if isinstance(tz, NFElement):
        base = tz * (v ** T_poly.degree)
        nrm = base.norm()
    else:
        nrm = Fraction(tz) * v ** T_poly.degree
        nrm = nrm ** fld.degree
    total = Fraction(nrm) ** K_cap
    if total.denominator != 1:
        raise CertificateError("norm clearing factor is not integral; bad v")
    return abs(int(total))


def measured_reduction_D(approx: ApproximantSet, n: int, S: int) -> tuple[int, str]:
    """Exact D(S, n+1) when the reduction route supplied it; else the measured
    coefficient denominator folded against d_n^S (flagged "measured")."""
    if approx.reduction_denominator is not None:
        return approx.reduction_denominator, "exact"
    C = approx.coefficient_denominator()
    dS = lcm_upto(max(n, 1)) ** S
    D = C // math.gcd(C, dS)
    return D, "measured"


def house_growth(approxes: list[ApproximantSet], z0, K_cap: int,
                 comp: CompanionSystem) -> dict:
    """Max-house per n of the delta-free row values P_{k,i}(z0), k <= K_cap,
    with a log-linear fitted rate and the theoretical envelope comparison
    (measured C1, so the envelope check is a shape check, flagged)."""
    from .companion import derived_rows_for
    per_n = []
    for a in approxes:
        rows = derived_rows_for(a, comp, K_cap)
        h = mpf(0)
        for k in range(1, K_cap + 1):
            for i in range(comp.q):
                v = rows.value(k, i, z0)
                if v:
                    h = max(h, house_of(v, 64))
        per_n.append((a.n, h))
    slope = _ls_slope([(n, mpmath.log(max(h, mpf("1e-300")))) for n, h in per_n])
    r, S = approxes[0].r, approxes[0].S
    env_factor = mpf(max(1, r ** r)) * 2 ** (S + r + 1) * max(mpf(1), house_of(z0, 64))
    C1_meas = max(mpf("1e-9"), mpmath.exp(slope) / env_factor) ** (mpf(1) / S)
    envelope_rate = C1_meas ** S * env_factor
    return {
        "houses": per_n,
        "rate": float(mpmath.exp(slope)),
        "C1_measured": float(C1_meas),
        "envelope_rate": float(envelope_rate),
        "within_envelope": bool(mpmath.exp(slope) <= envelope_rate * mpf("1.0001")),
        "flag": "measured",
    }


def asymptotic_policy(S: int) -> tuple[int, dict]:
    """r = floor(S / log(S)^2); advisory predicted bound needs measured
    C1, C2 (reported by certify)."""
    if S < 3:
        raise ValueError("policy defined for S >= 3")
    r = int(S / math.log(S) ** 2)
    return r, {"r": r, "formula": "floor(S/log(S)^2)"}


def predicted_bound(S: int, field_degree: int, C1: float, C2: float) -> float:
    CF = math.log(2 * math.e * C1 * C2)
    return math.log(S) / (field_degree * CF)


# ---------------------------------------------------------------------------

@dataclass
class LinearFormsBatch:
    n: int
    delta: int
    D_flag: str
    row_indices: list[int]              # the k_j
    entries: list[list]                 # N x N integer matrix (O_K elements)
    house_bound: mpf                    # max house over entries
    form_sizes: list[mpf]               # |sum_i p_i theta_i| upper bounds per j
    form_lowers: list[mpf]              # corresponding lower bounds
    invertible: bool


@dataclass
class LindepCertificate:
    version: int
    operator_hash: str
    function: str
    z0: str
    field_minpoly: list[int]
    field_degree: int
    r: int
    S: int
    m: int
    n_grid: list[int]
    theta_labels: list[str]
    pivot_labels: list[str]
    batches: list[LinearFormsBatch]
    log_a0: float                        # fitted per-n rate of delta*|J|
    log_b: float                         # fitted per-n rate of houses
    tau: float
    tau_worst_single: float
    bound_real: float
    bound_integer: int
    doubled_complex: bool
    flags: dict
    decay_table: list[tuple[int, float]] = field(default_factory=list)

    def serialize(self) -> str:
        out = [f"gpade-lindep-certificate v{self.version}"]
        out.append(f"operator {self.operator_hash} function {self.function}")
        out.append(f"z0 {self.z0} field {self.field_minpoly} degree {self.field_degree}")
        out.append(f"params r={self.r} S={self.S} m={self.m} n_grid={self.n_grid}")
        out.append("theta " + " ; ".join(self.theta_labels))
        out.append("eliminated " + (" ; ".join(self.pivot_labels) or "-"))
        for b in self.batches:
            out.append(f"n {b.n} delta {b.delta} D:{b.D_flag} rows {b.row_indices} "
                       f"house {mpmath.nstr(b.house_bound, 12)} "
                       f"maxform {mpmath.nstr(max(b.form_sizes), 12)} "
                       f"invertible {b.invertible}")
        out.append(f"rates log_a0 {self.log_a0!r} log_b {self.log_b!r}")
        out.append(f"tau {self.tau!r} tau_worst_single {self.tau_worst_single!r}")
        out.append(f"bound_real {self.bound_real!r} bound_integer {self.bound_integer} "
                   f"doubled {self.doubled_complex}")
        for k in sorted(self.flags):
            out.append(f"flag {k}: {self.flags[k]}")
        if self.decay_table:
            out.append("decay " + " ".join(f"{n}:{rate!r}" for n, rate in self.decay_table))
        return "\n".join(out) + "\n"

    def csv_table(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "delta", "house_bound", "max_form", "min_form_lower",
                    "rows", "invertible"])
        for b in self.batches:
            w.writerow([b.n, b.delta, mpmath.nstr(b.house_bound, 15),
                        mpmath.nstr(max(b.form_sizes), 15),
                        mpmath.nstr(min(b.form_lowers), 15),
                        " ".join(map(str, b.row_indices)), b.invertible])
        return buf.getvalue()


def criterion(house_rates: list[tuple[int, mpf]], form_rates: list[tuple[int, mpf]],
              field_degree: int, complex_field: bool) -> dict:
    """Fit log-linear rates and return tau and the dimension bound.

    house_rates / form_rates: per-n (n, positive value) with houses growing
    and forms shrinking; tau = -log a0/log b from least-squares slopes."""
    if len(house_rates) < 2:
        raise CertificateError("need at least two n values")
    log_b = _ls_slope([(n, mpmath.log(v)) for n, v in house_rates])
    log_a0 = _ls_slope([(n, mpmath.log(v)) for n, v in form_rates])
    if log_b <= 0:
        raise CertificateError("house rates do not grow; criterion inapplicable")
    tau = -log_a0 / log_b
    worst = None
    fr = dict(form_rates)
    hr = dict(house_rates)
    for n in fr:
        if fr[n] < 1 and hr[n] > 1:
            t = -mpmath.log(fr[n]) / mpmath.log(hr[n])
            worst = t if worst is None else min(worst, t)
    mult = 2 if complex_field else 1
    bound = mult * (tau + 1) / field_degree if tau > 0 else float("nan")
    out = {
        "log_a0": float(log_a0), "log_b": float(log_b), "tau": float(tau),
        "tau_worst_single": float(worst) if worst is not None else float("nan"),
        "bound_real": float(bound) if tau > 0 else float("nan"),
        "bound_integer": int(math.ceil(mult * (tau + 1) / field_degree - 1e-12))
        if tau > 0 else 0,
        "informative": tau > 0,
    }
    return out


def _ls_slope(pts: list[tuple[int, mpf]]) -> mpf:
    N = len(pts)
    sx = sum(mpf(n) for n, _ in pts)
    sy = sum(v for _, v in pts)
    sxx = sum(mpf(n) ** 2 for n, _ in pts)
    sxy = sum(mpf(n) * v for n, v in pts)
    den = N * sxx - sx ** 2
    return (N * sxy - sx * sy) / den


# ---------------------------------------------------------------------------

def _theta_labels(comp: CompanionSystem) -> list[str]:
    return [lab + "(z0)" for lab in comp.labels()]


def certify(L: DifferentialOperator, F_coeffs, z0: Fraction, *,
            function_name: str = "F",
            fld: NumberField = QQ,
            r: int | None = None, S: int | None = None, m: int | None = None,
            n_grid: list[int] | None = None,
            precision: int = 256,
            route: str = "solve",
            escalate_once: bool = True) -> LindepCertificate:
    """End-to-end certificate for the K-span of {F_u^[s](z0), theta^u F(z0)}."""
    prof = profile(L, m_override=m)
    if S is None:
        S = max(4, prof.max_log_power + 2)
    if r is None:
        r = max(1, asymptotic_policy(max(S, 3))[0])
    z0 = Fraction(z0)
    if z0 == 0:
        raise CertificateError("z0 must be nonzero")
    for sng in prof.sigma:
        if sng.exact and isinstance(sng.value, Fraction):
            if sng.value == z0:
                raise CertificateError("z0 is a singularity of L")
            if _on_ray(z0, sng.value):
                raise CertificateError(f"z0 lies on the cut from {sng.value}")
    if n_grid is None:
        base = max(prof.ell1, 2)
        n_grid = [base + 2 * j for j in range(8)]
    cert = _certify_grid(L, F_coeffs, z0, prof, r, S, n_grid, precision,
                         function_name, fld, route)
    if cert.tau <= 0 and escalate_once:
        S2 = S + 2
        r2 = max(1, asymptotic_policy(S2)[0])
        cert = _certify_grid(L, F_coeffs, z0, prof, r2, S2, n_grid, precision,
                             function_name, fld, route)
        cert.flags["escalated"] = f"tau<=0 at S={S}; retried with S={S2} per asymptotic_policy"
    return cert


def _on_ray(z0: Fraction, alpha: Fraction) -> bool:
    # both rational: ray from alpha through t*alpha, t>=1
    if alpha == 0:
        return False
    t = z0 / alpha
    return t >= 1


def _certify_grid(L, F_coeffs, z0, prof, r, S, n_grid, precision,
                  function_name, fld, route) -> LindepCertificate:
    comp = build_system(prof, L, S)
    rel = polynomial_relations(L, z0, comp, prof.polynomial_kernel)
    reduced = rel.reduced_indices(comp.q)
    v = int(Fraction(z0).denominator)
    K_cap = 4 * comp.q
    norm_fac = norm_clearing_factor(comp.T_poly, z0, v, K_cap, fld)
    flags = {
        "delta": "exact",
        "integrality": "exact-checked",
        "invertibility": "exact determinant",
        "forms": "certified balls (measured-majorant series tails)",
        "houses": "certified upper bounds",
        "rates": "least-squares fit over the n-grid (extrapolated)",
        "criterion-asymptotic-hypothesis": "extrapolated beyond tested range",
    }
    # exact phase: approximants, row selection, denominators, houses
    exact_rows = []
    from .linalg import det_exact
    for n in n_grid:
        approx = construct(L, F_coeffs, n=n, r=r, S=S, m=prof.m,
                           prof=prof, route=route)
        rows = derived_rows_for(approx, comp, comp.q)
        sel = select_rows(rows, z0, len(rel.pivot_indices),
                          reduced_columns=reduced, K_cap=K_cap)
        D, D_flag = measured_reduction_D(approx, n, S)
        dl = delta_nK(v, n, S, prof.ell, D, norm_fac)
        entries = []
        houses = []
        full_rows = []
        for k in sel.indices:
            rowvals = [rows.value(k, i, z0) for i in range(comp.q)]
            full_rows.append(rowvals)
            ints = []
            for i in reduced:
                val = rowvals[i] * dl
                _check_integral(val)
                ints.append(val)
                houses.append(house_of(val, 96))
            entries.append(ints)
        inv = bool(det_exact(entries))
        exact_rows.append((n, approx, sel, dl, D_flag, entries, max(houses),
                           full_rows, inv))
    # precision needed to see through the cancellation in the linear forms
    max_house = max(h for (_n, _a, _s, _d, _f, _e, h, _fr, _i) in exact_rows)
    bits_cancel = int(mpmath.ceil(mpmath.log(max_house, 2))) if max_house > 1 else 0
    prec_eff = max(precision, bits_cancel + 192)
    flags["working-precision"] = str(prec_eff)
    vals = continue_family(L, prof, S, gp(z0), prec_eff)
    coords = solution_in_basis(vals.basis0,
                               [Fraction(c) for c in F_coeffs[:int(vals.basis0.order)]])
    with mpmath.workprec(prec_eff + 32):
        y_full = combine_columns(vals, coords)
        theta = []
        for i in reduced:
            th = y_full[i]
            for t, piv in enumerate(rel.pivot_indices):
                lam = rel.lambdas.get((i, t + 1))
                if lam:
                    th = th + y_full[piv] * lam
            theta.append(th)
        batches = []
        decay = []
        for (n, approx, sel, dl, D_flag, entries, hmax, full_rows, inv) in exact_rows:
            fsz, flo = [], []
            for rowvals in full_rows:
                acc = Ball(0)
                for i in range(comp.q):
                    if rowvals[i]:
                        acc = acc + y_full[i] * rowvals[i]
                acc = acc * dl
                fsz.append(acc.abs_upper())
                flo.append(acc.abs_lower())
            batches.append(LinearFormsBatch(
                n=n, delta=dl, D_flag=D_flag, row_indices=sel.indices,
                entries=entries, house_bound=hmax,
                form_sizes=fsz, form_lowers=flo, invertible=inv))
            if sel.indices[0] == 1:
                J1 = batches[-1].form_sizes[0] / dl
                decay.append((n, float(J1 ** (mpf(1) / n))))
        ok_batches = [b for b in batches if b.invertible]
        if len(ok_batches) < 2:
            raise CertificateError("not enough invertible batches for the criterion")
        if len(ok_batches) < len(batches):
            flags["excluded-n"] = str([b.n for b in batches if not b.invertible])
        house_rates = [(b.n, b.house_bound) for b in ok_batches]
        form_rates = [(b.n, max(b.form_sizes)) for b in ok_batches]
        crit = criterion(house_rates, form_rates, fld.degree, not fld.is_real())
    pivots = [_theta_labels(comp)[i] for i in rel.pivot_indices]
    return LindepCertificate(
        version=CERT_VERSION, operator_hash=L.hash_key(), function=function_name,
        z0=str(z0), field_minpoly=list(fld.minimal_polynomial),
        field_degree=fld.degree, r=r, S=S, m=prof.m, n_grid=list(n_grid),
        theta_labels=[_theta_labels(comp)[i] for i in reduced],
        pivot_labels=pivots, batches=batches,
        log_a0=crit["log_a0"], log_b=crit["log_b"], tau=crit["tau"],
        tau_worst_single=crit["tau_worst_single"],
        bound_real=crit["bound_real"], bound_integer=crit["bound_integer"],
        doubled_complex=not fld.is_real(), flags=flags, decay_table=decay)


def _check_integral(x):
    if isinstance(x, NFElement):
        if x.denominator_lcm() != 1:
            raise CertificateError("delta-cleared entry not an algebraic integer")
    else:
        if Fraction(x).denominator != 1:
            raise CertificateError("delta-cleared entry not an integer")
