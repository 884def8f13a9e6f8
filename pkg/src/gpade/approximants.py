"""Construction of the approximant polynomials {P_{u,s,n}, P~_{u,n}}.

Primary route ("solve"): impose the identity

    sum_{u,s} P_{u,s,n} f_u^[s] + sum_u P~_{u,n} theta^u f
        = sum_{j=1}^{n+1} sum_s c_{j,s,n} z^(n+1-j) f_j^[s]

for every element f of the canonical local basis at 0 simultaneously, as one
exact linear system in the polynomial coefficients (reduced echelon, free
variables zero).  The right-hand side collapses to the J_F series for
holomorphic f, so this subsumes the driving-series match and pins down a
solution satisfying every Pade condition for all kernel elements.

Optional route ("reduction"): compute the f_j^[s] reduction data (the
p_{u,t,s,j}, q_{u,s,j} families) by the same kind of solve once per (j, s),
then assemble the polynomials by the closed expressions; used for
cross-validation and for exact denominator bookkeeping.
"""
from __future__ import annotations

import hashlib
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

from .linalg import IncrementalRREF
from .localbasis import LocalBasis, local_basis
from .nilsson import NilssonSeries
from .numberfield import lcm_upto
from .operators import DifferentialOperator, OperatorProfile, profile
from .partialfractions import (PartialFractionTable, jf_from_local_expansion,
                               jf_series, partial_fractions, universal_rhs)
from .polynomials import Poly

FORMAT_VERSION = 1


class ConstructionError(RuntimeError):
    pass


@dataclass
class ApproximantSet:
    operator_hash: str
    n: int
    r: int
    S: int
    m: int
    mu: int
    ell: int
    ell1: int
    P: dict[tuple[int, int], Poly]       # (u, s) -> P_{u,s,n}
    Pt: dict[int, Poly]                  # u -> P~_{u,n}
    route: str
    residual_order: Fraction
    table: PartialFractionTable | None = None
    reduction_denominator: int | None = None   # exact D(S, n+1) when reduction ran

    def degree_bounds_ok(self) -> bool:
        okP = all(p.degree <= self.n for p in self.P.values())
        okT = all(p.degree <= self.n + 1 + self.S * (self.ell - 1)
                  for p in self.Pt.values())
        return okP and okT

    def monomial_shape_ok(self) -> bool:
        for (u, s), p in self.P.items():
            if u <= self.m - 1:
                mono = [i for i, c in enumerate(p.coeffs) if c]
                if mono and mono != [self.n + 1 - u]:
                    return False
        return True

    def coefficient_denominator(self) -> int:
        out = 1
        for p in list(self.P.values()) + list(self.Pt.values()):
            d = p.denominator_lcm()
            out = out * d // math.gcd(out, d)
        return out

    def polynomials_in_index_order(self) -> list[Poly]:
        """The family (bold P_i) in canonical I order: (u,s) block then u-tilde."""
        out = []
        for u in range(1, self.ell1 + 1):
            for s in range(1, self.S + 1):
                out.append(self.P[(u, s)])
        for u in range(self.mu):
            out.append(self.Pt[u])
        return out

    # -- serialization ---------------------------------------------------
    def serialize(self) -> str:
        lines = [f"gpade-approximant-set v{FORMAT_VERSION}",
                 f"operator {self.operator_hash}",
                 f"params n={self.n} r={self.r} S={self.S} m={self.m} "
                 f"mu={self.mu} ell={self.ell} ell1={self.ell1}",
                 f"route {self.route}",
                 f"residual_order {self.residual_order}"]
        if self.reduction_denominator is not None:
            lines.append(f"reduction_denominator {self.reduction_denominator}")
        for (u, s) in sorted(self.P):
            lines.append(f"P {u} {s} : {self.P[(u, s)].format()}")
        for u in sorted(self.Pt):
            lines.append(f"Pt {u} : {self.Pt[u].format()}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def deserialize(text: str) -> "ApproximantSet":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines[0].startswith("gpade-approximant-set"):
            raise ValueError("not an approximant-set file")
        head = dict(kv.split("=") for kv in lines[2].split()[1:])
        op_hash = lines[1].split()[1]
        route = lines[3].split()[1]
        resid = Fraction(lines[4].split()[1])
        P, Pt = {}, {}
        red_den = None
        for ln in lines[5:]:
            tok = ln.split()
            if tok[0] == "P":
                u, s = int(tok[1]), int(tok[2])
                P[(u, s)] = _parse_poly(ln.split(":", 1)[1])
            elif tok[0] == "Pt":
                Pt[int(tok[1])] = _parse_poly(ln.split(":", 1)[1])
            elif tok[0] == "reduction_denominator":
                red_den = int(tok[1])
        return ApproximantSet(
            operator_hash=op_hash, n=int(head["n"]), r=int(head["r"]),
            S=int(head["S"]), m=int(head["m"]), mu=int(head["mu"]),
            ell=int(head["ell"]), ell1=int(head["ell1"]), P=P, Pt=Pt,
            route=route, residual_order=resid, reduction_denominator=red_den)

    def cache_path(self, cache_dir: str) -> str:
        sub = os.path.join(cache_dir, self.operator_hash)
        return os.path.join(sub, f"n{self.n}_r{self.r}_S{self.S}_m{self.m}.apx")


def _parse_poly(txt: str) -> Poly:
    txt = txt.strip()
    if txt == "0":
        return Poly()
    return Poly([Fraction(tok) for tok in txt.split()])


def cache_lookup(L_hash: str, n: int, r: int, S: int, m: int, cache_dir: str):
    path = os.path.join(cache_dir, L_hash, f"n{n}_r{r}_S{S}_m{m}.apx")
    if os.path.exists(path):
        with open(path) as fh:
            return ApproximantSet.deserialize(fh.read())
    return None


def cache_store(approx: ApproximantSet, cache_dir: str) -> str:
    path = approx.cache_path(cache_dir)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w") as fh:
        fh.write(approx.serialize())
    return path


# ---------------------------------------------------------------------------

@dataclass
class _Context:
    L: DifferentialOperator
    prof: OperatorProfile
    n: int
    r: int
    S: int
    table: PartialFractionTable
    basis: LocalBasis
    columns: list[tuple]
    colpos: dict[tuple, int]
    dtilde: int


def _validate(prof: OperatorProfile, n: int, r: int, S: int):
    if not (0 <= r <= S):
        raise ConstructionError("need 0 <= r <= S")
    if n < prof.ell1:
        raise ConstructionError(f"need n >= ell1 = {prof.ell1}")
    if S <= prof.max_log_power:
        raise ConstructionError(
            f"need S > e = {prof.max_log_power} (max log power of local solutions)")


def _columns(prof: OperatorProfile, n: int, S: int):
    cols = []
    dtilde = n + 1 + S * (prof.ell - 1)
    for u in range(1, prof.ell1 + 1):
        for s in range(1, S + 1):
            if u <= prof.m - 1:
                cols.append(("P", u, s, n + 1 - u))
            else:
                for d in range(n + 1):
                    cols.append(("P", u, s, d))
    for u in range(prof.mu):
        for d in range(dtilde + 1):
            cols.append(("Pt", u, d))
    return cols, dtilde


def construct(L: DifferentialOperator, F_coeffs=None, n: int = None, r: int = None,
              S: int = None, m: int | None = None, route: str = "solve",
              prof: OperatorProfile | None = None,
              cross_validate: bool = False) -> ApproximantSet:
    """Build the approximant set for (L, n, r, S[, m]).

    ``F_coeffs`` (Taylor coefficients of the driving solution) is only used
    for the residual guard check; the polynomials themselves depend on L
    alone.  ``route`` is "solve" (default) or "reduction".
    """
    if prof is None:
        prof = profile(L, m_override=m)
    elif m is not None and prof.m != m:
        prof = profile(L, m_override=m)
    _validate(prof, n, r, S)
    table = partial_fractions(n, r, S)
    unknowns = count_equations(prof, n, r, S)[0]
    T_cmp = Fraction(unknowns + prof.mu + 8)
    basis = local_basis(L, 0, truncation_order=T_cmp)
    cols, dtilde = _columns(prof, n, S)
    ctx = _Context(L=L, prof=prof, n=n, r=r, S=S, table=table, basis=basis,
                   columns=cols, colpos={c: i for i, c in enumerate(cols)},
                   dtilde=dtilde)
    if route == "solve":
        approx = _construct_solve(ctx)
    elif route == "reduction":
        approx = _construct_reduction(ctx)
    else:
        raise ValueError(f"unknown route {route!r}")
    _guard_check(ctx, approx)
    if F_coeffs is not None:
        _driving_check(ctx, approx, F_coeffs)
    if cross_validate and route == "solve":
        other = _construct_reduction(ctx)
        _guard_check(ctx, other)
    if not approx.degree_bounds_ok():
        raise ConstructionError("degree bounds violated")
    if not approx.monomial_shape_ok():
        raise ConstructionError("monomial shape violated for u <= m-1")
    return approx


def _family(ctx: _Context, f: NilssonSeries) -> list[NilssonSeries]:
    """The companion coordinates (f_u^[s] blocks then theta^u f) for one f."""
    out = []
    for u in range(1, ctx.prof.ell1 + 1):
        for s in range(1, ctx.S + 1):
            out.append(f.fjs(u, s))
    g = f
    for u in range(ctx.prof.mu):
        out.append(g)
        if u + 1 < ctx.prof.mu:
            g = g.theta()
    return out


def _construct_solve(ctx: _Context) -> ApproximantSet:
    ncols = len(ctx.columns)
    rhs_col = ncols
    pool = IncrementalRREF()
    for sol in ctx.basis.solutions:
        f = sol.series
        rhs = universal_rhs(f, ctx.table)
        fam = _family(ctx, f)
        # gather equations keyed by (exponent, logpower)
        rows: dict[tuple, dict[int, Fraction]] = {}
        limit = min(Fraction(f.order), rhs.order)
        for ci, col in enumerate(ctx.columns):
            if col[0] == "P":
                u, s, d = col[1], col[2], col[3]
                g = fam[(u - 1) * ctx.S + (s - 1)]
            else:
                u, d = col[1], col[2]
                g = fam[ctx.prof.ell1 * ctx.S + u]
            for (k, i), c in g.terms.items():
                key = (k + d, i)
                if key[0] < limit:
                    rows.setdefault(key, {})[ci] = rows.get(key, {}).get(ci, Fraction(0)) + c
        for key, c in rhs.terms.items():
            if key[0] < limit:
                rows.setdefault(key, {})
        for key in sorted(rows):
            row = rows[key]
            rv = rhs.terms.get(key)
            if rv:
                row[rhs_col] = -rv
            row = {a: b for a, b in row.items() if b}
            if row:
                pool.add(row)
    # inconsistency: a pivot on the rhs column
    if rhs_col in pool.pivrows:
        raise ConstructionError(
            "universal Pade system inconsistent; invalid profile parameters or bug")
    sol_vec = [Fraction(0)] * ncols
    for piv, row in pool.pivrows.items():
        sol_vec[piv] = -row.get(rhs_col, Fraction(0))
    return _package(ctx, sol_vec, route="solve")


def _package(ctx: _Context, sol_vec, route: str,
             reduction_denominator: int | None = None) -> ApproximantSet:
    prof, n, S = ctx.prof, ctx.n, ctx.S
    P = {(u, s): [Fraction(0)] * (n + 2)
         for u in range(1, prof.ell1 + 1) for s in range(1, S + 1)}
    Pt = {u: [Fraction(0)] * (ctx.dtilde + 1) for u in range(prof.mu)}
    for ci, col in enumerate(ctx.columns):
        v = sol_vec[ci]
        if not v:
            continue
        if col[0] == "P":
            P[(col[1], col[2])][col[3]] = v
        else:
            Pt[col[1]][col[2]] = v
    approx = ApproximantSet(
        operator_hash=ctx.L.hash_key(), n=n, r=ctx.r, S=S, m=prof.m,
        mu=prof.mu, ell=prof.ell, ell1=prof.ell1,
        P={k: Poly(v) for k, v in P.items()},
        Pt={k: Poly(v) for k, v in Pt.items()},
        route=route, residual_order=Fraction(0), table=ctx.table,
        reduction_denominator=reduction_denominator)
    return approx


def jf_of_solution(approx: ApproximantSet, f: NilssonSeries,
                   route: str = "poly") -> NilssonSeries:
    """J_f for a local solution f: "poly" = polynomial combination route,
    "explicit" = coefficientwise closed-formula route (cross-check)."""
    if route == "explicit":
        if approx.table is None:
            approx.table = partial_fractions(approx.n, approx.r, approx.S)
        return jf_from_local_expansion(f, approx.table)
    acc = None
    for u in range(1, approx.ell1 + 1):
        for s in range(1, approx.S + 1):
            p = approx.P[(u, s)]
            if p.is_zero():
                continue
            part = f.fjs(u, s).mul_poly(p.coeffs)
            acc = part if acc is None else acc + part
    g = f
    for u in range(approx.mu):
        p = approx.Pt.get(u, Poly())
        if not p.is_zero():
            part = g.mul_poly(p.coeffs)
            acc = part if acc is None else acc + part
        if u + 1 < approx.mu:
            g = g.theta()
    return acc if acc is not None else NilssonSeries.zero(f.order)


def _guard_check(ctx: _Context, approx: ApproximantSet):
    """Exact residual check of the universal identity on every basis element,
    including the guard coefficients beyond the solve's comparison order."""
    worst = None
    for sol in ctx.basis.solutions:
        f = sol.series
        lhs = jf_of_solution(approx, f, route="poly")
        rhs = universal_rhs(f, ctx.table)
        diff = lhs - rhs
        lim = min(diff.order, Fraction(ctx.n + len(ctx.columns)))
        if not diff.truncate(lim).is_zero():
            v = diff.valuation()
            raise ConstructionError(
                f"guard residual nonzero at order {v}; spurious solution")
        worst = lim if worst is None else min(worst, lim)
    approx.residual_order = worst if worst is not None else Fraction(0)


def _driving_check(ctx: _Context, approx: ApproximantSet, F_coeffs):
    """The driving solution's series must satisfy the recurrence and its
    J_F must match jf_series exactly (construct postcondition)."""
    order = int(min(Fraction(len(F_coeffs)), ctx.basis.order))
    F = NilssonSeries.from_power_series([Fraction(c) for c in F_coeffs[:order]])
    img = ctx.L.apply_series(F)
    v = img.valuation()
    if v is not None and v < order - ctx.prof.mu - 1:
        raise ConstructionError("F_coeffs is not a holomorphic solution of L")
    lhs = jf_of_solution(approx, F, route="poly")
    rhs = jf_series(F_coeffs, ctx.n, ctx.r, ctx.S, order)
    lim = min(lhs.order, rhs.order)
    if not (lhs - rhs).truncate(lim).is_zero():
        raise ConstructionError("driving-series residual nonzero")


# ---------------------------------------------------------------------------
# reduction route (Prop. 4.1 data)

@dataclass
class ReductionData:
    # (j, s) -> ({(u, t): K}, {u: Poly})
    entries: dict[tuple[int, int], tuple[dict, dict]]
    denominator: int   # exact D(S, jmax): lcm denominator of all entries

    def p(self, u, t, s, j) -> Fraction:
        ent = self.entries.get((j, s))
        if ent is None:
            raise KeyError((j, s))
        return ent[0].get((u, t), Fraction(0))

    def q(self, u, s, j) -> Poly:
        ent = self.entries.get((j, s))
        if ent is None:
            raise KeyError((j, s))
        return ent[1].get(u, Poly())


def reduction_data(L: DifferentialOperator, prof: OperatorProfile, S: int,
                   jmax: int, basis: LocalBasis | None = None) -> ReductionData:
    """Solve f_j^[s] = sum_{t<=s} sum_{u=m}^{ell1} p_{u,t,s,j} f_u^[t]
    + sum_u q_{u,s,j} theta^u f  for all f in the local basis, for
    ell1 < j <= jmax, 1 <= s <= S."""
    entries = {}
    den = 1
    for j in range(prof.ell1 + 1, jmax + 1):
        for s in range(1, S + 1):
            qdeg = j + s * (prof.ell - 1)
            cols = []
            for u in range(prof.m, prof.ell1 + 1):
                for t in range(1, s + 1):
                    cols.append(("p", u, t))
            for u in range(prof.mu):
                for d in range(max(qdeg, 0) + 1):
                    cols.append(("q", u, d))
            T = Fraction(len(cols) + prof.mu + 8 + j)
            if basis is None or basis.order < T:
                basis = local_basis(L, 0, truncation_order=T)
            pool = IncrementalRREF()
            rhs_col = len(cols)
            for bsol in basis.solutions:
                f = bsol.series
                target = f.fjs(j, s)
                fam = {}
                for u in range(prof.m, prof.ell1 + 1):
                    for t in range(1, s + 1):
                        fam[("p", u, t)] = f.fjs(u, t)
                g = f
                for u in range(prof.mu):
                    fam[("q", u)] = g
                    if u + 1 < prof.mu:
                        g = g.theta()
                limit = min(target.order, Fraction(T))
                rows: dict[tuple, dict[int, Fraction]] = {}
                for ci, col in enumerate(cols):
                    if col[0] == "p":
                        gseries = fam[col]
                        dshift = 0
                    else:
                        gseries = fam[("q", col[1])]
                        dshift = col[2]
                    for (k, i), c in gseries.terms.items():
                        key = (k + dshift, i)
                        if key[0] < limit:
                            row = rows.setdefault(key, {})
                            row[ci] = row.get(ci, Fraction(0)) + c
                for key, c in target.terms.items():
                    if key[0] < limit:
                        rows.setdefault(key, {})
                for key in sorted(rows):
                    row = {a: b for a, b in rows[key].items() if b}
                    rv = target.terms.get(key)
                    if rv:
                        row[rhs_col] = -rv
                    if row:
                        pool.add(row)
            if rhs_col in pool.pivrows:
                raise ConstructionError(
                    f"reduction identity unsolvable at (j={j}, s={s})")
            sol = [Fraction(0)] * len(cols)
            for piv, row in pool.pivrows.items():
                sol[piv] = -row.get(rhs_col, Fraction(0))
            ps, qs = {}, {}
            for ci, col in enumerate(cols):
                v = sol[ci]
                if col[0] == "p":
                    if v:
                        ps[(col[1], col[2])] = v
                        den = den * v.denominator // math.gcd(den, v.denominator)
                else:
                    u, d = col[1], col[2]
                    qs.setdefault(u, [Fraction(0)] * (max(qdeg, 0) + 1))
                    if v:
                        qs[u][d] = v
                        den = den * v.denominator // math.gcd(den, v.denominator)
            entries[(j, s)] = (ps, {u: Poly(cv) for u, cv in qs.items()})
    return ReductionData(entries=entries, denominator=den)


def _construct_reduction(ctx: _Context) -> ApproximantSet:
    prof, n, S, table = ctx.prof, ctx.n, ctx.S, ctx.table
    red = reduction_data(ctx.L, prof, S, n + 1, basis=ctx.basis)
    sol_vec = [Fraction(0)] * len(ctx.columns)

    def add(col, v):
        if v:
            sol_vec[ctx.colpos[col]] += v

    # direct terms c_{u,s,n} z^(n+1-u) for u <= ell1
    for (j, s), cv in table.c.items():
        if j <= prof.ell1:
            add(("P", j, s, n + 1 - j), cv)
        else:
            ent = red.entries[(j, s)]
            for (u, t), pv in ent[0].items():
                add(("P", u, t, n + 1 - j), cv * pv)
            for u, qp in ent[1].items():
                for d, qc in enumerate(qp.coeffs):
                    if qc:
                        add(("Pt", u, n + 1 - j + d), cv * qc)
    return _package(ctx, sol_vec, route="reduction",
                    reduction_denominator=red.denominator)


# ---------------------------------------------------------------------------

def count_equations(prof: OperatorProfile, n: int, r: int, S: int
                    ) -> tuple[int, int, int]:
    """(unknowns, equations, difference) for the Pade problem at n.

    Leading terms are exact ((mu + ell1*S) n vs (mu + ell*S + (m-1)*S) n,
    equal since ell1 = ell + m - 1); the additive constants follow one
    declared convention, so only constancy of the difference in n is
    meaningful.
    """
    mu, ell, ell1, m = prof.mu, prof.ell, prof.ell1, prof.m
    unknowns = ell1 * S * (n + 1) + mu * (n + 2 + S * (ell - 1))
    kap = int(-prof.kappa0)
    equations = (mu * (n + 1 + kap)
                 + ell * r * n
                 + ell * (S - r) * n
                 + sum(n + 1 - u for u in range(1, m)) * S)
    return unknowns, equations, unknowns - equations
