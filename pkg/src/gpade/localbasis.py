"""Frobenius-style local solution bases at 0, at finite points in K, and
particular solutions of L f = rhs in the Nilsson class.

Works on the log-jet: a candidate w^(e0+k) * sum_t c_t log(w)^t is advanced in
k through the theta-form recursion; resonances (indicial roots met again)
inject free parameters, producing exactly the classical Frobenius basis but
through exact linear solves.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .linalg import solve_exact, rref
from .nilsson import NilssonSeries
from .operators import DifferentialOperator
from .polynomials import Poly


class TruncationError(ValueError):
    pass


@dataclass
class LocalSolution:
    series: NilssonSeries
    exponent: Fraction            # leading exponent
    log_power: int                # max log power present

    def is_holomorphic(self) -> bool:
        return self.log_power == 0 and all(
            k.denominator == 1 and k >= 0 for (k, _i) in self.series.terms)


@dataclass
class LocalBasis:
    point: object                 # 0 or an element of K
    solutions: list[LocalSolution]
    order: Fraction
    polynomial_flags: list[bool]

    @property
    def holomorphic_flags(self) -> list[bool]:
        return [s.is_holomorphic() for s in self.solutions]

    def __iter__(self):
        return iter(self.solutions)


def _jet_matrices(bs: list[Poly], E: int):
    """I_j as matrix-valued: returns fn(j, rho) -> (E+1)x(E+1) matrix over K.

    theta acts on (c_0..c_E) (coefficients of log^t) as rho*Id + N with
    N[t][t+1] = t+1.
    """
    dmax = max((b.degree for b in bs if not b.is_zero()), default=0)

    def I(j: int, rho: Fraction):
        n = E + 1
        theta = [[Fraction(0)] * n for _ in range(n)]
        for t in range(n):
            theta[t][t] = rho
            if t + 1 < n:
                theta[t][t + 1] = Fraction(t + 1)
        out = [[Fraction(0)] * n for _ in range(n)]
        pw = [[Fraction(1) if a == b else Fraction(0) for b in range(n)] for a in range(n)]
        for u, b in enumerate(bs):
            if u > 0:
                pw = _matmul(pw, theta)
            c = b.coeff(j)
            if c:
                for a in range(n):
                    for bb in range(n):
                        if pw[a][bb]:
                            out[a][bb] = out[a][bb] + c * pw[a][bb]
        return out

    return I, dmax


def _matmul(A, B):
    n = len(A)
    m = len(B[0])
    k = len(B)
    out = [[Fraction(0)] * m for _ in range(n)]
    for i in range(n):
        Ai = A[i]
        for t in range(k):
            a = Ai[t]
            if a:
                Bt = B[t]
                for j in range(m):
                    if Bt[j]:
                        out[i][j] = out[i][j] + a * Bt[j]
    return out


def local_basis(L: DifferentialOperator, point, truncation_order) -> LocalBasis:
    """mu linearly independent truncated Nilsson solutions at an ordinary or
    regular singular point (canonical: echelonized, ordered by exponent then
    log degree)."""
    Lp = L if _iszero(point) else L.shifted(point)
    bs, _t = Lp.theta_polys()
    indicial = Poly([b.coeff(0) for b in bs])
    exps = _indicial_roots(Lp)
    order = Fraction(truncation_order)
    classes = _exponent_classes(exps)
    sols: list[NilssonSeries] = []
    for e0, offsets in classes:
        Mclass = sum(offsets.values())
        E = Mclass - 1
        kmax = _ceil_frac(order - e0)
        if kmax <= max(offsets) + 1:
            raise TruncationError(
                f"truncation order {order} too small to separate exponents in class {e0}")
        sols.extend(_solve_class(bs, e0, offsets, E, kmax))
    if len(sols) != L.order:
        raise AssertionError(f"expected {L.order} local solutions, got {len(sols)}")
    sols = _canonicalize(sols, order)
    out = []
    for s in sols:
        lead = s.lower()
        out.append(LocalSolution(series=s, exponent=lead, log_power=s.max_log_power()))
    out.sort(key=lambda ls: (ls.exponent, ls.log_power, sorted(ls.series.terms)))
    polyflags = [_is_polynomial_solution(Lp, ls) for ls in out]
    return LocalBasis(point=point, solutions=out, order=order, polynomial_flags=polyflags)


def _solve_class(bs, e0: Fraction, offsets: dict[int, int], E: int, kmax: int,
                 rhs_series: NilssonSeries | None = None) -> list[NilssonSeries]:
    """Advance one exponent class; returns one NilssonSeries per free parameter
    (or, with rhs_series, the particular solution as a single series)."""
    I, dmax = _jet_matrices(bs, E)
    inhom = rhs_series is not None
    nparams = 1 if inhom else 0   # column 0 = inhomogeneous particular part
    coeffs: list[list[list[Fraction]]] = []   # coeffs[k][t] = row of length nparams
    for k in range(kmax):
        rho = e0 + k
        rhs = [[Fraction(0)] * nparams for _ in range(E + 1)]
        for j in range(1, min(k, dmax) + 1):
            Ij = I(j, rho - j)
            ck = coeffs[k - j]
            for a in range(E + 1):
                row = Ij[a]
                for t in range(E + 1):
                    if row[t]:
                        for p in range(nparams):
                            if ck[t][p]:
                                rhs[a][p] = rhs[a][p] - row[t] * ck[t][p]
        if inhom:
            for t in range(E + 1):
                c = rhs_series.terms.get((rho, t))
                if c:
                    rhs[t][0] = rhs[t][0] + c
        A = I(0, rho)
        if A[0][0]:  # non-resonant: triangular back-substitution
            ck = [[Fraction(0)] * nparams for _ in range(E + 1)]
            for t in range(E, -1, -1):
                for p in range(nparams):
                    s = rhs[t][p]
                    for tau in range(t + 1, E + 1):
                        if A[t][tau] and ck[tau][p]:
                            s = s - A[t][tau] * ck[tau][p]
                    ck[t][p] = s / A[0][0]
            coeffs.append(ck)
        else:
            ck, nparams = _resonant_step(A, rhs, nparams, inhom)
            # widen earlier coefficient rows with zero columns for new params
            for prev in coeffs:
                for row in prev:
                    row.extend([Fraction(0)] * (nparams - len(row)))
            coeffs.append(ck)
    # package
    out = []
    p0 = 1 if inhom else 0
    if inhom:
        terms = {}
        for k in range(kmax):
            for t in range(E + 1):
                v = coeffs[k][t][0]
                if v:
                    terms[(e0 + k, t)] = v
        return [NilssonSeries(terms, order=e0 + kmax)]
    for p in range(p0, nparams):
        terms = {}
        for k in range(kmax):
            for t in range(E + 1):
                v = coeffs[k][t][p]
                if v:
                    terms[(e0 + k, t)] = v
        out.append(NilssonSeries(terms, order=e0 + kmax))
    return out


def _resonant_step(A, rhs, nparams: int, inhom: bool):
    """Exact solve of the singular jet system; kernel directions become new
    parameters.  Raises on inconsistency (log cap too small)."""
    E1 = len(A)
    res = solve_exact([row[:] for row in A], None)
    kernel = res.kernel
    # particular solutions per existing parameter column
    cols = []
    for p in range(nparams):
        b = [rhs[t][p] for t in range(E1)]
        r = solve_exact([row[:] for row in A], b)
        if not r.consistent:
            raise TruncationError(
                "resonant step inconsistent; log-power cap too small for this solve")
        cols.append(r.particular)
    new = nparams + len(kernel)
    ck = [[Fraction(0)] * new for _ in range(E1)]
    for p in range(nparams):
        for t in range(E1):
            ck[t][p] = cols[p][t]
    for g, vec in enumerate(kernel):
        for t in range(E1):
            ck[t][nparams + g] = vec[t]
    return ck, new


def solve_inhomogeneous(L: DifferentialOperator, point, rhs: NilssonSeries,
                        truncation_order, extra_log: int = 2) -> NilssonSeries:
    """One particular Nilsson-class solution of L f = rhs at the point
    (free parameters set to zero; purely formal, term by term)."""
    Lp = L if _iszero(point) else L.shifted(point)
    bs, tshift = Lp.theta_polys()
    # theta-form computes z^tshift * L, so scale rhs accordingly
    rhs = rhs.shift(tshift)
    exps = _indicial_roots(Lp)
    order = Fraction(truncation_order)
    acc = None
    for e0r, _off in _exponent_classes_of_series(rhs):
        roots_in_class = [e for e in exps if (e - e0r).denominator == 1]
        e0 = min([e0r] + roots_in_class)
        offsets = {}
        for e in roots_in_class:
            offsets[int(e - e0)] = offsets.get(int(e - e0), 0) + 1
        Mclass = sum(offsets.values())
        E = Mclass - 1 + rhs.max_log_power() + extra_log + 1
        kmax = _ceil_frac(order - e0) + 1
        part = _solve_class(bs, e0, offsets or {0: 0}, E, kmax, rhs_series=rhs)[0]
        acc = part if acc is None else acc + part
    if acc is None:
        acc = NilssonSeries.zero(order)
    return acc


# ---------------------------------------------------------------------------

def _indicial_roots(Lp: DifferentialOperator):
    return Lp.exponents_at(0)


def _exponent_classes(exps: list[Fraction]) -> list[tuple[Fraction, dict[int, int]]]:
    classes: list[tuple[Fraction, dict[int, int]]] = []
    for e in sorted(exps):
        for i, (e0, offs) in enumerate(classes):
            if (e - e0).denominator == 1:
                offs[int(e - e0)] = offs.get(int(e - e0), 0) + 1
                break
        else:
            classes.append((e, {0: 1}))
    return classes


def _exponent_classes_of_series(f: NilssonSeries):
    classes: list[tuple[Fraction, int]] = []
    for (k, _i) in sorted(f.terms):
        for idx, (e0, _c) in enumerate(classes):
            if (k - e0).denominator == 1:
                break
        else:
            classes.append((k, 1))
    return classes


def _canonicalize(sols: list[NilssonSeries], order: Fraction) -> list[NilssonSeries]:
    """Deterministic echelon basis over the sorted (exponent, log) key set."""
    keys = sorted({ki for s in sols for ki in s.terms})
    if not keys:
        return sols
    pos = {ki: idx for idx, ki in enumerate(keys)}
    rows = []
    for s in sols:
        row = [Fraction(0)] * len(keys)
        for ki, c in s.terms.items():
            row[pos[ki]] = c
        rows.append(row)
    rows, _piv = rref(rows)
    out = []
    for row in rows:
        if not any(row):
            continue
        terms = {keys[i]: c for i, c in enumerate(row) if c}
        out.append(NilssonSeries(terms, order=order))
    return out


def _is_polynomial_solution(Lp: DifferentialOperator, ls: LocalSolution) -> bool:
    if ls.log_power > 0:
        return False
    if any(k.denominator != 1 or k < 0 for (k, _i) in ls.series.terms):
        return False
    deg = max((int(k) for (k, _i) in ls.series.terms), default=0)
    if Fraction(deg + 1) >= ls.series.order:
        return False  # support reaches the truncation; not visibly polynomial
    p = Poly([ls.series.coefficient(t) for t in range(deg + 1)])
    return Lp.apply_poly(p).is_zero()


def _ceil_frac(x: Fraction) -> int:
    import math
    return math.ceil(x)


def _iszero(point) -> bool:
    try:
        return point == 0
    except TypeError:
        return False
