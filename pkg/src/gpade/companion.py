"""The first-order companion system Y' = AY on the q = ell1*S + mu
coordinates (f_u^[s], theta^u f), derived coefficient rows
P_{k,i} = ((d/dz + A^T)^(k-1) P)_i, rank computations over K(z) and at z0,
greedy row selection, and extraction of the polynomial-solution relations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .approximants import ApproximantSet
from .linalg import IncrementalRREF, rank_bareiss, rank_modular, rref, solve_exact
from .nilsson import NilssonSeries
from .operators import DifferentialOperator, OperatorProfile
from .polynomials import Poly


class DegenerateInputError(ValueError):
    pass


@dataclass
class CompanionSystem:
    L: DifferentialOperator
    prof: OperatorProfile
    S: int
    q: int
    index: list               # canonical order: ('f',u,s) blocks then ('t',u)
    T_poly: Poly              # integer-coefficient T with T*A polynomial
    A_num: dict[tuple[int, int], Poly]   # (row, col) -> numerator over T_poly

    def apply_to_vector_series(self, Y: list[NilssonSeries]) -> list[NilssonSeries]:
        """T*A*Y, exactly, per component (caller compares against T*Y')."""
        out = []
        for i in range(self.q):
            acc = None
            for (r, c), num in self.A_num.items():
                if r != i:
                    continue
                part = Y[c].mul_poly(num.coeffs)
                acc = part if acc is None else acc + part
            out.append(acc if acc is not None else NilssonSeries.zero(Y[0].order))
        return out

    def index_of(self, tag) -> int:
        return self.index.index(tag)

    def labels(self) -> list[str]:
        out = []
        for tag in self.index:
            if tag[0] == "f":
                out.append(f"F_{tag[1]}^[{tag[2]}]")
            else:
                out.append(f"theta^{tag[1]}F")
        return out


def build_system(prof: OperatorProfile, L: DifferentialOperator, S: int) -> CompanionSystem:
    """Encode the four differentiation rules of the coordinate family."""
    ell1, mu = prof.ell1, prof.mu
    q = ell1 * S + mu
    index: list = [("f", u, s) for u in range(1, ell1 + 1) for s in range(1, S + 1)]
    index += [("t", u) for u in range(mu)]
    pos = {tag: i for i, tag in enumerate(index)}
    bs, _sh = L.theta_polys()
    bmu = bs[mu]
    den = bmu.denominator_lcm()
    bmu_i = bmu * den
    T = Poly.x(1) * bmu_i                      # T = z * b_mu (integral)
    A: dict[tuple[int, int], Poly] = {}
    for u in range(1, ell1 + 1):
        for s in range(1, S + 1):
            row = pos[("f", u, s)]
            if s >= 2:
                # y'_{u,s} = y_{u,s-1}/z  ->  numerator b_mu_i
                A[(row, pos[("f", u, s - 1)])] = bmu_i
            else:
                # y'_{u,1} = z^(u-1) ty_0  ->  numerator z^u b_mu_i
                A[(row, pos[("t", 0)])] = Poly.x(u) * bmu_i
    for u in range(mu - 1):
        A[(pos[("t", u)], pos[("t", u + 1)])] = bmu_i
    lastrow = pos[("t", mu - 1)]
    for u in range(mu):
        num = bs[u] * den
        if not num.is_zero():
            A[(lastrow, pos[("t", u)])] = -num
    return CompanionSystem(L=L, prof=prof, S=S, q=q, index=index,
                           T_poly=T, A_num=A)


@dataclass
class DerivedRows:
    companion: CompanionSystem
    numerators: list[list[Poly]]   # numerators[k-1][i] over T^(k-1)
    K_max: int

    def value(self, k: int, i: int, z0) -> object:
        """P_{k,i}(z0), exact."""
        T0 = self.companion.T_poly(z0)
        if not T0:
            raise DegenerateInputError("z0 is a pole of the companion matrix")
        return self.numerators[k - 1][i](z0) / T0 ** (k - 1)

    def row_at(self, k: int, z0) -> list:
        return [self.value(k, i, z0) for i in range(self.companion.q)]

    def rational(self, k: int, i: int):
        from .polynomials import RationalFunctionK
        Tk = Poly([Fraction(1)])
        for _ in range(k - 1):
            Tk = Tk * self.companion.T_poly
        return RationalFunctionK(self.numerators[k - 1][i], Tk)


def derived_rows(P: list[Poly], companion: CompanionSystem, K_max: int) -> DerivedRows:
    """Column recursion N_{k+1} = N_k' T - (k-1) T' N_k + A~^T N_k (exact)."""
    if K_max < 1:
        raise ValueError("K_max must be >= 1")
    q = companion.q
    if len(P) != q:
        raise ValueError("P must have one polynomial per coordinate")
    T = companion.T_poly
    Tp = T.derivative()
    rows = [list(P)]
    for k in range(1, K_max):
        prev = rows[-1]
        new = []
        for i in range(q):
            acc = prev[i].derivative() * T - Tp * prev[i] * (k - 1)
            for (r, c), num in companion.A_num.items():
                if c == i and not prev[r].is_zero():
                    acc = acc + num * prev[r]
            new.append(acc)
        rows.append(new)
    return DerivedRows(companion=companion, numerators=rows, K_max=K_max)


def derived_rows_for(approx: ApproximantSet, companion: CompanionSystem,
                     K_max: int) -> DerivedRows:
    return derived_rows(approx.polynomials_in_index_order(), companion, K_max)


def generic_rank(rows: DerivedRows, kmax: int | None = None) -> int:
    """Rank of M(z) = (P_{k,i})_{k<=kmax} over K(z): random specializations
    (fast lower bound) confirmed by one exact polynomial Bareiss elimination."""
    comp = rows.companion
    q = comp.q
    kmax = kmax or q
    M_polys = [rows.numerators[k][:] for k in range(min(kmax, len(rows.numerators)))]
    if all(all(p.is_zero() for p in row) for row in M_polys):
        return 0
    # specializations
    spec_rank = 0
    for z0 in (Fraction(17, 5), Fraction(-8, 3), Fraction(23, 7)):
        if not comp.T_poly(z0):
            continue
        M = [[p(z0) for p in row] for row in M_polys]
        spec_rank = max(spec_rank, rank_modular(M) if _all_fraction(M) else rank_bareiss(M))
    sym_rank = rank_bareiss(M_polys)
    if sym_rank < spec_rank:
        raise AssertionError("specialization rank exceeds symbolic rank")
    return sym_rank


def _all_fraction(M):
    return all(isinstance(x, Fraction) for row in M for x in row)


@dataclass
class PolynomialRelations:
    pivot_indices: list[int]               # i_1 < ... < i_rho (positions in I)
    lambdas: dict[tuple[int, int], object]  # (i, t) -> lambda_{i,t}
    matrix: list[list]                     # the rho x q evaluated system

    def reduced_indices(self, q: int) -> list[int]:
        piv = set(self.pivot_indices)
        return [i for i in range(q) if i not in piv]


def kernel_solution_vector(fpoly: Poly, companion: CompanionSystem) -> list[Poly]:
    """Y^{1,p}: the companion coordinates of a polynomial kernel element are
    themselves polynomials (f_u^[s] = sum_d c_d z^(d+u)/(d+u)^s)."""
    out = []
    for tag in companion.index:
        if tag[0] == "f":
            _f, u, s = tag
            coeffs = [Fraction(0)] * (fpoly.degree + u + 1 if fpoly.coeffs else 1)
            for d, c in enumerate(fpoly.coeffs):
                if c:
                    coeffs[d + u] = c / Fraction(d + u) ** s
            out.append(Poly(coeffs))
        else:
            _t, u = tag
            g = fpoly
            for _ in range(u):
                g = g.derivative() * Poly.x(1)   # theta = z d/dz
            out.append(g)
    return out


def polynomial_relations(L: DifferentialOperator, z0, companion: CompanionSystem,
                         kernel_basis: list[Poly]) -> PolynomialRelations:
    """Row-echelonize the relations sum_i Y^{1,p}_i(z0) x_i = 0 (exact).

    Empty relation set when rho = 0."""
    if not companion.T_poly(z0):
        raise DegenerateInputError("z0 must avoid the singularities of L and 0")
    rho = len(kernel_basis)
    if rho == 0:
        return PolynomialRelations(pivot_indices=[], lambdas={}, matrix=[])
    M = []
    for fp in kernel_basis:
        Y = kernel_solution_vector(fp, companion)
        M.append([y(z0) for y in Y])
    work = [row[:] for row in M]
    work, pivots = rref(work)
    if len(pivots) < rho:
        raise DegenerateInputError(
            "kernel solutions evaluate to a rank-deficient system at z0")
    lambdas = {}
    for t, p in enumerate(pivots):
        for i in range(companion.q):
            if i in pivots:
                continue
            v = -work[t][i]
            if v:
                lambdas[(i, t + 1)] = v
    return PolynomialRelations(pivot_indices=list(pivots), lambdas=lambdas, matrix=M)


@dataclass
class RowSelection:
    indices: list[int]        # k_1 < ... < k_{q-rho}
    K_max: int
    matrix: list[list]        # evaluated (q-rho) x (q-rho) reduced matrix at z0
    rank: int


class RowSelectionError(RuntimeError):
    pass


def select_rows(rows: DerivedRows, z0, rho: int,
                reduced_columns: list[int] | None = None,
                K_cap: int | None = None) -> RowSelection:
    """Greedy scan k = 1, 2, ... keeping rows that grow the exact rank of the
    reduced-column matrix at z0, until q - rho rows are found."""
    comp = rows.companion
    q = comp.q
    target = q - rho
    if K_cap is None:
        K_cap = 4 * q
    cols = reduced_columns if reduced_columns is not None else list(range(q))
    pool = IncrementalRREF()
    picked: list[int] = []
    vecs: dict[int, list] = {}
    k = 0
    need_extend = K_cap
    while len(picked) < target:
        k += 1
        if k > K_cap:
            raise RowSelectionError(
                f"row selection failed to reach rank {target} within K_max cap {K_cap}")
        if k - 1 >= len(rows.numerators):
            rows_ext = derived_rows([Poly(p.coeffs) for p in rows.numerators[0]],
                                    comp, K_cap)
            rows.numerators = rows_ext.numerators
            rows.K_max = rows_ext.K_max
        vec = [rows.value(k, i, z0) for i in cols]
        if pool.add({j: v for j, v in enumerate(vec) if v}):
            picked.append(k)
            vecs[k] = vec
    mat = [vecs[k] for k in picked]
    return RowSelection(indices=picked, K_max=k, matrix=mat, rank=len(picked))
