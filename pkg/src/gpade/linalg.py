"""Exact dense linear algebra over Q or a number field.

Scalars are ``fractions.Fraction`` or ``NFElement`` (anything with exact
field operations and truthiness as a zero test).  Systems coming out of the
Pade solve are rectangular and over-determined, so the workhorse is a reduced
row echelon form; Bareiss elimination and a multi-modular rank probe back the
rank computations and must agree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


@dataclass
class SolveResult:
    rank: int
    pivots: list[int]
    particular: list | None          # None when the system is inconsistent
    kernel: list[list]               # basis of the homogeneous solution space
    consistent: bool


def _zero_like(x):
    return x * 0


def rref(rows: list[list]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form (in place); returns (rows, pivot columns)."""
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = None
        for i in range(r, len(rows)):
            if rows[i][c]:
                p = i
                break
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = rows[r][c]
        if inv != 1:
            rows[r] = [x / inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def solve_exact(M: Sequence[Sequence], b: Sequence | None = None) -> SolveResult:
    """Exact solve of M x = b; also echelon data, rank and kernel basis.

    The canonical particular solution sets every free variable to zero (the
    reduced-echelon representative used throughout for determinism).
    """
    m = len(M)
    n = len(M[0]) if m else 0
    aug = 1 if b is not None else 0
    rows = [list(M[i]) + ([b[i]] if aug else []) for i in range(m)]
    rows, pivots = rref(rows)
    pivots_in = [p for p in pivots if p < n]
    consistent = True
    if aug and any(p == n for p in pivots):
        consistent = False
    rank = len(pivots_in)
    particular = None
    if aug and consistent:
        particular = [Fraction(0)] * n
        for r, p in enumerate(pivots_in):
            particular[p] = rows[r][n]
    kernel = []
    pivset = set(pivots_in)
    free = [c for c in range(n) if c not in pivset]
    for fc in free:
        vec = [Fraction(0)] * n
        vec[fc] = Fraction(1)
        for r, p in enumerate(pivots_in):
            vec[p] = -rows[r][fc]
        kernel.append(vec)
    return SolveResult(rank=rank, pivots=pivots_in, particular=particular,
                       kernel=kernel, consistent=consistent)


class IncrementalRREF:
    """Row-at-a-time reduced echelon pool, for streaming big sparse systems.

    ``add(row)`` reduces the row against the pool; a surviving nonzero row is
    normalized and inserted.  Columns are dict-sparse {index: value}.
    """

    def __init__(self):
        self.pivrows: dict[int, dict[int, object]] = {}  # pivot col -> row

    def reduce(self, row: dict[int, object]) -> dict[int, object]:
        """Eliminate every pivot column from the row (full reduction).

        Pivot rows never contain other pivots' columns, so one pass per
        present pivot column terminates.
        """
        row = dict(row)
        while True:
            hit = [c for c in row if c in self.pivrows]
            if not hit:
                return row
            c = min(hit)
            f = row.pop(c)
            for j, v in self.pivrows[c].items():
                if j == c:
                    continue
                nv = row.get(j, 0) - f * v
                if nv:
                    row[j] = nv
                else:
                    row.pop(j, None)

    def add(self, row: dict[int, object]) -> bool:
        row = self.reduce(row)
        if not row:
            return False
        c = min(row)
        inv = row[c]
        row = {j: (v / inv) for j, v in row.items()}
        row[c] = Fraction(1) if isinstance(inv, Fraction) else inv / inv
        # back-substitute into existing rows to stay fully reduced
        for pc, prow in self.pivrows.items():
            if c in prow:
                f = prow.pop(c)
                for j, v in row.items():
                    if j == c:
                        continue
                    nv = prow.get(j, 0) - f * v
                    if nv:
                        prow[j] = nv
                    else:
                        prow.pop(j, None)
        self.pivrows[c] = row
        return True

    @property
    def rank(self) -> int:
        return len(self.pivrows)


def det_exact(M: Sequence[Sequence]):
    """Determinant by fraction-free Bareiss elimination."""
    n = len(M)
    if n == 0:
        return Fraction(1)
    a = [list(r) for r in M]
    sign = 1
    prev = None
    for k in range(n - 1):
        if not a[k][k]:
            swap = None
            for i in range(k + 1, n):
                if a[i][k]:
                    swap = i
                    break
            if swap is None:
                return _zero_like(a[0][0]) if not isinstance(a[0][0], Fraction) else Fraction(0)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = num if prev is None else num / prev
            a[i][k] = _zero_like(a[i][k])
        prev = a[k][k]
    d = a[n - 1][n - 1]
    return -d if sign < 0 else d


def rank_bareiss(M: Sequence[Sequence]) -> int:
    """Rank by fraction-free Bareiss with full pivoting."""
    if not M:
        return 0
    a = [list(r) for r in M]
    m, n = len(a), len(a[0])
    rank = 0
    prev = None
    k = 0
    while rank < m and k < n:
        p = None
        for i in range(rank, m):
            if a[i][k]:
                p = i
                break
        if p is None:
            k += 1
            continue
        a[rank], a[p] = a[p], a[rank]
        for i in range(rank + 1, m):
            for j in range(k + 1, n):
                num = a[i][j] * a[rank][k] - a[i][k] * a[rank][j]
                a[i][j] = num if prev is None else num / prev
            a[i][k] = _zero_like(a[i][k])
        prev = a[rank][k]
        rank += 1
        k += 1
    return rank


_RANK_PRIMES = (2147483629, 2147483587, 2147483579)


def rank_modular(M: Sequence[Sequence[Fraction]]) -> int:
    """Fast rank of a rational matrix by elimination mod large primes.

    Takes the maximum over a few primes (a prime can only lose rank).  Used as
    the optional multi-modular path; callers assert agreement with the exact
    rank.
    """
    if not M:
        return 0
    best = 0
    for p in _RANK_PRIMES:
        rows = []
        ok = True
        for r in M:
            row = []
            for x in r:
                f = x if isinstance(x, Fraction) else Fraction(x)
                if f.denominator % p == 0:
                    ok = False
                    break
                row.append(f.numerator * pow(f.denominator, -1, p) % p)
            if not ok:
                break
            rows.append(row)
        if not ok:
            continue
        best = max(best, _rank_mod_p(rows, p))
    return best


def _rank_mod_p(a: list[list[int]], p: int) -> int:
    m = len(a)
    n = len(a[0]) if m else 0
    rank = 0
    for c in range(n):
        piv = None
        for i in range(rank, m):
            if a[i][c] % p:
                piv = i
                break
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = pow(a[rank][c], -1, p)
        a[rank] = [(x * inv) % p for x in a[rank]]
        for i in range(m):
            if i != rank and a[i][c] % p:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[rank])]
        rank += 1
        if rank == m:
            break
    return rank


def mat_mul_vec(M: Sequence[Sequence], v: Sequence) -> list:
    out = []
    for row in M:
        s = 0
        for j in range(len(v)):
            s = s + row[j] * v[j]
        out.append(s)
    return out


def lcm_int(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)
