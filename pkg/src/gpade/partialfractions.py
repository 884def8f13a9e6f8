"""The weight kernel W(X) = n!^(S-r) (X-rn+1)_rn / ((X+1)_{n+1})^S, its exact
partial-fraction table c_{j,s,n}, and the driving series J_F built from it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .nilsson import NilssonSeries
from .numberfield import lcm_upto


@dataclass
class PartialFractionTable:
    n: int
    r: int
    S: int
    c: dict[tuple[int, int], Fraction]   # (j, s) -> c_{j,s,n}, 1<=j<=n+1, 1<=s<=S

    def weight(self, k: Fraction) -> Fraction:
        """W(k) for k not a pole."""
        return weight_value(k, self.n, self.r, self.S)

    def reconstruct(self, k: Fraction) -> Fraction:
        return sum((cv / (k + j) ** s for (j, s), cv in self.c.items()), Fraction(0))

    def weight_derivative(self, k: Fraction, d: int) -> Fraction:
        """A^{(d)}(k) / 1 in the general (pole-skipping) sense of the explicit
        J_f formula: d! sum_{j != -k} sum_s c_{j,s} (-1)^d C(s-1+d, s-1) / (k+j)^{s+d}."""
        total = Fraction(0)
        for (j, s), cv in self.c.items():
            if k + j == 0:
                continue
            total += cv * math.comb(s - 1 + d, s - 1) / (k + j) ** (s + d)
        return total * math.factorial(d) * (-1) ** (d % 2)

    def denominator_clearing_ok(self) -> bool:
        """d_n^S c_{j,s,n} integral for all entries."""
        dS = lcm_upto(self.n) ** self.S if self.n >= 1 else 1
        return all((cv * dS).denominator == 1 for cv in self.c.values())

    def size_bound_ok(self) -> bool:
        """|c_{j,s,n}| <= (rn+1) 2^S (r^r 2^(S+r+1))^n."""
        n, r, S = self.n, self.r, self.S
        env = Fraction((r * n + 1) * 2 ** S) * Fraction(max(1, r ** r) * 2 ** (S + r + 1)) ** n
        return all(abs(cv) <= env for cv in self.c.values())


def weight_value(k: Fraction, n: int, r: int, S: int) -> Fraction:
    k = Fraction(k)
    num = Fraction(math.factorial(n)) ** (S - r)
    for w in range(r * n):
        num *= (k - w)
    den = Fraction(1)
    for i in range(1, n + 2):
        den *= (k + i) ** S
    if den == 0:
        raise ZeroDivisionError("weight evaluated at a pole")
    return num / den


def partial_fractions(n: int, r: int, S: int) -> PartialFractionTable:
    """Exact residue expansion W(X) = sum_{j,s} c_{j,s,n}/(X+j)^s."""
    if not (0 <= r <= S):
        raise ValueError("need 0 <= r <= S")
    if n < 0:
        raise ValueError("need n >= 0")
    table: dict[tuple[int, int], Fraction] = {}
    nfact = Fraction(math.factorial(n)) ** (S - r)
    for j in range(1, n + 2):
        # g_j(t) = W(-j+t) * t^S expanded to O(t^S); c_{j,s} = [t^(S-s)] g_j
        series = [Fraction(0)] * S
        series[0] = nfact
        for w in range(r * n):
            # multiply by (t - (j + w))
            cst = -Fraction(j + w)
            for idx in range(S - 1, -1, -1):
                series[idx] = series[idx] * cst + (series[idx - 1] if idx else 0)
        for i in range(1, n + 2):
            if i == j:
                continue
            # divide by (t + (i-j))^S: multiply S times by the inverse series
            cst = Fraction(i - j)
            inv = [Fraction(0)] * S
            inv[0] = 1 / cst
            for idx in range(1, S):
                inv[idx] = -inv[idx - 1] / cst
            for _ in range(S):
                series = _trunc_mul(series, inv, S)
        for s in range(1, S + 1):
            v = series[S - s]
            if v:
                table[(j, s)] = v
    return PartialFractionTable(n=n, r=r, S=S, c=table)


def _trunc_mul(a: list[Fraction], b: list[Fraction], T: int) -> list[Fraction]:
    out = [Fraction(0)] * T
    for i, ai in enumerate(a):
        if ai:
            for j in range(T - i):
                if b[j]:
                    out[i + j] += ai * b[j]
    return out


def jf_series(A: Sequence, n: int, r: int, S: int, order: int) -> NilssonSeries:
    """J_F = sum_k W(k) A_k z^(k+n+1), truncated below `order` (exact)."""
    if order <= n:
        raise ValueError("order must exceed n")
    terms = {}
    for k in range(order - n - 1):
        if k >= len(A):
            raise ValueError("coefficient stream too short for requested order")
        if k < r * n:
            continue  # Pochhammer factor vanishes
        ak = A[k]
        if ak:
            w = weight_value(Fraction(k), n, r, S)
            v = w * ak
            if v:
                terms[(Fraction(k + n + 1), 0)] = v
    return NilssonSeries(terms, order=Fraction(order))


def jf_from_local_expansion(f: NilssonSeries, table: PartialFractionTable) -> NilssonSeries:
    """J_f via the explicit coefficientwise formula (the A^{(i-lambda)}(k) form).

    Independent of the polynomial route: used as the cross-check oracle."""
    n, S = table.n, table.S
    out: dict[tuple[Fraction, int], object] = {}
    e = f.max_log_power()
    for (k, i), a in f.terms.items():
        # log-pole part: k = -j integer in 1..n+1 contributes log^{s+i} terms
        if k.denominator == 1 and -int(k) in range(1, n + 2):
            j = -int(k)
            for s in range(1, S + 1):
                cv = table.c.get((j, s))
                if cv:
                    key = (Fraction(n + 1 - j), s + i)
                    val = a * (cv * Fraction(math.factorial(i), math.factorial(s + i)))
                    _acc(out, key, val)
        # regular part, using the pole-skipping derivative values
        for lam in range(i + 1):
            Ad = table.weight_derivative(k, i - lam)
            if Ad:
                key = (k + n + 1, lam)
                val = a * (Ad * math.comb(i, lam))
                _acc(out, key, val)
    return NilssonSeries(out, order=f.order + n + 1)


def universal_rhs(f: NilssonSeries, table: PartialFractionTable) -> NilssonSeries:
    """J~_f = sum_{j=1}^{n+1} sum_s c_{j,s,n} z^(n+1-j) f_j^[s] (exact).

    This is the function every (P, P~) solution must reproduce; for f
    holomorphic it collapses to jf_series.
    """
    n = table.n
    acc = None
    by_j: dict[int, list[tuple[int, Fraction]]] = {}
    for (j, s), cv in table.c.items():
        by_j.setdefault(j, []).append((s, cv))
    for j, pairs in sorted(by_j.items()):
        for s, cv in pairs:
            part = f.fjs(j, s).scale(cv).shift(n + 1 - j)
            acc = part if acc is None else acc + part
    if acc is None:
        return NilssonSeries.zero(f.order + n + 1)
    return acc


def _acc(d, key, val):
    if key in d:
        s = d[key] + val
        if not s:
            del d[key]
        else:
            d[key] = s
    elif val:
        d[key] = val
