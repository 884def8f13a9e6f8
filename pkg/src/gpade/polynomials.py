"""Dense univariate polynomials and rational functions over Q or K.

Coefficients are Fractions or NFElements, little-endian.  Only what the
operator / approximant machinery needs: exact ring ops, division, gcd,
shifts, evaluation.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd as _igcd
from typing import Sequence

from .numberfield import NFElement, format_rational


class Poly:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence = ()):
        c = list(coeffs)
        while c and not c[-1]:
            c.pop()
        self.coeffs = c

    @staticmethod
    def const(x) -> "Poly":
        return Poly([x])

    @staticmethod
    def x(power: int = 1) -> "Poly":
        return Poly([Fraction(0)] * power + [Fraction(1)])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def valuation(self) -> int:
        """Order of vanishing at 0; a large sentinel for the zero polynomial."""
        if not self.coeffs:
            return 1 << 30
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return 1 << 30

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, NFElement)):
            other = Poly([other])
        if not isinstance(other, Poly):
            return NotImplemented
        a = self - other
        return not a.coeffs

    def __hash__(self):
        return hash(tuple(map(repr, self.coeffs)))

    def __add__(self, other):
        if isinstance(other, (int, Fraction, NFElement)):
            other = Poly([other])
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + [0] * (n - len(self.coeffs))
        b = other.coeffs + [0] * (n - len(other.coeffs))
        return Poly([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, NFElement)):
            other = Poly([other])
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, NFElement)):
            if not other:
                return Poly()
            return Poly([c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return Poly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] = out[i + j] + a * b
        return Poly(out)

    __rmul__ = __mul__

    def __divmod__(self, other: "Poly"):
        if not other.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        q = [0] * max(0, len(r) - len(other.coeffs) + 1)
        d = other.coeffs
        while len(r) >= len(d) and any(r):
            while r and not r[-1]:
                r.pop()
            if len(r) < len(d):
                break
            f = r[-1] / d[-1]
            off = len(r) - len(d)
            q[off] = f
            for i, di in enumerate(d):
                r[off + i] = r[off + i] - f * di
            if r and not r[-1]:
                r.pop()
            else:
                break
        return Poly(q), Poly(r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = divmod(self, other)
        if r.coeffs:
            raise ValueError("division is not exact")
        return q

    def __truediv__(self, other):
        if isinstance(other, Poly):
            return self.exact_div(other)
        return self * (Fraction(1) / other if isinstance(other, (int, Fraction))
                       else other.inverse())

    def derivative(self) -> "Poly":
        return Poly([i * c for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, x):
        v = 0
        for c in reversed(self.coeffs):
            v = v * x + c
        return v

    def shift(self, a) -> "Poly":
        """p(z + a) by Horner in (z + a)."""
        out = Poly()
        za = Poly([a, Fraction(1)])
        for c in reversed(self.coeffs):
            out = out * za + c
        return out

    def monic(self) -> "Poly":
        if not self.coeffs:
            return self
        lead = self.coeffs[-1]
        if lead == 1:
            return self
        return Poly([c / lead for c in self.coeffs])

    def coeff(self, i: int):
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def leading(self):
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def denominator_lcm(self) -> int:
        out = 1
        for c in self.coeffs:
            if isinstance(c, NFElement):
                d = c.denominator_lcm()
            else:
                d = Fraction(c).denominator
            out = out * d // _igcd(out, d)
        return out

    def __repr__(self):
        if not self.coeffs:
            return "Poly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"({c})*z^{i}")
        return "Poly(" + " + ".join(terms) + ")"

    def format(self) -> str:
        def fmt(c):
            return c.format() if isinstance(c, NFElement) else format_rational(Fraction(c))
        return " ".join(fmt(c) for c in self.coeffs) if self.coeffs else "0"


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over the coefficient field."""
    a, b = Poly(a.coeffs), Poly(b.coeffs)
    while b.coeffs:
        a, b = b, a % b
    return a.monic()


def squarefree_decomposition(p: Poly) -> list[tuple[Poly, int]]:
    """Yun-style decomposition: [(g_i, i)] with p = lead * prod g_i^i, g_i squarefree."""
    out: list[tuple[Poly, int]] = []
    p = p.monic()
    if p.degree <= 0:
        return out
    d = p.derivative()
    a = poly_gcd(p, d)
    w = p.exact_div(a)
    i = 1
    while w.degree > 0:
        y = poly_gcd(w, a)
        fac = w.exact_div(y)
        if fac.degree > 0:
            out.append((fac, i))
        w = y
        a = a.exact_div(y)
        i += 1
    return out


def rational_roots(p: Poly) -> list[Fraction]:
    """All rational roots of a polynomial with rational coefficients."""
    if not p.coeffs:
        raise ValueError("zero polynomial")
    coeffs = []
    den = 1
    for c in p.coeffs:
        f = Fraction(c) if not isinstance(c, NFElement) else None
        if f is None:
            if c.is_rational():
                f = c.as_rational()
            else:
                return _roots_in_field(p)
        coeffs.append(f)
        den = den * f.denominator // _igcd(den, f.denominator)
    ic = [int(c * den) for c in coeffs]
    while ic and ic[0] == 0:
        ic = ic[1:]
    if not ic:
        return [Fraction(0)]
    roots = []
    if len(p.coeffs) > len(ic):  # z | p
        roots.append(Fraction(0))
    a0, an = abs(ic[0]), abs(ic[-1])
    for pnum in _divisors(a0):
        for qden in _divisors(an):
            for sign in (1, -1):
                cand = Fraction(sign * pnum, qden)
                if cand not in roots and p(cand) == 0:
                    roots.append(cand)
    return sorted(roots)


def _roots_in_field(p: Poly) -> list:
    # roots of p lying in K, via gcd with candidate linear factors is not
    # available without factorization; only the exhaustive small search over
    # rational roots is supported for NFElement coefficients.
    raise NotImplementedError(
        "root extraction over a number field is only supported for rational roots")


def _divisors(n: int) -> list[int]:
    n = abs(n)
    if n == 0:
        return [1]
    out = []
    i = 1
    while i * i <= n:
        if n % i == 0:
            out.append(i)
            if i != n // i:
                out.append(n // i)
        i += 1
    return sorted(out)


class RationalFunctionK:
    """Quotient of polynomials, gcd-reduced with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, reduce: bool = True):
        if den is None:
            den = Poly([Fraction(1)])
        if not den.coeffs:
            raise ZeroDivisionError("zero denominator")
        if reduce and num.coeffs:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num = num.exact_div(g)
                den = den.exact_div(g)
        if den.coeffs:
            lead = den.leading()
            if lead != 1:
                num = num * (1 / lead if isinstance(lead, Fraction) else lead.inverse())
                den = den.monic()
        self.num = num
        self.den = den

    @staticmethod
    def const(x) -> "RationalFunctionK":
        return RationalFunctionK(Poly([x]), Poly([Fraction(1)]), reduce=False)

    def is_zero(self) -> bool:
        return not self.num.coeffs

    def __bool__(self):
        return bool(self.num.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, NFElement)):
            other = RationalFunctionK.const(other)
        if not isinstance(other, RationalFunctionK):
            return NotImplemented
        return (self.num * other.den - other.num * self.den).is_zero()

    def __hash__(self):
        return hash((repr(self.num), repr(self.den)))

    def _coerce(self, other) -> "RationalFunctionK":
        if isinstance(other, RationalFunctionK):
            return other
        if isinstance(other, Poly):
            return RationalFunctionK(other, reduce=False)
        return RationalFunctionK.const(other)

    def __add__(self, other):
        o = self._coerce(other)
        return RationalFunctionK(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunctionK(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        return RationalFunctionK(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if not o.num.coeffs:
            raise ZeroDivisionError
        return RationalFunctionK(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __call__(self, x):
        dv = self.den(x)
        if not dv:
            raise ZeroDivisionError("evaluation at a pole")
        return self.num(x) / dv

    def derivative(self) -> "RationalFunctionK":
        return RationalFunctionK(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den)

    def __repr__(self):
        return f"({self.num!r})/({self.den!r})"
