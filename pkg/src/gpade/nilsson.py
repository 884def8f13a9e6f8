"""Truncated Nilsson-class expansions sum a_{k,i} w^k log(w)^i at a point.

Exponents k are exact rationals bounded below; log powers are bounded; every
series carries the order below which its coefficients are guaranteed
(truncation propagates pessimistically).  Coefficients may be Fractions,
number-field elements, polynomials in the formal symbol 2*i*pi (exact
variation) or complex balls (numeric pipelines); all operations are termwise
and ring-agnostic.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable

BIG_ORDER = Fraction(1 << 30)


def _is_zero(c) -> bool:
    if hasattr(c, "is_zero_coeff"):
        return c.is_zero_coeff()
    return not c


class TwoPiIPoly:
    """Polynomial in the formal transcendental T = 2*i*pi over an exact ring."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = list(coeffs)
        while c and not c[-1]:
            c.pop()
        self.coeffs = c

    @staticmethod
    def const(x) -> "TwoPiIPoly":
        return TwoPiIPoly([x])

    @staticmethod
    def tpi(power: int = 1, scale=Fraction(1)) -> "TwoPiIPoly":
        return TwoPiIPoly([Fraction(0)] * power + [scale])

    def is_zero_coeff(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def _coerce(self, other) -> "TwoPiIPoly":
        if isinstance(other, TwoPiIPoly):
            return other
        return TwoPiIPoly([other])

    def __add__(self, other):
        o = self._coerce(other)
        n = max(len(self.coeffs), len(o.coeffs))
        a = self.coeffs + [Fraction(0)] * (n - len(self.coeffs))
        b = o.coeffs + [Fraction(0)] * (n - len(o.coeffs))
        return TwoPiIPoly([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return TwoPiIPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TwoPiIPoly):
            return TwoPiIPoly([c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return TwoPiIPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] = out[i + j] + a * b
        return TwoPiIPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TwoPiIPoly):
            if len(other.coeffs) == 1:
                other = other.coeffs[0]
            else:
                raise TypeError("division only by scalars")
        return TwoPiIPoly([c / other for c in self.coeffs])

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, TwoPiIPoly) else other
        return not (self - o).coeffs

    def __hash__(self):
        return hash(tuple(map(repr, self.coeffs)))

    def constant_part(self):
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def eval_numeric(self, two_pi_i):
        v = 0
        for c in reversed(self.coeffs):
            v = v * two_pi_i + (c if not hasattr(c, "coords") else c)  # NFElement unsupported here
        return v

    def __repr__(self):
        return f"TwoPiIPoly({self.coeffs})"


class NilssonSeries:
    """Truncated sum over (k, i) of a_{k,i} w^k log(w)^i, exact below `order`."""

    __slots__ = ("terms", "order")

    def __init__(self, terms: dict | None = None, order: Fraction = BIG_ORDER):
        self.terms: dict[tuple[Fraction, int], object] = {}
        self.order = Fraction(order)
        if terms:
            for (k, i), c in terms.items():
                if not _is_zero(c):
                    kk = Fraction(k)
                    if kk < self.order:
                        self.terms[(kk, i)] = c

    # -- constructors -----------------------------------------------------
    @staticmethod
    def zero(order=BIG_ORDER) -> "NilssonSeries":
        return NilssonSeries({}, order)

    @staticmethod
    def monomial(coeff, k=Fraction(0), i: int = 0, order=BIG_ORDER) -> "NilssonSeries":
        return NilssonSeries({(Fraction(k), i): coeff}, order)

    @staticmethod
    def from_power_series(coeffs: Iterable, order=None, start: int = 0) -> "NilssonSeries":
        terms = {}
        n = start
        for c in coeffs:
            if not _is_zero(c):
                terms[(Fraction(n), 0)] = c
            n += 1
        return NilssonSeries(terms, Fraction(n) if order is None else order)

    # -- structure ---------------------------------------------------------
    def lower(self) -> Fraction:
        """c_f: least exponent carrying a nonzero term (== order if none)."""
        if not self.terms:
            return self.order
        return min(k for (k, _i) in self.terms)

    def max_log_power(self) -> int:
        if not self.terms:
            return 0
        return max(i for (_k, i) in self.terms)

    def coefficient(self, k, i: int = 0):
        return self.terms.get((Fraction(k), i), Fraction(0))

    def valuation(self, zero_test: Callable | None = None) -> Fraction | None:
        """Generalized order at the point: least k with a (significantly) nonzero term."""
        zt = zero_test or _is_zero
        keys = sorted(self.terms)
        for (k, i) in keys:
            if not zt(self.terms[(k, i)]):
                return k
        return None

    def is_zero(self, zero_test: Callable | None = None) -> bool:
        return self.valuation(zero_test) is None

    def truncate(self, order) -> "NilssonSeries":
        order = Fraction(order)
        if order >= self.order:
            return NilssonSeries(self.terms, self.order)
        return NilssonSeries({ki: c for ki, c in self.terms.items() if ki[0] < order}, order)

    def map_coefficients(self, fn: Callable) -> "NilssonSeries":
        out = {}
        for ki, c in self.terms.items():
            v = fn(c)
            if not _is_zero(v):
                out[ki] = v
        return NilssonSeries(out, self.order)

    # -- ring operations ----------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, NilssonSeries):
            return NotImplemented
        order = min(self.order, other.order)
        out = dict()
        for ki, c in self.terms.items():
            if ki[0] < order:
                out[ki] = c
        for ki, c in other.terms.items():
            if ki[0] < order:
                if ki in out:
                    s = out[ki] + c
                    if _is_zero(s):
                        del out[ki]
                    else:
                        out[ki] = s
                else:
                    out[ki] = c
        return NilssonSeries(out, order)

    def __neg__(self):
        return NilssonSeries({ki: -c for ki, c in self.terms.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "NilssonSeries":
        if _is_zero(c):
            return NilssonSeries({}, self.order)
        return NilssonSeries({ki: v * c for ki, v in self.terms.items()}, self.order)

    def shift(self, j) -> "NilssonSeries":
        """Multiply by w^j."""
        j = Fraction(j)
        return NilssonSeries({(k + j, i): c for (k, i), c in self.terms.items()},
                             self.order + j)

    def __mul__(self, other):
        if not isinstance(other, NilssonSeries):
            return NotImplemented
        order = min(self.order + other.lower(), other.order + self.lower())
        out: dict[tuple[Fraction, int], object] = {}
        for (k1, i1), c1 in self.terms.items():
            for (k2, i2), c2 in other.terms.items():
                k = k1 + k2
                if k < order:
                    ki = (k, i1 + i2)
                    p = c1 * c2
                    if ki in out:
                        s = out[ki] + p
                        if _is_zero(s):
                            del out[ki]
                        else:
                            out[ki] = s
                    else:
                        out[ki] = p
        return NilssonSeries(out, order)

    def mul_poly(self, coeffs: Iterable) -> "NilssonSeries":
        """Multiply by a polynomial given by little-endian coefficients (exactly)."""
        acc = None
        for j, c in enumerate(coeffs):
            if _is_zero(c):
                continue
            part = self.shift(j).scale(c)
            acc = part if acc is None else acc + part
        return acc if acc is not None else NilssonSeries.zero(self.order)

    # -- calculus ------------------------------------------------------------
    def theta(self) -> "NilssonSeries":
        """w d/dw, termwise: preserves exponents and the truncation order."""
        out: dict[tuple[Fraction, int], object] = {}
        for (k, i), c in self.terms.items():
            if k:
                _acc(out, (k, i), c * k)
            if i:
                _acc(out, (k, i - 1), c * i)
        return NilssonSeries(out, self.order)

    def derivative(self) -> "NilssonSeries":
        out: dict[tuple[Fraction, int], object] = {}
        for (k, i), c in self.terms.items():
            if k:
                _acc(out, (k - 1, i), c * k)
            if i:
                _acc(out, (k - 1, i - 1), c * i)
        return NilssonSeries(out, self.order - 1)

    def regularized_ev(self):
        """ev(f) = a_{0,0}."""
        return self.terms.get((Fraction(0), 0), Fraction(0))

    def primitive_ev0(self) -> "NilssonSeries":
        """The unique primitive with regularized value 0 at the point.

        Termwise: P(w^m log^n) for m != -1 via the finite binomial formula,
        P(log^n/w) = log^{n+1}/(n+1); both primitives already have ev = 0.
        """
        out: dict[tuple[Fraction, int], object] = {}
        for (m, n), a in self.terms.items():
            if m == -1:
                _acc(out, (Fraction(0), n + 1), a / Fraction(n + 1))
                continue
            m1 = m + 1
            # w^{m+1} * sum_l C(n,l) (-1)^{n-l} (n-l)! / (m+1)^{n-l+1} log^l
            for l in range(n + 1):
                coef = Fraction(math.comb(n, l) * ((-1) ** ((n - l) % 2)) * math.factorial(n - l))
                _acc(out, (m1, l), a * (coef / m1 ** (n - l + 1)))
        return NilssonSeries(out, self.order + 1)

    # -- the f_j^[s] operators -------------------------------------------------
    def fjs(self, j: int, s: int) -> "NilssonSeries":
        """f_j^[s] by the explicit closed formula (log-pole terms included).

        s = 0 gives w^j f.  Exactly matches the recursive definition via
        ev-normalized primitives (property-tested).
        """
        if j < 1:
            raise ValueError("j must be >= 1")
        if s < 0:
            raise ValueError("s must be >= 0")
        if s == 0:
            return self.shift(j)
        out: dict[tuple[Fraction, int], object] = {}
        jf = Fraction(j)
        for (k, i), a in self.terms.items():
            if k == -jf:
                # a_{-j,i} i! log^{s+i}/(s+i)!
                _acc(out, (Fraction(0), s + i),
                     a * Fraction(math.factorial(i), math.factorial(s + i)))
                continue
            kj = k + jf
            for lam in range(i + 1):
                num = math.factorial(i) * math.comb(s - 1 + i - lam, s - 1)
                coef = Fraction(((-1) ** ((i - lam) % 2)) * num, math.factorial(lam))
                _acc(out, (kj, lam), a * (coef / kj ** (s + i - lam)))
        return NilssonSeries(out, self.order + j)

    def fjs_recursive(self, j: int, s: int) -> "NilssonSeries":
        """Reference route: f_j^[1] = int w^{j-1} f, then s-1 integrations of f/w."""
        if s == 0:
            return self.shift(j)
        g = self.shift(j - 1).primitive_ev0()
        for _ in range(s - 1):
            g = g.shift(-1).primitive_ev0()
        return g

    # -- formal variation at the expansion point -------------------------------
    def var0(self, two_pi_i=None) -> "NilssonSeries":
        """var(f) = tau(f) - f with tau: w^k -> e^{2 i pi k} w^k, log -> log + 2 i pi.

        Exact mode (two_pi_i None): coefficients are lifted to polynomials in
        the formal symbol 2*i*pi; e^{2 i pi k} must lie in Q, i.e. exponent
        denominators must divide 2 (else VariationNotExactError).
        Numeric mode: pass a value (ball) for 2*i*pi.
        """
        formal = two_pi_i is None
        out: dict[tuple[Fraction, int], object] = {}
        for (k, i), a in self.terms.items():
            den = k.denominator
            if formal:
                if den > 2:
                    raise VariationNotExactError(
                        f"e^(2 i pi {k}) is not in the coefficient field; use numeric mode")
                eps = Fraction(1) if den == 1 else Fraction(-1)
            else:
                eps = None
            for lam in range(i + 1):
                binc = math.comb(i, lam)
                if formal:
                    w = TwoPiIPoly.tpi(i - lam, Fraction(binc) * eps)
                    if lam == i:
                        w = w - Fraction(1)  # subtract identity part
                        if w.is_zero_coeff():
                            continue
                    val = w * a
                else:
                    rot = _root_of_unity(k, two_pi_i)
                    w = rot * (two_pi_i ** (i - lam)) * binc
                    if lam == i:
                        w = w - 1
                    val = a * w
                if not _is_zero(val):
                    _acc(out, (k, lam), val)
        return NilssonSeries(out, self.order)

    # -- evaluation -------------------------------------------------------------
    def eval_numeric(self, w_pow: Callable, log_w, two_pi_i=None):
        """Sum the truncated series with caller-supplied w^k and log(w).

        ``w_pow(k)`` must honour the same branch as ``log_w``.  Coefficients
        that are TwoPiIPoly require ``two_pi_i``.  No tail bound is added here;
        callers account for truncation.
        """
        total = 0
        for (k, i), c in sorted(self.terms.items()):
            if isinstance(c, TwoPiIPoly):
                if two_pi_i is None:
                    raise ValueError("two_pi_i needed to evaluate formal variation series")
                c = c.eval_numeric(two_pi_i)
            v = c * w_pow(k)
            for _ in range(i):
                v = v * log_w
            total = total + v
        return total

    # -- io ------------------------------------------------------------------
    def dump(self) -> str:
        """Debug dump: one term per line "k i coeff", sorted by (k, i)."""
        lines = []
        for (k, i) in sorted(self.terms):
            lines.append(f"{k} {i} {self.terms[(k, i)]}")
        return "\n".join(lines)

    def __repr__(self):
        n = len(self.terms)
        return f"NilssonSeries({n} terms, order={self.order}, lower={self.lower()})"


class VariationNotExactError(ValueError):
    pass


def _acc(d: dict, ki, v):
    if ki in d:
        s = d[ki] + v
        if _is_zero(s):
            del d[ki]
        else:
            d[ki] = s
    elif not _is_zero(v):
        d[ki] = v


def _root_of_unity(k: Fraction, two_pi_i):
    """e^{2 i pi k} numerically from the supplied 2*i*pi value."""
    if k.denominator == 1:
        return 1
    if k.denominator == 2:
        return -1
    import mpmath
    return mpmath.exp(mpmath.mpc(two_pi_i) * Fraction(k.numerator % k.denominator, k.denominator))


def binomial_telescoping_check(i: int, j: int, s: int) -> bool:
    """sum_{lambda=j}^{i} C(s+i-lambda, s) == C(s+1+i-j, s+1), brute-forced."""
    if not (i >= 0 and j >= 0 and s >= 0 and j <= i):
        raise ValueError("need 0 <= j <= i and s >= 0")
    lhs = sum(math.comb(s + i - lam, s) for lam in range(j, i + 1))
    rhs = math.comb(s + 1 + i - j, s + 1)
    return lhs == rhs
