"""Exact arithmetic over number fields K = Q(theta).

A field is described by a monic integer minimal polynomial; elements are
rational coordinate vectors in the power basis.  Houses are certified upper
bounds computed from refinable complex embeddings; norms are exact rationals
computed from the multiplication matrix.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

MAX_FIELD_DEGREE = 8  # resource guard, see ledger; the theory never bounds [K:Q]


def lcm_upto(n: int) -> int:
    """d_n = lcm(1, ..., n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    d = 1
    for k in range(2, n + 1):
        d = d * k // math.gcd(d, k)
    return d


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot coerce {x!r} to a rational")


def parse_rational(text: str) -> Fraction:
    """Exact rational I/O in "p/q" form."""
    return Fraction(text.strip())


def format_rational(x: Fraction) -> str:
    x = _as_fraction(x)
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


# ---------------------------------------------------------------------------
# integer polynomial helpers (little-endian coefficient lists)

def _zpoly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def _zpoly_divides(d: list[int], p: list[int]) -> bool:
    # exact division test of monic-ish d into p over Z
    p = list(p)
    dd = len(d) - 1
    if d[-1] == 0:
        return False
    while len(p) - 1 >= dd:
        lead = p[-1]
        if lead % d[-1] != 0:
            return False
        q = lead // d[-1]
        off = len(p) - 1 - dd
        for i, di in enumerate(d):
            p[off + i] -= q * di
        while len(p) > 1 and p[-1] == 0:
            p.pop()
        if len(p) - 1 < dd:
            break
    return all(c == 0 for c in p)


def _zpoly_squarefree(p: list[int]) -> bool:
    der = [i * c for i, c in enumerate(p)][1:]
    # gcd via rational PRS; squarefree iff gcd is constant
    a = [Fraction(c) for c in p]
    b = [Fraction(c) for c in der]
    while any(b):
        a, b = b, _qpoly_mod(a, b)
    return len(_qtrim(a)) == 1


def _qtrim(a: list[Fraction]) -> list[Fraction]:
    a = list(a)
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _qpoly_mod(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    a = _qtrim(a)
    b = _qtrim(b)
    while len(a) >= len(b) and any(a):
        q = a[-1] / b[-1]
        off = len(a) - len(b)
        for i, bi in enumerate(b):
            a[off + i] -= q * bi
        a = _qtrim(a)
        if len(a) == 1 and a[0] == 0:
            break
    return a


def _is_irreducible(minpoly: list[int]) -> bool:
    """Complete irreducibility test for monic integer polynomials of small degree.

    Numerical Zassenhaus: compute the roots to high precision, try every proper
    subset product as a candidate monic integer factor and test exact division.
    Subset count is <= 2^MAX_FIELD_DEGREE.
    """
    deg = len(minpoly) - 1
    if deg == 1:
        return True
    if not _zpoly_squarefree(minpoly):
        return False
    prec = mpmath.mp.prec
    try:
        mpmath.mp.prec = 300
        roots = mpmath.polyroots([mpmath.mpf(c) for c in reversed(minpoly)],
                                 maxsteps=200, extraprec=200)
        for mask in range(1, 1 << deg):
            k = bin(mask).count("1")
            if k == 0 or k == deg:
                continue
            fac = [mpmath.mpc(1)]
            for i in range(deg):
                if mask & (1 << i):
                    fac = [mpmath.mpc(0)] + fac
                    r = roots[i]
                    for j in range(len(fac) - 1):
                        fac[j] -= r * fac[j + 1]
            cand = []
            ok = True
            for c in fac[:-1]:
                ci = mpmath.nint(c.real)
                if abs(c.real - ci) > mpmath.mpf(2) ** -40 or abs(c.imag) > mpmath.mpf(2) ** -40:
                    ok = False
                    break
                cand.append(int(ci))
            if not ok:
                continue
            cand.append(1)
            if _zpoly_divides(cand, minpoly):
                return False
        return True
    finally:
        mpmath.mp.prec = prec


class NumberField:
    """Q(theta) for theta a root of a monic irreducible integer polynomial.

    ``minimal_polynomial`` is little-endian (constant first), matching the
    config literal syntax.
    """

    def __init__(self, minimal_polynomial: Sequence[int], check: bool = True):
        coeffs = [int(c) for c in minimal_polynomial]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) < 2:
            raise ValueError("minimal polynomial must have degree >= 1")
        if coeffs[-1] != 1:
            raise ValueError("minimal polynomial must be monic")
        if len(coeffs) - 1 > MAX_FIELD_DEGREE:
            raise ValueError(
                f"field degree {len(coeffs)-1} exceeds supported cap {MAX_FIELD_DEGREE}")
        if check and not _is_irreducible(coeffs):
            raise ValueError("minimal polynomial is reducible over Q")
        self.minimal_polynomial = tuple(coeffs)
        self.degree = len(coeffs) - 1
        # reduction table: theta^(degree+i) as coordinate vectors
        self._red: list[tuple[Fraction, ...]] = []
        self._embeddings: list[mpmath.mpc] | None = None
        self._embedding_prec = 0
        self._build_reduction()

    def _build_reduction(self):
        d = self.degree
        base = [-Fraction(c) for c in self.minimal_polynomial[:-1]]
        rows = [tuple(base)]
        for _ in range(d - 1):
            prev = rows[-1]
            shifted = [Fraction(0)] + list(prev[:-1])
            top = prev[-1]
            nxt = [shifted[i] + top * base[i] for i in range(d)]
            rows.append(tuple(nxt))
        self._red = rows

    # -- embeddings -----------------------------------------------------
    def embeddings(self, prec: int = 128) -> list[mpmath.mpc]:
        """All complex roots of the minimal polynomial, refined on demand."""
        if self._embeddings is None or self._embedding_prec < prec:
            old = mpmath.mp.prec
            try:
                mpmath.mp.prec = prec + 32
                roots = mpmath.polyroots(
                    [mpmath.mpf(c) for c in reversed(self.minimal_polynomial)],
                    maxsteps=200, extraprec=prec)
                self._embeddings = [mpmath.mpc(r) for r in roots]
                self._embedding_prec = prec
            finally:
                mpmath.mp.prec = old
        return self._embeddings

    def is_real(self) -> bool:
        """True iff K (with every embedding) lies in R."""
        return all(abs(r.imag) < mpmath.mpf(2) ** (-40)
                   for r in self.embeddings(128))

    # -- element construction -------------------------------------------
    def element(self, coords: Iterable) -> "NFElement":
        v = [_as_fraction(c) for c in coords]
        if len(v) > self.degree:
            raise ValueError("coordinate vector longer than field degree")
        v += [Fraction(0)] * (self.degree - len(v))
        return NFElement(self, tuple(v))

    def from_rational(self, x) -> "NFElement":
        return self.element([_as_fraction(x)] + [0] * (self.degree - 1))

    def generator(self) -> "NFElement":
        if self.degree == 1:
            return self.from_rational(-Fraction(self.minimal_polynomial[0]))
        return self.element([0, 1] + [0] * (self.degree - 2))

    def zero(self) -> "NFElement":
        return self.from_rational(0)

    def one(self) -> "NFElement":
        return self.from_rational(1)

    def __eq__(self, other):
        return isinstance(other, NumberField) and \
            self.minimal_polynomial == other.minimal_polynomial

    def __hash__(self):
        return hash(self.minimal_polynomial)

    def __repr__(self):
        return f"NumberField({list(self.minimal_polynomial)})"


QQ = NumberField([0, 1], check=False)  # theta = 0: plain rationals


class NFElement:
    """Element of a NumberField in power-basis coordinates (immutable)."""

    __slots__ = ("field", "coords")

    def __init__(self, field: NumberField, coords: tuple[Fraction, ...]):
        self.field = field
        self.coords = coords

    # -- ring operations -------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return NFElement(self.field, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return NFElement(self.field, tuple(-a for a in self.coords))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return NFElement(self.field, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d = self.field.degree
        prod = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(other.coords):
                    if b:
                        prod[i + j] += a * b
        out = list(prod[:d])
        red = self.field._red
        for k in range(d, 2 * d - 1):
            c = prod[k]
            if c:
                row = red[k - d]
                for i in range(d):
                    out[i] += c * row[i]
        return NFElement(self.field, tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def inverse(self) -> "NFElement":
        if not self:
            raise ZeroDivisionError("division by zero field element")
        d = self.field.degree
        if d == 1:
            return NFElement(self.field, (1 / self.coords[0],))
        # solve self * x = 1 via the multiplication matrix
        from .linalg import solve_exact
        M = self.mult_matrix()
        cols = [[M[i][j] for i in range(d)] for j in range(d)]  # transpose
        rhs = [Fraction(1)] + [Fraction(0)] * (d - 1)
        res = solve_exact([list(r) for r in zip(*cols)], rhs)
        assert res.particular is not None
        return NFElement(self.field, tuple(res.particular))

    def mult_matrix(self) -> list[list[Fraction]]:
        """Matrix of y -> x*y in the power basis (columns are x*theta^j)."""
        d = self.field.degree
        cols = []
        cur = self
        gen = self.field.generator() if d > 1 else None
        for _ in range(d):
            cols.append(list(cur.coords))
            if gen is not None:
                cur = cur * gen
        return [[cols[j][i] for j in range(d)] for i in range(d)]

    # -- predicates / conversions ----------------------------------------
    def _coerce(self, other):
        if isinstance(other, NFElement):
            if other.field != self.field:
                return NotImplemented
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_rational(other)
        return NotImplemented

    def __bool__(self):
        return any(self.coords)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.from_rational(other)
        if not isinstance(other, NFElement) or other.field != self.field:
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self):
        return hash((self.field.minimal_polynomial, self.coords))

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coords[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.coords[0]

    def denominator_lcm(self) -> int:
        out = 1
        for c in self.coords:
            out = out * c.denominator // math.gcd(out, c.denominator)
        return out

    # -- norm and house ----------------------------------------------------
    def norm(self) -> Fraction:
        """Exact N_{K/Q}(x) = det of the multiplication matrix."""
        from .linalg import det_exact
        if self.field.degree == 1:
            return self.coords[0]
        return det_exact(self.mult_matrix())

    def house(self, precision: int = 128) -> mpmath.mpf:
        """Certified upper bound on max |sigma(x)| over all embeddings."""
        if self.is_rational():
            return abs(mpmath.mpf(self.coords[0].numerator)) / self.coords[0].denominator
        old = mpmath.mp.prec
        try:
            mpmath.mp.prec = precision + 32
            best = mpmath.mpf(0)
            for r in self.field.embeddings(precision):
                v = mpmath.mpc(0)
                for c in reversed(self.coords):
                    v = v * r + mpmath.mpf(c.numerator) / c.denominator
                best = max(best, abs(v))
            # outward pad for root/eval rounding
            return best * (1 + mpmath.mpf(2) ** (-precision + 8)) + mpmath.mpf(2) ** (-precision + 8)
        finally:
            mpmath.mp.prec = old

    def embed(self, index: int = 0, precision: int = 128) -> mpmath.mpc:
        """Value of the element under one fixed complex embedding."""
        old = mpmath.mp.prec
        try:
            mpmath.mp.prec = precision + 16
            r = self.field.embeddings(precision)[index]
            v = mpmath.mpc(0)
            for c in reversed(self.coords):
                v = v * r + mpmath.mpf(c.numerator) / c.denominator
            return v
        finally:
            mpmath.mp.prec = old

    def __repr__(self):
        return f"NFElement({list(self.coords)})"

    def format(self) -> str:
        return "[" + ",".join(format_rational(c) for c in self.coords) + "]"


def house_of(x, precision: int = 128):
    """House of a scalar: Fraction or NFElement."""
    if isinstance(x, NFElement):
        return x.house(precision)
    x = _as_fraction(x)
    return abs(mpmath.mpf(x.numerator)) / x.denominator


def norm_in(x, field: NumberField) -> Fraction:
    """N_{K/Q}(x) where rationals r in a degree-d field give r^d."""
    if isinstance(x, NFElement):
        return x.norm()
    return _as_fraction(x) ** field.degree
