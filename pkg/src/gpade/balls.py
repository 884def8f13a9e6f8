"""Complex ball arithmetic on top of mpmath.

A ball is (midpoint, radius); every operation propagates radii outward and
adds a few-ulp pad for the midpoint rounding at the ambient working
precision.  Radius bookkeeping uses cheap 1-norm upper bounds (valid outward
estimates).  Pipelines wrap computations in ``mpmath.workprec``.
"""
from __future__ import annotations

from fractions import Fraction

import mpmath
from mpmath import mp, mpc, mpf

_EPS_CACHE: dict[int, tuple[mpf, mpf]] = {}


def _eps() -> tuple[mpf, mpf]:
    p = mp.prec
    e = _EPS_CACHE.get(p)
    if e is None:
        e = (mpf(2) ** (6 - p), mpf(2) ** (-2 * p))
        _EPS_CACHE[p] = e
    return e


def _abs1(z: mpc) -> mpf:
    # 1-norm upper bound for |z|
    return abs(z.real) + abs(z.imag)


def _abs_low(z: mpc) -> mpf:
    # max-norm lower bound for |z|
    a, b = abs(z.real), abs(z.imag)
    return a if a >= b else b


def _pad_for(x_abs, extra=None):
    eps, floor = _eps()
    out = x_abs * eps + floor
    if extra is not None:
        out += extra
    return out


def _to_mpc(x) -> mpc:
    if isinstance(x, Fraction):
        return mpc(mpf(x.numerator) / x.denominator)
    if isinstance(x, tuple):  # (re, im) exact rationals
        return mpc(mpf(x[0].numerator) / x[0].denominator,
                   mpf(x[1].numerator) / x[1].denominator)
    return mpc(x)


class Ball:
    __slots__ = ("mid", "rad")

    def __init__(self, mid, rad=0):
        self.mid = mid if type(mid) is mpc else _to_mpc(mid)
        self.rad = rad if type(rad) is mpf else mpf(rad)
        if self.rad < 0:
            raise ValueError("negative radius")

    @staticmethod
    def exact(x) -> "Ball":
        if isinstance(x, Fraction):
            m = mpf(x.numerator) / x.denominator
            eps, floor = _eps()
            r = abs(m) * eps + floor if x.denominator != 1 else mpf(0)
            return Ball(mpc(m), r)
        m = _to_mpc(x)
        return Ball(m, _pad_for(_abs1(m)))

    @staticmethod
    def from_int(n: int) -> "Ball":
        return Ball(mpc(n), mpf(0))

    # -- ring ops ----------------------------------------------------------
    def _coerce(self, other) -> "Ball":
        if isinstance(other, Ball):
            return other
        if isinstance(other, int):
            return Ball(mpc(other), mpf(0))
        if isinstance(other, Fraction):
            return Ball.exact(other)
        m = _to_mpc(other)
        return Ball(m, _pad_for(_abs1(m)))

    def __add__(self, other):
        o = other if type(other) is Ball else self._coerce(other)
        m = self.mid + o.mid
        eps, floor = _eps()
        return Ball(m, self.rad + o.rad + _abs1(m) * eps + floor)

    __radd__ = __add__

    def __neg__(self):
        return Ball(-self.mid, self.rad)

    def __sub__(self, other):
        o = other if type(other) is Ball else self._coerce(other)
        m = self.mid - o.mid
        eps, floor = _eps()
        return Ball(m, self.rad + o.rad + _abs1(m) * eps + floor)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = other if type(other) is Ball else self._coerce(other)
        m = self.mid * o.mid
        a = _abs1(self.mid)
        b = _abs1(o.mid)
        eps, floor = _eps()
        return Ball(m, a * o.rad + b * self.rad + self.rad * o.rad
                    + _abs1(m) * eps + floor)

    __rmul__ = __mul__

    def reciprocal(self) -> "Ball":
        a = abs(self.mid)
        if a <= self.rad:
            raise ZeroDivisionError("ball contains zero")
        m = 1 / self.mid
        rad = self.rad / (a * (a - self.rad))
        return Ball(m, rad + _pad_for(_abs1(m)))

    def __truediv__(self, other):
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def __pow__(self, n: int):
        if n == 0:
            return Ball(mpc(1), mpf(0))
        if n < 0:
            return (self ** (-n)).reciprocal()
        out = self
        for _ in range(n - 1):
            out = out * self
        return out

    # -- transcendental ----------------------------------------------------
    def exp(self) -> "Ball":
        m = mpmath.exp(self.mid)
        grow = _abs1(m) * (mpmath.exp(self.rad) - 1) if self.rad else mpf(0)
        return Ball(m, grow + _pad_for(_abs1(m)))

    def log(self) -> "Ball":
        # principal branch; caller manages branch consistency
        a = abs(self.mid)
        if a <= self.rad:
            raise ZeroDivisionError("log of ball containing zero")
        m = mpmath.log(self.mid)
        return Ball(m, self.rad / (a - self.rad) + _pad_for(_abs1(m)))

    # -- queries -------------------------------------------------------------
    def abs_upper(self) -> mpf:
        return abs(self.mid) + self.rad

    def abs_lower(self) -> mpf:
        v = abs(self.mid) - self.rad
        return v if v > 0 else mpf(0)

    def contains_zero(self) -> bool:
        return abs(self.mid) <= self.rad

    def overlaps(self, other: "Ball") -> bool:
        return abs(self.mid - other.mid) <= self.rad + other.rad

    def contains_value(self, v) -> bool:
        return abs(self.mid - _to_mpc(v)) <= self.rad

    def widened(self, extra) -> "Ball":
        return Ball(self.mid, self.rad + mpf(extra))

    def is_zero_coeff(self) -> bool:
        # for NilssonSeries coefficient pruning: only exact zeros vanish
        return self.rad == 0 and self.mid == 0

    def __repr__(self):
        return f"Ball({mpmath.nstr(self.mid, 12)} +- {mpmath.nstr(self.rad, 3)})"


def ball_pi() -> Ball:
    m = mpmath.pi()
    return Ball(mpc(m), _pad_for(abs(m)))


def two_pi_i_ball() -> Ball:
    p = ball_pi()
    return Ball(mpc(0, 2) * p.mid, 2 * p.rad + _pad_for(2 * abs(p.mid)))


def ball_power_frac(z: Ball, logz: Ball, k: Fraction) -> Ball:
    """z^k = exp(k log z) on the caller's branch (log supplied)."""
    if k.denominator == 1:
        return z ** int(k)
    return (logz * k).exp()


def ball_linear_solve(M: list[list[Ball]], b: list[Ball]) -> list[Ball]:
    """Gaussian elimination with max-|mid| pivoting in ball arithmetic."""
    n = len(M)
    A = [row[:] + [b[i]] for i, row in enumerate(M)]
    for c in range(n):
        piv = max(range(c, n), key=lambda r: _abs_low(A[r][c].mid))
        if A[piv][c].contains_zero():
            raise ZeroDivisionError("ball matrix numerically singular")
        A[c], A[piv] = A[piv], A[c]
        inv = A[c][c].reciprocal()
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and not (A[r][c].rad == 0 and A[r][c].mid == 0):
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [A[i][n] for i in range(n)]
