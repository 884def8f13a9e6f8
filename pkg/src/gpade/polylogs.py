"""Polylogarithm evaluation: direct series in the unit disk and the
inversion/connection formula outside, on the branch arg(z) in (0, 2*pi).
Independent oracle against ODE continuation.  Also the closed-form value /
derivative providers for the built-in demo functions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp, mpf, mpc

from .balls import Ball, ball_pi, _to_mpc
from .polynomials import Poly, RationalFunctionK


class BranchCutError(ValueError):
    pass


def bernoulli_polynomial(s: int) -> Poly:
    """B_s(x) with exact rational coefficients."""
    out = [Fraction(0)] * (s + 1)
    for k in range(s + 1):
        p, q = mpmath.bernfrac(k)
        bk = Fraction(int(p), int(q))
        out[s - k] = math.comb(s, k) * bk
    return Poly(out)


def li_series(s: int, w: Ball, tol_bits: int | None = None) -> Ball:
    """Li_s(w) = sum w^k/k^s by direct summation, |w| < 1, with a geometric
    tail bound."""
    aw = w.abs_upper()
    if aw >= 1:
        raise ValueError("series evaluation requires |w| < 1")
    bits = tol_bits or mp.prec
    # terms: aw^T/(1-aw) <= 2^-bits
    T = int(mpmath.ceil((bits + 4) / (-mpmath.log(aw, 2)))) + 2 if aw > 0 else 4
    acc = Ball.from_int(0)
    wk = Ball.from_int(1)
    for k in range(1, T + 1):
        wk = wk * w
        acc = acc + wk * Fraction(1, k ** s)
    tail = aw ** (T + 1) / (1 - aw)
    return acc.widened(tail)


def log_branch_02pi(z: Ball) -> Ball:
    """log(z) with arg in (0, 2*pi); z must stay off [0, +inf)."""
    if abs(z.mid.imag) <= z.rad and z.mid.real + z.rad > 0:
        raise BranchCutError("ball touches the branch cut [0, +inf)")
    lg = z.log()  # principal: arg in (-pi, pi]
    if lg.mid.imag > 0:
        return lg
    tp = ball_pi()
    return Ball(lg.mid + mpc(0, 2) * tp.mid, lg.rad + 2 * tp.rad)


def polylog_connection(s: int, z, warn_margin: float = 1e-6) -> Ball:
    """Li_s(z) = (-1)^(s+1) Li_s(1/z) - (2 i pi)^s / s! * B_s(log(z)/(2 i pi)),
    for z off [0, +inf), on the branch arg(z) in (0, 2*pi)."""
    if s < 1:
        raise ValueError("s >= 1")
    zb = z if isinstance(z, Ball) else Ball.exact(z) if isinstance(z, (Fraction, tuple)) else Ball(z)
    if zb.mid.imag == 0 and zb.mid.real >= 0:
        raise BranchCutError("z on [0, +inf)")
    near_cut = abs(zb.mid.imag) < warn_margin and zb.mid.real > 0
    lg = log_branch_02pi(zb)
    tp = ball_pi()
    two_pi_i = Ball(mpc(0, 2) * tp.mid, 2 * tp.rad)
    x = lg / two_pi_i
    B = bernoulli_polynomial(s)
    bval = Ball.from_int(0)
    for c in reversed(B.coeffs):
        bval = bval * x + Ball.exact(c)
    main = li_series(s, zb.reciprocal()) * ((-1) ** ((s + 1) % 2))
    corr = (two_pi_i ** s) * bval * Fraction(1, math.factorial(s))
    out = main - corr
    if near_cut:
        out = out.widened(out.abs_upper() * mpf(2) ** (-mp.prec // 2))
    return out


def li_value(s: int, z) -> Ball:
    """Li_s at an arbitrary point off [1, +inf): series inside the disk,
    connection formula outside (branch arg(z) in (0, 2*pi) there)."""
    zb = z if isinstance(z, Ball) else Ball.exact(z) if isinstance(z, (Fraction, tuple)) else Ball(z)
    if zb.abs_upper() < mpf(0.999):
        return li_series(s, zb)
    if zb.mid.imag == 0 and zb.mid.real >= 1:
        raise BranchCutError("z on the cut [1, +inf)")
    return polylog_connection(s, zb)


def var1_li_closed_form(s: int, logz: Ball) -> Ball:
    """var_1 Li_s = -2 i pi log(z)^{s-1} / (s-1)!."""
    tp = ball_pi()
    two_pi_i = Ball(mpc(0, 2) * tp.mid, 2 * tp.rad)
    return -two_pi_i * (logz ** (s - 1)) * Fraction(1, math.factorial(s - 1))


# ---------------------------------------------------------------------------
# demo-function providers (values and high derivatives) for quadrature checks

class FunctionProvider:
    """Evaluates F^{(j)}(w) as a ball; w anywhere in the cut plane."""

    name: str

    def derivative(self, j: int, w: Ball) -> Ball:
        raise NotImplementedError

    def coefficients(self, count: int) -> list[Fraction]:
        raise NotImplementedError


class GeometricProvider(FunctionProvider):
    """F = 1/(1-z): F^(j)(w) = j!/(1-w)^(j+1)."""

    name = "geometric"

    def derivative(self, j: int, w: Ball) -> Ball:
        base = (Ball.from_int(1) - w).reciprocal()
        return (base ** (j + 1)) * Fraction(math.factorial(j))

    def coefficients(self, count: int) -> list[Fraction]:
        return [Fraction(1)] * count


class PolylogProvider(FunctionProvider):
    """F = Li_s: derivatives via the exact closure over {Li_t} + Q(z)."""

    def __init__(self, s: int):
        self.s = s
        self.name = f"li{s}"
        self._cache: dict[int, tuple[dict[int, RationalFunctionK], RationalFunctionK]] = {}

    def _symbolic(self, j: int):
        if j in self._cache:
            return self._cache[j]
        if j == 0:
            sym = ({self.s: RationalFunctionK.const(Fraction(1))},
                   RationalFunctionK.const(Fraction(0)))
        else:
            li, rat = self._symbolic(j - 1)
            z = Poly.x(1)
            nli: dict[int, RationalFunctionK] = {}
            nrat = rat.derivative()
            for t, Q in li.items():
                dQ = Q.derivative()
                if not dQ.is_zero():
                    nli[t] = nli.get(t, RationalFunctionK.const(Fraction(0))) + dQ
                if t >= 2:
                    term = Q / RationalFunctionK(z)
                    nli[t - 1] = nli.get(t - 1, RationalFunctionK.const(Fraction(0))) + term
                else:
                    # d/dz Li_1 = 1/(1-z)
                    nrat = nrat + Q / RationalFunctionK(Poly([Fraction(1), Fraction(-1)]))
            nli = {t: Q for t, Q in nli.items() if not Q.is_zero()}
            sym = (nli, nrat)
        self._cache[j] = sym
        return sym

    def derivative(self, j: int, w: Ball) -> Ball:
        li, rat = self._symbolic(j)
        acc = _eval_rat_ball(rat, w)
        for t, Q in li.items():
            acc = acc + _eval_rat_ball(Q, w) * li_value(t, w)
        return acc

    def coefficients(self, count: int) -> list[Fraction]:
        return [Fraction(0)] + [Fraction(1, k ** self.s) for k in range(1, count)]


def _eval_rat_ball(R: RationalFunctionK, w: Ball) -> Ball:
    num = Ball.from_int(0)
    for c in reversed(R.num.coeffs):
        num = num * w + Ball.exact(Fraction(c))
    den = Ball.from_int(0)
    for c in reversed(R.den.coeffs):
        den = den * w + Ball.exact(Fraction(c))
    return num / den


def provider_for(name: str) -> FunctionProvider:
    if name == "geometric":
        return GeometricProvider()
    if name.startswith("li"):
        return PolylogProvider(int(name[2:]))
    raise KeyError(f"no value provider for {name!r}")
