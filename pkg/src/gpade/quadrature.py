"""High-precision Gauss-Jacobi quadrature on [0,1] with weight t^a (1-t)^b,
and the S-dimensional tensor quadrature cross-check of the integral
representation of J_F^(k-1).
"""
from __future__ import annotations

import math
from fractions import Fraction

import mpmath
from mpmath import mp, mpf, mpc

from .balls import Ball

_NODE_CACHE: dict = {}


def _jacobi_monic_recurrence(alpha: int, beta: int, N: int):
    """Monic three-term recurrence for Jacobi weight (1-x)^alpha (1+x)^beta
    on [-1, 1]: P_{k+1} = (x - a_k) P_k - b_k P_{k-1} (exact rationals)."""
    a, b = [], []
    for k in range(N):
        s = 2 * k + alpha + beta
        if k == 0:
            ak = Fraction(beta - alpha, alpha + beta + 2)
        else:
            ak = Fraction((beta - alpha) * (beta + alpha), s * (s + 2))
        a.append(ak)
        if k == 0:
            bk = Fraction(0)
        else:
            bk = Fraction(4 * k * (k + alpha) * (k + beta) * (k + alpha + beta),
                          s * s * (s + 1) * (s - 1))
        b.append(bk)
    return a, b


def gauss_jacobi_01(a_exp: int, b_exp: int, N: int) -> tuple[list[mpf], list[mpf]]:
    """Nodes/weights for int_0^1 t^a (1-t)^b f(t) dt ~ sum w_j f(t_j).

    Golub-Welsch at the ambient precision; cached per (a, b, N, prec)."""
    key = (a_exp, b_exp, N, mp.prec)
    hit = _NODE_CACHE.get(key)
    if hit is not None:
        return hit
    alpha, beta = b_exp, a_exp          # x = 2t - 1 maps (1-t) -> (1-x)/2
    arec, brec = _jacobi_monic_recurrence(alpha, beta, N)
    J = mpmath.zeros(N, N)
    for k in range(N):
        J[k, k] = mpf(arec[k].numerator) / arec[k].denominator
        if k + 1 < N:
            off = mpmath.sqrt(mpf(brec[k + 1].numerator) / brec[k + 1].denominator)
            J[k, k + 1] = off
            J[k + 1, k] = off
    E, Q = mpmath.eigsy(J)
    mu0 = Fraction(math.factorial(a_exp) * math.factorial(b_exp),
                   math.factorial(a_exp + b_exp + 1))
    mu0m = mpf(mu0.numerator) / mu0.denominator
    nodes, weights = [], []
    for j in range(N):
        x = E[j]
        t = (1 + x) / 2
        w = mu0m * Q[0, j] ** 2
        nodes.append(t)
        weights.append(w)
    _NODE_CACHE[key] = (nodes, weights)
    return nodes, weights


def _tensor_integral(S: int, a_exp: int, b_exp: int, N: int, fn) -> mpc:
    """int_{[0,1]^S} fn(t1*...*tS) prod t^a (1-t)^b dt, tensor Gauss-Jacobi."""
    nodes, weights = gauss_jacobi_01(a_exp, b_exp, N)
    total = mpc(0)
    idx = [0] * S

    def rec(depth, prod, wacc):
        nonlocal total
        if depth == S:
            total += wacc * fn(prod)
            return
        for j in range(N):
            rec(depth + 1, prod * nodes[j], wacc * weights[j])

    rec(0, mpf(1), mpf(1))
    return total


def jf_quadrature(n: int, r: int, S: int, k: int, z0, provider,
                  N: int = 24) -> Ball:
    """J_F^(k-1)(z0) via the S-fold integral representation (midpoint value;
    the returned radius is an a-posteriori N vs 2N comparison estimate)."""

    def one(Npts) -> mpc:
        total = mpc(0)
        z0m = _to_mpc(z0)
        for i in range(k):
            pref = (math.comb(k - 1, i)
                    * _poch((r + 1) * n + i - k + 3, k - i - 1))
            if pref == 0:
                continue
            zpow = z0m ** ((r + 1) * n + i - k + 2)
            fn = lambda u: provider.derivative(r * n + i, Ball(z0m * u)).mid
            integral = _tensor_integral(S, r * n + i, n, Npts, fn)
            total += pref * zpow * integral / mpf(math.factorial(n)) ** r
        return total

    v1 = one(N)
    v2 = one(2 * N)
    err = abs(v1 - v2) * 4 + abs(v2) * mpf(2) ** (-mp.prec + 12)
    return Ball(v2, err)


def _poch(a: int, m: int) -> int:
    out = 1
    for j in range(m):
        out *= (a + j)
    return out


def _to_mpc(z) -> mpc:
    if isinstance(z, tuple):
        return mpc(mpf(z[0].numerator) / z[0].denominator,
                   mpf(z[1].numerator) / z[1].denominator)
    if isinstance(z, Fraction):
        return mpc(mpf(z.numerator) / z.denominator)
    return mpc(z)
