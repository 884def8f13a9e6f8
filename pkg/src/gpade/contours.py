"""Contour data for the integral representation of J_F: a stadium-shaped
contour around the segment [0, z] kept clear of the cut rays, and the
resulting bounds g(z) (inverse clearance) and h(z) (length * max |F| / 2pi).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp, mpf, mpc

from .balls import Ball


class ContourGeometryError(ValueError):
    pass


@dataclass
class ContourData:
    z: mpc
    epsilon: mpf          # stadium radius around [0, z]
    g: mpf                # max(1, 1/eps): the segment clearance is exactly eps
    h: mpf                # length(C)/(2 pi) * max |F| on C (sampled + padded)
    length: mpf
    samples: int
    heuristic_max: bool = True


def _dist_point_ray(p: mpc, a: mpc) -> mpf:
    """Distance from p to the ray {t*a : t >= 1} (direction away from 0)."""
    u = a / abs(a)
    t = (p - a).real * u.real + (p - a).imag * u.imag
    t = max(t, mpf(0))
    return abs(p - (a + t * u))


def _dist_segment_ray(z: mpc, a: mpc, iters: int = 80) -> mpf:
    """min over t in [0,1] of dist(t*z, ray(a)); convex in t."""
    lo, hi = mpf(0), mpf(1)
    f = lambda t: _dist_point_ray(t * z, a)
    for _ in range(iters):
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        if f(m1) <= f(m2):
            hi = m2
        else:
            lo = m1
    return f((lo + hi) / 2)


def contour_points(z: mpc, eps: mpf, samples: int) -> list[mpc]:
    """Boundary of the stadium around [0, z] with radius eps."""
    u = z / abs(z)
    n = mpc(-u.imag, u.real)   # unit normal
    L = abs(z)
    per = 2 * L + 2 * mpmath.pi() * eps
    pts = []
    for j in range(samples):
        s = per * j / samples
        if s < L:                                   # side 1
            pts.append(u * s + n * eps)
        elif s < L + mpmath.pi() * eps:             # cap at z
            phi = (s - L) / eps
            pts.append(z + eps * (n * mpmath.cos(phi) + u * mpmath.sin(phi)))
        elif s < 2 * L + mpmath.pi() * eps:         # side 2
            t = s - L - mpmath.pi() * eps
            pts.append(u * (L - t) - n * eps)
        else:                                       # cap at 0
            phi = (s - 2 * L - mpmath.pi() * eps) / eps
            pts.append(-eps * (n * mpmath.cos(phi) + u * mpmath.sin(phi)))
    return pts


def contour_bounds(provider, z, cut_points: list[mpc],
                   samples: int = 256, eps_scale: Fraction = Fraction(1, 2)
                   ) -> ContourData:
    """Construct the default contour and the bounds g(z), h(z).

    ``provider`` evaluates F (derivative order 0) as a Ball; ``cut_points``
    are the finite singularities of F whose rays t*alpha (t >= 1) must be
    avoided.  The max of |F| is sampled with Lipschitz-style padding from
    adjacent differences (flagged heuristic).
    """
    zm = mpc(z) if not isinstance(z, tuple) else mpc(mpf(z[0].numerator) / z[0].denominator,
                                                     mpf(z[1].numerator) / z[1].denominator)
    if abs(zm) == 0:
        raise ContourGeometryError("z must be nonzero")
    dmin = mpf("inf")
    for a in cut_points:
        if abs(a) < mpf("1e-30"):
            continue
        dmin = min(dmin, _dist_segment_ray(zm, a))
    if dmin <= 0:
        raise ContourGeometryError("z lies on a cut; no admissible contour")
    eps = dmin * mpf(eps_scale.numerator) / eps_scale.denominator
    eps = min(eps, mpf("0.75") * abs(zm))
    if not (eps > 0) or eps == mpf("inf"):
        eps = mpf("0.75") * abs(zm)
    pts = contour_points(zm, eps, samples)
    vals = []
    for p in pts:
        vals.append(provider.derivative(0, Ball(p)).abs_upper())
    fmax = max(vals)
    lip = max(abs(vals[j] - vals[(j + 1) % samples]) for j in range(samples))
    fmax += lip
    length = 2 * abs(zm) + 2 * mpmath.pi() * eps
    g = max(mpf(1), 1 / eps)
    h = length / (2 * mpmath.pi()) * fmax
    return ContourData(z=zm, epsilon=eps, g=g, h=h, length=length, samples=samples)


def jf_decay_bound(z: mpc, g: mpf, r: int, S: int) -> mpf:
    """limsup |J_F^{(k-1)}(z)|^{1/n} <= max(1,|z|)^{r+1} g(z)^r / (r+1)^{S-r}."""
    zt = max(mpf(1), abs(z))
    return zt ** (r + 1) * g ** r / mpf(r + 1) ** (S - r)
