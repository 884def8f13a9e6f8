"""Certified analytic continuation of the companion system Y' = AY by
truncated Taylor steps.

Paths are polygonal with exact Gaussian-rational waypoints, planned radially
(the domain is star-shaped at 0, so the segment [0, z0] direction is always
admissible) plus circles for monodromy loops.  Each step carries a rigorous
tail bound: a Gronwall bound for the solution on a disk strictly inside the
singularity-free region turns into a geometric Cauchy remainder.  Series
evaluations near 0 / near a singular point use measured-coefficient majorant
tails with a wide safety factor (flagged, not proved).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mp, mpf, mpc

from .balls import Ball, ball_linear_solve, ball_power_frac, two_pi_i_ball
from .companion import CompanionSystem, build_system
from .localbasis import LocalBasis, local_basis
from .nilsson import NilssonSeries
from .operators import DifferentialOperator, OperatorProfile
from .polynomials import Poly

GP = tuple[Fraction, Fraction]   # exact Gaussian rational point


class PathError(ValueError):
    pass


def gp(re, im=0) -> GP:
    return (Fraction(re), Fraction(im))


def gp_to_mpc(p: GP) -> mpc:
    return mpc(mpf(p[0].numerator) / p[0].denominator,
               mpf(p[1].numerator) / p[1].denominator)


@dataclass
class ContinuationPath:
    waypoints: list[GP]

    def __len__(self):
        return len(self.waypoints)


def _sing_points_numeric(L: DifferentialOperator, prec: int = 128) -> list[mpc]:
    pts = [mpc(0)]
    for s in L.singularities():
        if s.exact:
            v = s.value
            if isinstance(v, Fraction):
                pts.append(mpc(mpf(v.numerator) / v.denominator))
            else:
                pts.append(mpc(v.embed(0, prec)))
        else:
            with mpmath.workprec(prec + 32):
                roots = mpmath.polyroots(
                    [mpmath.mpf(str(c)) if isinstance(c, Fraction) else c
                     for c in reversed([Fraction(x) for x in s.minimal_factor.coeffs])],
                    maxsteps=100, extraprec=64)
            pts.extend(mpc(r) for r in roots)
    return pts


def _min_dist(z: mpc, pts: list[mpc]) -> mpf:
    return min((abs(z - p) for p in pts), default=mpf("inf"))


def plan_radial_path(z_target: GP, sing: list[mpc], start_ratio: Fraction = Fraction(1, 4),
                     step_ratio: float = 0.18) -> ContinuationPath:
    """Waypoints along the ray [0, z_target], adaptively subdivided so each
    step stays within step_ratio of the local distance to a singularity."""
    zt = gp_to_mpc(z_target)
    if zt == 0:
        raise PathError("target must be nonzero")
    nonzero = [p for p in sing if abs(p) > mpf("1e-30")]
    rmin = min((abs(p) for p in nonzero), default=mpf(1))
    # start point: on the ray, well inside the convergence disk
    t0 = min(Fraction(1, 2), start_ratio * _frac_lower(rmin / abs(zt)))
    pts = [(_scale(z_target, t0))]
    t = t0
    while t < 1:
        cur = gp_to_mpc(_scale(z_target, t))
        d = _min_dist(cur, sing + [mpc(0)])
        step = mpf(step_ratio) * d / abs(zt)
        t_next = min(Fraction(1), t + _frac_lower(step))
        if t_next == t:
            raise PathError("step size underflow near a singularity; refine the path")
        t = t_next
        pts.append(_scale(z_target, t))
    return ContinuationPath(pts)


def segment_clear(a: GP, b: GP, sing: list[mpc], margin: float = 0.02) -> bool:
    am, bm = gp_to_mpc(a), gp_to_mpc(b)
    seg = bm - am
    L2 = abs(seg) ** 2
    for p in sing:
        if L2 == 0:
            d = abs(am - p)
        else:
            t = ((p - am).real * seg.real + (p - am).imag * seg.imag) / L2
            t = min(max(t, mpf(0)), mpf(1))
            d = abs(am + seg * t - p)
        if d <= mpf(margin):
            return False
    return True


def plan_path(z_target: GP, sing: list[mpc], upper: bool = True) -> ContinuationPath:
    """Radial when the ray is clear of singularities, else a three-leg detour
    through the chosen half plane (used e.g. for targets past a cut)."""
    try:
        radial = plan_radial_path(z_target, sing)
        pts = radial.waypoints
        ok = all(segment_clear(a, b, sing) for a, b in zip(pts, pts[1:]))
        if ok:
            return radial
    except PathError:
        pass
    zt = gp_to_mpc(z_target)
    rmax = max([abs(p) for p in sing] + [abs(zt)])
    alt = Fraction(float(rmax * mpf("1.2"))).limit_denominator(10 ** 6)
    s = alt if upper else -alt
    nonzero = [p for p in sing if abs(p) > mpf("1e-30")]
    rmin = min((abs(p) for p in nonzero), default=mpf(1))
    t0 = _frac_lower(rmin / (4 * abs(zt))) if abs(zt) > rmin / 4 else Fraction(1, 2)
    start = _scale(z_target, min(Fraction(1, 2), t0))
    way = [start,
           (start[0], start[1] + s),
           (z_target[0], z_target[1] + s),
           z_target]
    for a, b in zip(way, way[1:]):
        if not segment_clear(a, b, sing):
            raise PathError("detour path intersects a singularity; supply a path")
    return ContinuationPath(way)


def plan_loop(alpha: GP, sing: list[mpc], ratio: Fraction = Fraction(1, 4),
              points: int = 12) -> tuple[GP, ContinuationPath]:
    """Base point on the 0-side of alpha plus a positively-oriented polygonal
    loop around alpha (returning to base)."""
    a = gp_to_mpc(alpha)
    others = [p for p in sing if abs(p - a) > mpf("1e-30")]
    d = min([_min_dist(a, others), abs(a)])
    rho = _frac_lower(mpf(ratio.numerator) / ratio.denominator * d / abs(a))  # relative loop radius along -alpha
    base = _scale(alpha, 1 - rho)
    way = [base]
    # polygon on the circle |z - alpha| = rho*|alpha|, starting at base, ccw
    for j in range(1, points + 1):
        phi = 2 * math.pi * j / points
        c, s = Fraction(math.cos(phi)).limit_denominator(10 ** 12), \
            Fraction(math.sin(phi)).limit_denominator(10 ** 12)
        # base - alpha = -rho*alpha; rotate by phi
        dr = (-rho * alpha[0], -rho * alpha[1])
        rot = (dr[0] * c - dr[1] * s, dr[0] * s + dr[1] * c)
        way.append((alpha[0] + rot[0], alpha[1] + rot[1]))
    way.append(base)
    return base, ContinuationPath(way)


def _scale(p: GP, t: Fraction) -> GP:
    return (p[0] * t, p[1] * t)


def _frac_lower(x: mpf) -> Fraction:
    return Fraction(float(x * mpf("0.999"))).limit_denominator(10 ** 12)


# ---------------------------------------------------------------------------

class CompanionIntegrator:
    """Taylor-step integrator for Y' = AY in the companion coordinates."""

    def __init__(self, companion: CompanionSystem, prec: int):
        self.comp = companion
        self.prec = prec
        L = companion.L
        bs, _sh = L.theta_polys()
        self.bs = bs
        self.mu = companion.prof.mu
        self.ell1 = companion.prof.ell1
        self.S = companion.S
        self.q = companion.q
        with mpmath.workprec(prec + 32):
            self.sing = _sing_points_numeric(L, prec)
            bmu = bs[self.mu]
            den = bmu.denominator_lcm()
            self.bmu_int = bmu * den
            with mpmath.workprec(prec + 64):
                if self.bmu_int.degree > 0:
                    self.bmu_roots = mpmath.polyroots(
                        [_f2m(c) for c in reversed(self.bmu_int.coeffs)],
                        maxsteps=200, extraprec=96)
                else:
                    self.bmu_roots = []
                self.bmu_lead = _f2m(self.bmu_int.leading())

    # -- one Taylor step ---------------------------------------------------
    def step(self, c: GP, h: mpc, cols: list[tuple[list[mpc], mpf]]
             ) -> list[tuple[list[mpc], mpf]]:
        """Advance every column by one Taylor step.

        Columns are (midpoint vector, radius).  The analytic truncation tail
        is a rigorous Gronwall/Cauchy bound; input radii propagate through the
        fundamental matrix (bounded by exp(normA*|h|)); floating-point
        rounding inside the recursion is covered by a generous linear
        envelope E * q * T * 2^(8-prec) with E = sum_t ||Y_t|| |h|^t.
        """
        cm = gp_to_mpc(c)
        d_sing = _min_dist(cm, self.sing)
        ah = abs(h)
        if not (ah <= mpf("0.55") * d_sing):
            raise PathError("step exceeds half the distance to a singularity")
        dd = mpf("0.8") * d_sing
        ratio = ah / dd
        normA = self._normA_bound(cm, dd)
        # input-radius propagation only needs ||A|| near the segment itself
        dd_prop = min(mpf("1.2") * ah, mpf("0.5") * d_sing)
        grow = mpmath.exp(self._normA_bound(cm, dd_prop) * ah) * mpf("1.02")
        vnorm = max(max(max(abs(m.real), abs(m.imag)) * 2 for m in mids) + rad
                    for mids, rad in cols)
        M_disk = vnorm * mpmath.exp(normA * dd) * mpf("1.05") + mpf(2) ** (-mp.prec)
        target = (vnorm + mpf(2) ** (-self.prec)) * mpf(2) ** (-self.prec - 8)
        T = int(mpmath.ceil((mpmath.log(M_disk * self.q / ((1 - ratio) * target), 2))
                            / mpmath.log(1 / ratio, 2))) + 2
        T = max(T, 8)
        series = self._entry_series(cm, T)
        tail = M_disk * (ratio ** T) / (1 - ratio)
        round_eps = mpf(2) ** (8 - mp.prec) * self.q * T
        out = []
        for mids, rad in cols:
            coeffs = self._taylor_column(mids, series, T)
            val = list(coeffs[T - 1])
            E = mpf(0)
            ahp = ah ** (T - 1)
            for t in range(T - 2, -1, -1):
                ct = coeffs[t]
                val = [v * h + ct[i] for i, v in enumerate(val)]
            for t in range(T):
                mx = max(abs(x.real) + abs(x.imag) for x in coeffs[t])
                E += mx * ah ** t
            newrad = rad * grow + E * round_eps + tail
            out.append((val, newrad))
        return out

    def _normA_bound(self, cm: mpc, dd: mpf) -> mpf:
        zmin = abs(cm) - dd
        if zmin <= 0:
            raise PathError("disk touches 0")
        zmax = abs(cm) + dd
        bmu_min = abs(self.bmu_lead)
        for r in self.bmu_roots:
            t = abs(cm - r) - dd
            if t <= 0:
                raise PathError("disk touches a singularity")
            bmu_min *= t
        rows = []
        rows.append(1 / zmin)
        for u in range(1, self.ell1 + 1):
            rows.append(zmax ** (u - 1))
        den = self.bs[self.mu].denominator_lcm()
        last = mpf(0)
        for u in range(self.mu):
            b = self.bs[u] * den
            if b.is_zero():
                continue
            num = sum(abs(_f2m(cc)) * zmax ** i for i, cc in enumerate(b.coeffs))
            last += num / (zmin * bmu_min)
        rows.append(last)
        return max(rows)

    def _entry_series(self, cm: mpc, T: int):
        invz = []
        cinv = 1 / cm
        cur = cinv
        for _ in range(T):
            invz.append(cur)
            cur = -cur * cinv
        zpow = {}
        for u in range(1, self.ell1 + 1):
            coeffs = [mpc(0)] * T
            for j in range(min(u, T)):
                coeffs[j] = mpc(math.comb(u - 1, j)) * cm ** (u - 1 - j)
            zpow[u] = coeffs
        den_series = self._poly_series(Poly.x(1) * self.bmu_int, cm, T)
        inv_den = _series_reciprocal(den_series, T)
        den = self.bs[self.mu].denominator_lcm()
        G = {}
        for u in range(self.mu):
            b = self.bs[u] * den
            if b.is_zero():
                continue
            num = self._poly_series(-b, cm, T)
            G[u] = _series_mul(num, inv_den, T)
        return {"invz": invz, "zpow": zpow, "G": G}

    @staticmethod
    def _poly_series(p: Poly, cm: mpc, T: int) -> list[mpc]:
        out = []
        cur = p
        fact = 1
        for t in range(T):
            if cur.is_zero():
                out.append(mpc(0))
            else:
                v = mpc(0)
                for cc in reversed(cur.coeffs):
                    v = v * cm + _f2m(cc)
                out.append(v / fact)
            cur = cur.derivative()
            fact *= (t + 1)
        return out

    def _taylor_column(self, col: list[mpc], series, T: int) -> list[list[mpc]]:
        q, mu, ell1, S = self.q, self.mu, self.ell1, self.S
        invz, zpow, G = series["invz"], series["zpow"], series["G"]
        Y = [list(col)]
        zero = mpc(0)
        for t in range(T - 1):
            new = [zero] * q
            inv_t1 = mpf(1) / (t + 1)
            Yloc = Y
            for u in range(1, ell1 + 1):
                base = (u - 1) * S
                for s in range(1, S + 1):
                    acc = zero
                    if s >= 2:
                        src = base + (s - 2)
                        for m_ in range(t + 1):
                            acc += invz[m_] * Yloc[t - m_][src]
                    else:
                        src = ell1 * S
                        zp = zpow[u]
                        for m_ in range(min(t + 1, u)):
                            acc += zp[m_] * Yloc[t - m_][src]
                    new[base + (s - 1)] = acc * inv_t1
            for u in range(mu - 1):
                acc = zero
                src = ell1 * S + u + 1
                for m_ in range(t + 1):
                    acc += invz[m_] * Yloc[t - m_][src]
                new[ell1 * S + u] = acc * inv_t1
            acc = zero
            for u, g in G.items():
                src = ell1 * S + u
                for m_ in range(t + 1):
                    acc += g[m_] * Yloc[t - m_][src]
            new[ell1 * S + mu - 1] = acc * inv_t1
            Y.append(new)
        return Y

    # -- path driver ----------------------------------------------------------
    def run(self, path: ContinuationPath, cols: list[list[Ball]]) -> list[list[Ball]]:
        work = []
        for col in cols:
            mids = [b.mid for b in col]
            rad = max(b.rad for b in col)
            work.append((mids, rad))
        for a, b in zip(path.waypoints, path.waypoints[1:]):
            h = gp_to_mpc(b) - gp_to_mpc(a)
            if abs(h) == 0:
                continue
            cm = gp_to_mpc(a)
            nsub = 1
            d = _min_dist(cm, self.sing)
            db = _min_dist(gp_to_mpc(b), self.sing)
            d = min(d, db)
            while abs(h) / nsub > mpf("0.2") * d:
                nsub *= 2
            for j in range(nsub):
                c_cur = (a[0] + (b[0] - a[0]) * Fraction(j, nsub),
                         a[1] + (b[1] - a[1]) * Fraction(j, nsub))
                work = self.step(c_cur, h / nsub, work)
        return [[Ball(m, rad) for m in mids] for mids, rad in work]


def _f2m(c) -> mpc:
    if isinstance(c, Fraction):
        return mpc(mpf(c.numerator) / c.denominator)
    return mpc(c)


def _mulp(x) -> mpf:
    return (abs(x) + mpf(1)) * mpf(2) ** (8 - mp.prec)


def _series_mul(a: list[mpc], b: list[mpc], T: int) -> list[mpc]:
    out = []
    for t in range(T):
        acc = mpc(0)
        for m_ in range(t + 1):
            if m_ < len(a) and t - m_ < len(b):
                acc += a[m_] * b[t - m_]
        out.append(acc)
    return out


def _series_reciprocal(a: list[mpc], T: int) -> list[mpc]:
    inv0 = 1 / a[0]
    out = [inv0]
    for t in range(1, T):
        acc = mpc(0)
        for m_ in range(1, t + 1):
            acc += a[m_] * out[t - m_]
        out.append(-inv0 * acc)
    return out


# ---------------------------------------------------------------------------
# series evaluation near 0 (initial data) and near a singular point

@dataclass
class SeriesEvaluation:
    value: Ball
    heuristic_tail: bool = True


def eval_nilsson_at(series: NilssonSeries, z: Ball, logz: Ball,
                    radius_scale: mpf, safety: int = 64) -> Ball:
    """Evaluate an exact truncated local expansion at z (|z| well inside the
    local disk of radius ``radius_scale``); tail = measured-coefficient
    geometric majorant with a safety factor."""
    total = Ball(0)
    az = z.abs_upper()
    qq = az / (radius_scale * mpf("0.95"))
    if qq >= 1:
        raise PathError("evaluation point too close to the local disk boundary")
    maxterm = mpf(0)
    order = series.order
    logu = max(logz.abs_upper(), mpf(1)) if series.max_log_power() else mpf(1)
    rs = radius_scale * mpf("0.95")
    for (k, i), c in sorted(series.terms.items()):
        cb = c if isinstance(c, Ball) else Ball.exact(c)
        zb = ball_power_frac(z, logz, k)
        term = cb * zb
        for _ in range(i):
            term = term * logz
        total = total + term
        # measured majorant sup |a_{k,i}| rs^k logu^i over the whole truncation
        maxterm = max(maxterm, cb.abs_upper() * rs ** _tofloat(k) * logu ** i)
    tail = maxterm * (qq ** _tofloat(order)) / (1 - qq) * safety
    return total.widened(tail)


def _tofloat(k: Fraction) -> mpf:
    return mpf(k.numerator) / k.denominator


# ---------------------------------------------------------------------------
# high-level drivers

@dataclass
class FamilyValues:
    """Companion coordinate values at a point for each 0-basis solution."""
    companion: CompanionSystem
    point: GP
    columns: list[list[Ball]]      # one column per 0-basis element
    basis0: LocalBasis


def initial_columns(companion: CompanionSystem, basis0: LocalBasis, z_init: GP,
                    prec: int) -> list[list[Ball]]:
    """Evaluate (f_u^[s], theta^u f) at z_init for every basis solution f."""
    prof, S = companion.prof, companion.S
    zb = Ball(gp_to_mpc(z_init))
    logz = zb.log()
    sing = _sing_points_numeric(companion.L, prec)
    rscale = min((abs(p) for p in sing if abs(p) > mpf("1e-30")), default=mpf(1))
    cols = []
    for sol in basis0.solutions:
        f = sol.series
        col = []
        for u in range(1, prof.ell1 + 1):
            for s in range(1, S + 1):
                col.append(eval_nilsson_at(f.fjs(u, s), zb, logz, rscale))
        g = f
        for u in range(prof.mu):
            col.append(eval_nilsson_at(g, zb, logz, rscale))
            if u + 1 < prof.mu:
                g = g.theta()
        cols.append(col)
    return cols


def continue_family(L: DifferentialOperator, prof: OperatorProfile, S: int,
                    z_target: GP, prec: int,
                    basis_order: int = 0,
                    path: ContinuationPath | None = None) -> FamilyValues:
    """Continue all 0-basis companion vectors from near 0 to z_target."""
    with mpmath.workprec(prec + 32):
        comp = build_system(prof, L, S)
        integ = CompanionIntegrator(comp, prec)
        if path is None:
            path = plan_radial_path(z_target, integ.sing)
        if basis_order:
            need = basis_order
        else:
            z0 = gp_to_mpc(path.waypoints[0])
            rmin = min((abs(p) for p in integ.sing if abs(p) > mpf("1e-30")),
                       default=mpf(1))
            qrat = abs(z0) / (rmin * mpf("0.95"))
            bits = -mpmath.log(qrat, 2)
            need = int(mpmath.ceil((prec + 24) / max(mpf("0.5"), bits))) + 24
        basis0 = local_basis(L, 0, truncation_order=need)
        cols = initial_columns(comp, basis0, path.waypoints[0], prec)
        cols = integ.run(path, cols)
        return FamilyValues(companion=comp, point=z_target, columns=cols, basis0=basis0)


def solution_in_basis(basis0: LocalBasis, coeffs: list[Fraction]) -> list[Fraction]:
    """Coordinates of the holomorphic solution with given Taylor coefficients
    in the canonical basis (exact; raises if it is not in the span)."""
    from .linalg import solve_exact
    keys: list = []
    for sol in basis0.solutions:
        keys.extend(sol.series.terms.keys())
    keys = sorted(set(keys))
    usable = [k for k in keys if k[0] < min(len(coeffs), int(basis0.order))]
    M = [[sol.series.terms.get(key, Fraction(0)) for sol in basis0.solutions]
         for key in usable]
    b = []
    for (k, i) in usable:
        if i == 0 and k.denominator == 1 and 0 <= k < len(coeffs):
            b.append(Fraction(coeffs[int(k)]))
        else:
            b.append(Fraction(0))
    res = solve_exact(M, b)
    if not res.consistent:
        raise ValueError("target coefficients are not a solution in the local basis span")
    return res.particular


def combine_columns(vals: FamilyValues, coords: list[Fraction]) -> list[Ball]:
    out = [Ball(0) for _ in range(vals.companion.q)]
    for c, col in zip(coords, vals.columns):
        if c:
            out = [o + v * c for o, v in zip(out, col)]
    return out
