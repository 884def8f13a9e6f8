"""Differential operators over K[z]: theta form, singularity structure,
indicial exponents, Taylor recurrence, and the derived profile parameters
(mu, Sigma, kappa0, ell, m, ell1, rho).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .numberfield import NumberField, QQ, NFElement
from .polynomials import Poly, RationalFunctionK, poly_gcd, rational_roots, squarefree_decomposition


class NotFuchsianError(ValueError):
    pass


class NotGOperatorError(ValueError):
    pass


class DifferentialOperator:
    """Element of K[z, d/dz], stored in d/dz form with cached theta form.

    The theta form is the polynomial family b_0..b_mu with
    z^t * L = sum_u b_u(z) theta^u (common z-power removed), i.e.
    L = sum_u R_u theta^u with R_u = b_u / z^t.
    """

    def __init__(self, dz_coeffs: Sequence[Poly], fld: NumberField = QQ):
        coeffs = [c if isinstance(c, Poly) else Poly([c]) for c in dz_coeffs]
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        if not coeffs:
            raise ValueError("zero operator")
        self.dz_coeffs = coeffs
        self.field = fld
        self._theta: tuple[list[Poly], int] | None = None

    @property
    def order(self) -> int:
        return len(self.dz_coeffs) - 1

    @property
    def leading(self) -> Poly:
        return self.dz_coeffs[-1]

    # -- theta form ---------------------------------------------------------
    def theta_polys(self) -> tuple[list[Poly], int]:
        """(b_0..b_mu, t) with z^t L = sum b_u theta^u and min valuation 0."""
        if self._theta is None:
            mu = self.order
            acc = [Poly() for _ in range(mu + 1)]
            for i, a in enumerate(self.dz_coeffs):
                if a.is_zero():
                    continue
                # z^mu a_i(z) D^i = a_i z^(mu-i) * theta(theta-1)...(theta-i+1)
                ff = [Fraction(1)]  # falling factorial in theta, little-endian
                for t in range(i):
                    # multiply by (theta - t)
                    new = [Fraction(0)] * (len(ff) + 1)
                    for d, c in enumerate(ff):
                        new[d + 1] += c
                        new[d] -= t * c
                    ff = new
                pref = a * Poly.x(mu - i) if mu - i else a
                for d, c in enumerate(ff):
                    if c:
                        acc[d] = acc[d] + pref * c
            g = min((b.valuation() for b in acc if not b.is_zero()), default=0)
            if g:
                zg = Poly.x(g)
                acc = [b.exact_div(zg) if not b.is_zero() else b for b in acc]
            self._theta = (acc, mu - g)
        return self._theta

    def theta_form(self) -> list[RationalFunctionK]:
        """R_0..R_mu with L = sum R_u(z) theta^u."""
        bs, t = self.theta_polys()
        zt = Poly.x(t) if t > 0 else Poly([Fraction(1)])
        out = []
        for b in bs:
            if t >= 0:
                out.append(RationalFunctionK(b, zt))
            else:
                out.append(RationalFunctionK(b * Poly.x(-t)))
        return out

    @staticmethod
    def from_theta_polys(bs: Sequence[Poly], fld: NumberField = QQ) -> "DifferentialOperator":
        """Operator sum_u b_u(z) theta^u converted to d/dz form."""
        mu = len(bs) - 1
        acc = [Poly() for _ in range(mu + 1)]
        # theta^u = sum_i S2(u,i) z^i D^i
        s2 = [[Fraction(1)]]
        for u in range(1, mu + 1):
            prev = s2[-1]
            row = [Fraction(0)] * (u + 1)
            for i, c in enumerate(prev):
                row[i] += i * c      # theta(z^i D^i) -> i z^i D^i + z^(i+1) D^(i+1)
                row[i + 1] += c
            s2.append(row)
        for u, b in enumerate(bs):
            if b.is_zero():
                continue
            for i, c in enumerate(s2[u]):
                if c:
                    acc[i] = acc[i] + b * Poly.x(i) * c
        val = min((a.valuation() for a in acc if not a.is_zero()), default=0)
        if val:
            zv = Poly.x(val)
            acc = [a.exact_div(zv) if not a.is_zero() else a for a in acc]
        return DifferentialOperator(acc, fld)

    def roundtrip_ok(self) -> bool:
        bs, _t = self.theta_polys()
        back = DifferentialOperator.from_theta_polys(bs, self.field)
        return _proportional(self, back)

    # -- application ---------------------------------------------------------
    def apply_series(self, f):
        """Apply L to a NilssonSeries exactly (through the theta form)."""
        bs, t = self.theta_polys()
        acc = None
        cur = f
        for u, b in enumerate(bs):
            if u > 0:
                cur = cur.theta()
            if b.is_zero():
                continue
            part = cur.mul_poly(b.coeffs)
            acc = part if acc is None else acc + part
        assert acc is not None
        return acc.shift(-t)

    def apply_poly(self, p: Poly) -> Poly:
        out = Poly()
        cur = p
        for i, a in enumerate(self.dz_coeffs):
            if i > 0:
                cur = cur.derivative()
            if not a.is_zero():
                out = out + a * cur
        return out

    def compose_ddz_power(self, n: int) -> "DifferentialOperator":
        """(d/dz)^n composed with self."""
        coeffs = [Poly(c.coeffs) for c in self.dz_coeffs]
        for _ in range(n):
            new = [Poly() for _ in range(len(coeffs) + 1)]
            for i, a in enumerate(coeffs):
                new[i] = new[i] + a.derivative()
                new[i + 1] = new[i + 1] + a
            coeffs = new
        return DifferentialOperator(coeffs, self.field)

    def shifted(self, alpha) -> "DifferentialOperator":
        """Operator in the local coordinate w = z - alpha."""
        return DifferentialOperator([a.shift(alpha) for a in self.dz_coeffs], self.field)

    # -- indicial data ---------------------------------------------------------
    def indicial_poly_at_zero(self) -> Poly:
        bs, _ = self.theta_polys()
        return Poly([b.coeff(0) for b in bs])

    def indicial_poly_at_infinity(self) -> Poly:
        bs, _ = self.theta_polys()
        d = max(b.degree for b in bs if not b.is_zero())
        return Poly([b.coeff(d) * ((-1) ** (u % 2)) for u, b in enumerate(bs)])

    def exponents_at(self, point) -> list[Fraction]:
        """Multiset of (rational) exponents at 0, 'inf', or an algebraic point."""
        if point == "inf":
            ip = self.indicial_poly_at_infinity()
        elif _is_zero_point(point):
            ip = self.indicial_poly_at_zero()
        else:
            ip = self.shifted(point).indicial_poly_at_zero()
        return _rational_root_multiset(ip)

    # -- misc -------------------------------------------------------------------
    def singularities(self) -> list["Singularity"]:
        """Distinct finite singular points (roots of the leading coefficient)."""
        lead = self.leading
        out: list[Singularity] = []
        for fac, mult in squarefree_decomposition(lead):
            roots = rational_roots(fac)
            covered = Poly([Fraction(1)])
            for r in roots:
                out.append(Singularity(value=r, multiplicity=mult, exact=True))
                covered = covered * Poly([-r, Fraction(1)])
            rem = fac.exact_div(covered)
            if rem.degree > 0:
                out.append(Singularity(value=None, multiplicity=mult, exact=False,
                                       minimal_factor=rem))
        out.sort(key=lambda s: (0, repr(s.value)) if s.exact else (1, repr(s.minimal_factor)))
        return out

    def is_regular_singular_at(self, fac: Poly) -> bool:
        """Regularity at every root of the squarefree factor ``fac``."""
        m_lead = _factor_multiplicity(self.leading, fac)
        mu = self.order
        for i, a in enumerate(self.dz_coeffs[:-1]):
            if a.is_zero():
                continue
            need = m_lead - (mu - i)
            if need > 0 and _factor_multiplicity(a, fac) < need:
                return False
        return True

    def validate_fuchsian(self):
        for fac, _m in squarefree_decomposition(self.leading):
            if not self.is_regular_singular_at(fac):
                raise NotFuchsianError(
                    f"irregular singularity at roots of {fac!r}")
        # infinity must be (at worst) regular singular
        dmu = self.leading.degree
        for i, a in enumerate(self.dz_coeffs[:-1]):
            if not a.is_zero() and a.degree > dmu - (self.order - i):
                raise NotFuchsianError("irregular singularity at infinity")

    def hash_key(self) -> str:
        import hashlib
        txt = ";".join(a.format() for a in self.dz_coeffs)
        txt += "|" + ",".join(str(c) for c in self.field.minimal_polynomial)
        return hashlib.sha256(txt.encode()).hexdigest()[:16]

    def __repr__(self):
        return f"DifferentialOperator(order={self.order}, lead={self.leading!r})"


@dataclass
class Singularity:
    value: object                 # Fraction/NFElement when exact, else None
    multiplicity: int
    exact: bool
    minimal_factor: Poly | None = None

    def __repr__(self):
        if self.exact:
            return f"Singularity({self.value}, m={self.multiplicity})"
        return f"Singularity(roots of {self.minimal_factor!r}, m={self.multiplicity})"


@dataclass
class OperatorProfile:
    mu: int
    sigma: list[Singularity]
    exponents_at_zero: list[Fraction]
    exponents_at_infinity: list[Fraction]
    kappa0: Fraction
    ell: int
    m: int
    ell1: int
    rho: int
    polynomial_kernel: list[Poly]
    max_log_power: int            # e: max log power among local solutions at 0
    multiplicities: dict = field(default_factory=dict)

    def describe(self) -> str:
        lines = [
            f"order mu        : {self.mu}",
            f"singularities   : {self.sigma}",
            f"exponents at 0  : {sorted(self.exponents_at_zero)}",
            f"exponents at inf: {sorted(self.exponents_at_infinity)}",
            f"kappa0          : {self.kappa0}",
            f"ell             : {self.ell}",
            f"m (minimal)     : {self.m}",
            f"ell1 = ell+m-1  : {self.ell1}",
            f"rho (poly kernel): {self.rho}",
            f"max log power e : {self.max_log_power}",
        ]
        return "\n".join(lines)


def recurrence_from_operator(L: DifferentialOperator) -> list[tuple[int, Poly]]:
    """Taylor-coefficient recurrence sum_d c_d(j) A_{j-d} = 0.

    Returned as [(d, c_d)] with nonzero polynomials c_d in the index j,
    valid for every j >= max d (coefficients with negative index read as 0).
    """
    bs, _t = L.theta_polys()
    dmax = max((b.degree for b in bs if not b.is_zero()), default=0)
    out = []
    for d in range(dmax + 1):
        c = Poly()
        # c_d(X) = sum_u b_u[d] (X-d)^u
        xmd = Poly([-Fraction(d), Fraction(1)])
        pw = Poly([Fraction(1)])
        for u, b in enumerate(bs):
            if u > 0:
                pw = pw * xmd
            bc = b.coeff(d)
            if bc:
                c = c + pw * bc
        if not c.is_zero():
            out.append((d, c))
    return out


def recurrence_order(L: DifferentialOperator) -> int:
    rec = recurrence_from_operator(L)
    ds = [d for d, _c in rec]
    return max(ds) - min(ds)


def coefficient_stream(L: DifferentialOperator, initial: Sequence, length: int) -> list:
    """Taylor coefficients of the holomorphic solution with given initial
    coefficients, extended via the recurrence (0 must be ordinary or the
    initial segment must determine the rest)."""
    rec = recurrence_from_operator(L)
    dmax = max(d for d, _ in rec)
    c0 = dict(rec).get(0)
    if c0 is None:
        raise ValueError("recurrence does not determine coefficients forward")
    out = list(initial)
    for j in range(len(out), length):
        lead = c0(Fraction(j))
        if not lead:
            raise ValueError(f"indicial obstruction at index {j}; supply more initial terms")
        s = Fraction(0)
        for d, c in rec:
            if d == 0 or j - d < 0:
                continue
            v = out[j - d]
            if v:
                s = s + c(Fraction(j)) * v
        out.append(-s / lead)
    return out


def polynomial_kernel(L: DifferentialOperator) -> list[Poly]:
    """Basis of C[z] (cap) ker L, echelonized by degree (exact)."""
    # candidate degrees: negatives of nonpositive integer exponents at infinity
    cands = [int(-e) for e in L.exponents_at("inf")
             if e.denominator == 1 and e <= 0]
    if not cands:
        return []
    D = max(cands)
    from .linalg import solve_exact
    # unknown coefficients c_0..c_D; equations: all coefficients of L(p) vanish
    cols = []
    max_len = 0
    for t in range(D + 1):
        img = L.apply_poly(Poly.x(t) if t else Poly([Fraction(1)]))
        cols.append(img.coeffs)
        max_len = max(max_len, len(img.coeffs))
    if max_len == 0:
        return [Poly.x(t) if t else Poly([Fraction(1)]) for t in range(D + 1)]
    M = [[cols[t][r] if r < len(cols[t]) else Fraction(0) for t in range(D + 1)]
         for r in range(max_len)]
    res = solve_exact(M, [Fraction(0)] * max_len)
    basis = [Poly(vec) for vec in res.kernel]
    basis.sort(key=lambda p: p.degree)
    return basis


def profile(L: DifferentialOperator, m_override: int | None = None) -> OperatorProfile:
    """All derived parameters; validates Fuchsianity and exponent rationality."""
    L.validate_fuchsian()
    mu = L.order
    sig = [s for s in L.singularities() if not (s.exact and _is_zero_point(s.value))]
    e0 = L.exponents_at(0)
    einf = L.exponents_at("inf")
    kappa0 = min(min(e0), Fraction(0))
    delta = L.leading.degree
    omega = L.leading.valuation()
    ell = delta - omega
    ell_rec = recurrence_order(L)
    if ell != ell_rec:
        raise AssertionError(f"ell mismatch: degree count {ell} vs recurrence order {ell_rec}")
    if sum(s.multiplicity * (s.minimal_factor.degree if not s.exact else 1)
           for s in sig) != ell:
        raise AssertionError("sum of singularity multiplicities != ell")
    polyker = polynomial_kernel(L)
    rho = len(polyker)
    # minimal admissible m: m > -kappa0 and m > fhat - ell for integer
    # exponents fhat at infinity
    lower = Fraction(0)
    lower = max(lower, -kappa0)
    ints = [e for e in einf if e.denominator == 1]
    for e in ints:
        lower = max(lower, e - ell)
    m_min = max(1, int(lower) + 1)
    m = m_override if m_override is not None else m_min
    if m < m_min:
        raise ValueError(f"m={m} inadmissible; need m >= {m_min}")
    from .localbasis import local_basis
    basis = local_basis(L, 0, truncation_order=max(8, 2 * mu + 4))
    e_log = max((s.series.max_log_power() for s in basis.solutions), default=0)
    return OperatorProfile(
        mu=mu, sigma=sig, exponents_at_zero=e0, exponents_at_infinity=einf,
        kappa0=kappa0, ell=ell, m=m, ell1=ell + m - 1, rho=rho,
        polynomial_kernel=polyker, max_log_power=e_log,
        multiplicities={repr(s): s.multiplicity for s in sig})


class ResourceCapError(RuntimeError):
    pass


def normalize_operator(L_F: DifferentialOperator, degree_bound: int | None = None
                       ) -> tuple[DifferentialOperator, int]:
    """L = (d/dz)^N o L_F with N just large enough that any f with
    L f in C[z] admits a polynomial correction into ker L.

    N = 1 + max degree missing from L_F(C[z]) (the polynomial cokernel gaps);
    the search is capped by ``degree_bound``.
    """
    if degree_bound is None:
        nsing = sum((s.minimal_factor.degree if not s.exact else 1)
                    for s in L_F.singularities())
        degree_bound = 4 * (L_F.order + max(a.degree for a in L_F.dz_coeffs) + nsing + 1)
    pivots: dict[int, Poly] = {}
    gaps: list[int] = []
    run = 0
    need_run = L_F.order + max(a.degree for a in L_F.dz_coeffs) + 2
    stable = False
    for d in range(degree_bound + 1):
        img = L_F.apply_poly(Poly.x(d) if d else Poly([Fraction(1)]))
        while not img.is_zero():
            dd = img.degree
            piv = pivots.get(dd)
            if piv is None:
                pivots[dd] = img.monic()
                break
            img = img - piv * img.leading()
        # re-derive gap/run structure
        if pivots:
            mx = max(pivots)
            gaps = [g for g in range(mx + 1) if g not in pivots]
            run = 0
            g = mx
            while g in pivots:
                run += 1
                g -= 1
            if run >= need_run:
                stable = True
                break
    if not stable:
        raise ResourceCapError(
            f"normalize_operator: image degrees not stabilized within bound {degree_bound}")
    N = 1 + max(gaps) if gaps else 0
    return (L_F.compose_ddz_power(N) if N else L_F), N


# ---------------------------------------------------------------------------

def _proportional(A: DifferentialOperator, B: DifferentialOperator) -> bool:
    if A.order != B.order:
        return False
    ratio = None
    for a, b in zip(A.dz_coeffs, B.dz_coeffs):
        if a.is_zero() != b.is_zero():
            return False
        if a.is_zero():
            continue
        r = RationalFunctionK(a, b)
        if ratio is None:
            ratio = r
        elif not (ratio == r):
            return False
    return True


def _is_zero_point(point) -> bool:
    if isinstance(point, str):
        return False
    try:
        return point == 0
    except TypeError:
        return False


def _factor_multiplicity(p: Poly, fac: Poly) -> int:
    m = 0
    while p.coeffs:
        q, r = divmod(p, fac)
        if r.coeffs:
            break
        p = q
        m += 1
    return m


def _rational_root_multiset(ip: Poly) -> list[Fraction]:
    if ip.is_zero():
        raise NotGOperatorError("identically zero indicial polynomial")
    roots = rational_roots(ip)
    out: list[Fraction] = []
    rem = Poly(ip.coeffs)
    for r in roots:
        lin = Poly([-r, Fraction(1)])
        while True:
            q, rr = divmod(rem, lin)
            if rr.coeffs:
                break
            rem = q
            out.append(r)
    if rem.degree > 0:
        raise NotGOperatorError(
            "indicial polynomial has irrational or complex roots; "
            "not a G-operator candidate")
    return sorted(out)
