"""The point of the whole construction: the linear forms stay small OUTSIDE
the disk of convergence, where the defining series of J_F diverges.

F = 1/(1-z) has radius 1.  At z0 = 2 e^{i pi/3} (|z0| = 2) the series
sum W(k) z0^(k+n+1) diverges, yet the analytically continued value
J_F(z0) -> 0 at a geometric rate as n grows, within the Cauchy-integral
envelope max(1,|z0|)^{r+1} g(z0)^r / (r+1)^{S-r}.
"""
from fractions import Fraction

import mpmath
from mpmath import mpc, mpf

from gpade.approximants import construct
from gpade.balls import Ball
from gpade.builtins import geometric_operator
from gpade.companion import build_system, derived_rows_for
from gpade.contours import contour_bounds, jf_decay_bound
from gpade.evalnum import continue_solution, jf_eval
from gpade.operators import profile
from gpade.polylogs import provider_for

F = Fraction
op = geometric_operator()
prof = profile(op)
r, S = 1, 4
z0 = (F(1), F(1732050808, 10 ** 9))    # 2 e^{i pi/3}, exact Gaussian rational

print("continuing (F_u^[s], theta^u F) from 0 to z0 = 2 e^{i pi/3} ...")
vals = continue_solution(op, prof, S, [F(1)] * 700, z0, 192)
comp = build_system(prof, op, S)

with mpmath.workprec(240):
    zm = mpc(mpf(z0[0].numerator) / z0[0].denominator,
             mpf(z0[1].numerator) / z0[1].denominator)
    print(f"theta^0 F(z0) = {mpmath.nstr(vals[-1].mid, 20)}  "
          f"(closed form 1/(1-z0) = {mpmath.nstr(1 / (1 - zm), 20)})")
    cd = contour_bounds(provider_for("geometric"), zm, [mpc(1)])
    rhs = jf_decay_bound(zm, cd.g, r, S)
    print(f"contour clearance eps = {mpmath.nstr(cd.epsilon, 6)}, "
          f"g(z0) = {mpmath.nstr(cd.g, 6)}, decay envelope = {mpmath.nstr(rhs, 6)}")
    print(f"\n{'n':>3} {'|J_F(z0)|':>14} {'|J|^(1/n)':>12}")
    zball = Ball(zm)
    for n in range(4, 15, 2):
        approx = construct(op, [F(1)] * 300, n=n, r=r, S=S, prof=prof)
        rows = derived_rows_for(approx, comp, 1)
        J = jf_eval(rows, 1, zball, vals)
        up = J.abs_upper()
        print(f"{n:>3} {mpmath.nstr(up, 6):>14} {mpmath.nstr(up ** (mpf(1) / n), 6):>12}")
