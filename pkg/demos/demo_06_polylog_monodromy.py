"""Monodromy of polylogarithms, measured by rigorous loop continuation.

Continuing Li_s once around z = 1 changes it by -2 i pi log(z)^(s-1)/(s-1)!.
The variation pipeline recovers this numerically (loop continuation of the
companion system + exact local bases); the connection formula provides an
independent oracle for values outside the unit disk.
"""
from fractions import Fraction

import mpmath
from mpmath import mpc, mpf

from gpade.balls import Ball
from gpade.builtins import polylog_operator
from gpade.continuation import eval_nilsson_at, gp
from gpade.evalnum import continue_solution
from gpade.operators import profile
from gpade.polylogs import polylog_connection, var1_li_closed_form
from gpade.verify import variation_data

F = Fraction
with mpmath.workprec(200):
    for s in (2, 3):
        op = polylog_operator(s)
        prof = profile(op)
        vd = variation_data(op, prof, 0, F(1), precision=160, local_order=20)
        idx = next(i for i, b in enumerate(vd.basis0.solutions) if b.exponent == 1)
        base = vd.base_point
        zb = Ball(mpc(mpf(base[0].numerator) / base[0].denominator,
                      mpf(base[1].numerator) / base[1].denominator))
        wb = zb - Ball.exact(F(1))
        logw = wb.log()
        acc = Ball(0)
        for j, c in enumerate(vd.var_coords[idx]):
            acc = acc + eval_nilsson_at(vd.local_vectors[j][0], wb, logw, mpf(1)) * c
        ref = var1_li_closed_form(s, zb.log())
        print(f"var_1 Li_{s} at z = {mpmath.nstr(zb.mid, 8)}:")
        print(f"  measured : {mpmath.nstr(acc.mid, 18)} (+- {mpmath.nstr(acc.rad, 3)})")
        print(f"  closed   : {mpmath.nstr(ref.mid, 18)}")
        print(f"  agree    : {acc.overlaps(ref)}\n")

    # connection oracle vs ODE continuation outside the disk
    s = 3
    op = polylog_operator(s)
    prof = profile(op)
    target = (F(-5, 2), F(3, 2))
    vals = continue_solution(op, prof, 0, [F(0)] + [F(1, k ** s) for k in range(1, 900)],
                             target, 160)
    oracle = polylog_connection(s, Ball(mpc(mpf(-5) / 2, mpf(3) / 2)))
    print(f"Li_3(-5/2 + 3i/2) by ODE continuation: {mpmath.nstr(vals[0].mid, 18)}")
    print(f"                 by connection formula: {mpmath.nstr(oracle.mid, 18)}")
    print(f"                 balls overlap: {vals[0].overlaps(oracle)}")
