"""Constructing the simultaneous approximants and checking the Pade problem.

The polynomials {P_{u,s,n}, P~_{u,n}} are found by one exact linear solve:
the combination sum P_{u,s,n} f_u^[s] + sum P~_{u,n} theta^u f must reproduce
sum_j c_{j,s,n} z^(n+1-j) f_j^[s] for every element f of the local solution
basis at 0 simultaneously.  The same polynomials then satisfy all the order
conditions at 0 and the variation conditions at the singularity z = 1.
"""
from fractions import Fraction

from gpade.approximants import construct, jf_of_solution
from gpade.builtins import polylog_operator
from gpade.localbasis import local_basis
from gpade.operators import profile
from gpade.verify import verify_pade

op = polylog_operator(2)          # kernel {1, log z, Li_2}; rho = 1
prof = profile(op)
print(prof.describe())

n, r, S = 3, 1, 2
approx = construct(op, None, n=n, r=r, S=S)
print(f"\nconstructed (n, r, S) = ({n}, {r}, {S}); residual checked to order "
      f"{approx.residual_order}")
for (u, s) in sorted(approx.P):
    print(f"  P[{u},{s}] = {approx.P[(u, s)]}")
for u in sorted(approx.Pt):
    print(f"  P~[{u}]  = {approx.Pt[u]}")

basis = local_basis(op, 0, 42)
names = ["1", "log z", "Li_2"]
print("\norders of the remainders J_f at 0:")
for sol, name in zip(basis.solutions, names):
    jf = jf_of_solution(approx, sol.series)
    v = jf.valuation()
    print(f"  f = {name:<6}: ord_0 J_f = {v if v is not None else 'identically 0'}")

print("\nfull condition report (variation checks ball-certified at z = 1):")
rep = verify_pade(approx, op, prof=prof, precision=192)
for line in rep.lines():
    print(" ", line)
