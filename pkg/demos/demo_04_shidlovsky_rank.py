"""Shidlovsky machinery: derived rows, generic rank, and row selection.

The remainder derivatives satisfy R(Y)^(k-1) = sum_i P_{k,i} y_i with
P_{k,i} produced by the exact column recursion (d/dz + A^T)^(k-1).  Over
K(z) the matrix (P_{k,i}) has rank exactly q - rho: each polynomial kernel
solution of L kills one dimension (its remainder is identically zero when
r >= 1).  Evaluating at z0 and scanning k greedily yields the invertible
minor feeding Siegel's criterion.
"""
from fractions import Fraction

from gpade.approximants import construct
from gpade.builtins import polylog_operator
from gpade.companion import (build_system, derived_rows_for, generic_rank,
                             kernel_solution_vector, polynomial_relations,
                             select_rows)
from gpade.operators import profile

F = Fraction
op = polylog_operator(2)
prof = profile(op)
S = 2
comp = build_system(prof, op, S)
print(f"companion system: q = ell1*S + mu = {prof.ell1}*{S} + {prof.mu} = {comp.q}")
print(f"polynomial kernel dimension rho = {prof.rho} (constants)")

approx = construct(op, None, n=3, r=1, S=S)
rows = derived_rows_for(approx, comp, comp.q)
print(f"\nrank of (P_k,i) over K(z): {generic_rank(rows)}  (q - rho = {comp.q - prof.rho})")

fp = prof.polynomial_kernel[0]
Y = kernel_solution_vector(fp, comp)
print(f"\nkernel solution f = {fp!r} lifts to polynomial coordinates:")
for tag, y in zip(comp.index, Y):
    print(f"  {tag}: {y!r}")
acc = None
for i in range(comp.q):
    t = rows.numerators[0][i] * Y[i]
    acc = t if acc is None else acc + t
print(f"remainder R(Y) for the kernel solution: {acc!r}  (identically zero)")

z0 = F(1, 3)
rel = polynomial_relations(op, z0, comp, prof.polynomial_kernel)
print(f"\nrelation rows at z0 = {z0}: pivots {rel.pivot_indices}, "
      f"lambda = {rel.lambdas}")
sel = select_rows(rows, z0, prof.rho, reduced_columns=rel.reduced_indices(comp.q))
print(f"selected derivative orders k_j = {sel.indices} "
      f"(cap 4q = {4 * comp.q}); invertible minor of size {sel.rank}")
