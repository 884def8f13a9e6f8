"""The weight kernel and its exact partial-fraction table.

The driving series J_F is built from

    W(k) = n!^(S-r) * k(k-1)...(k-rn+1) / ((k+1)...(k+n+1))^S,

whose expansion W(k) = sum_{j,s} c_{j,s,n}/(k+j)^s is computed exactly.  The
coefficients clear against d_n^S = lcm(1..n)^S and obey the classical size
envelope; both facts feed the arithmetic half of the Siegel certificate.
"""
from fractions import Fraction

from gpade.numberfield import lcm_upto
from gpade.partialfractions import jf_series, partial_fractions

n, r, S = 4, 1, 2
table = partial_fractions(n, r, S)

print(f"partial fractions of W for (n, r, S) = ({n}, {r}, {S}):")
for (j, s) in sorted(table.c):
    print(f"  c[j={j}, s={s}] = {table.c[(j, s)]}")

k = Fraction(7, 2)
print(f"\nreconstruction at k = {k}: sum = {table.reconstruct(k)}")
print(f"                      direct W(k) = {table.weight(k)}")
assert table.reconstruct(k) == table.weight(k)

dS = lcm_upto(n) ** S
print(f"\nd_n^S = {dS}; all d_n^S * c integral: {table.denominator_clearing_ok()}")
print(f"size envelope |c| <= (rn+1) 2^S (r^r 2^(S+r+1))^n holds: {table.size_bound_ok()}")

print("\nJ_F for F = 1/(1-z) starts (weight kills k < rn):")
j = jf_series([Fraction(1)] * 30, n, r, S, 16)
for (kk, i) in sorted(j.terms):
    print(f"  z^{kk}: {j.terms[(kk, i)]}")
