"""End-to-end Siegel certificate at z0 = 1/3.

For F = 1/(1-z) the coordinates F_1^[s](1/3) are exactly Li_s(1/3) and
theta^0 F(1/3) = 3/2, so the certificate bounds the Q-dimension of the span
of {1, Li_1(1/3), ..., Li_S(1/3)}.  tau > 0 certifies that the dimension is
at least 2: at least one of the polylogarithm values is irrational-type
independent of 1.
"""
from fractions import Fraction

from gpade.builtins import geometric_operator
from gpade.certificates import certify

cert = certify(geometric_operator(), [Fraction(1)] * 900, Fraction(1, 3),
               function_name="geometric",
               n_grid=[4, 6, 8, 10, 12, 14], precision=192)

print("theta vector:", ", ".join(cert.theta_labels))
print(f"parameters: r = {cert.r}, S = {cert.S}, n grid = {cert.n_grid}")
print(f"\nper-n table (delta exact, houses certified, forms ball-certified):")
print(f"{'n':>3} {'delta':>28} {'house':>12} {'max |form|':>12}")
import mpmath
for b in cert.batches:
    print(f"{b.n:>3} {b.delta:>28} {mpmath.nstr(b.house_bound, 5):>12} "
          f"{mpmath.nstr(max(b.form_sizes), 5):>12}")
print(f"\nfitted rates: log a0 = {cert.log_a0:.4f}, log b = {cert.log_b:.4f}")
print(f"tau = {cert.tau:.4f}  (worst single n: {cert.tau_worst_single:.4f})")
print(f"dimension bound: real {cert.bound_real:.4f} -> integer >= {cert.bound_integer}")
print("\nflags:")
for k, v in sorted(cert.flags.items()):
    print(f"  {k}: {v}")
