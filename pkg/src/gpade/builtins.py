"""Built-in demo operators and their driving G-functions."""
from __future__ import annotations

from fractions import Fraction

from .operators import DifferentialOperator
from .polynomials import Poly
from .polylogs import provider_for, FunctionProvider


def geometric_operator() -> DifferentialOperator:
    """(1-z) d/dz - 1, annihilating F = 1/(1-z); F_1^[s] = Li_s."""
    return DifferentialOperator([Poly([-1]), Poly([1, -1])])


def polylog_operator(s: int) -> DifferentialOperator:
    """(1-z) theta^(s+1) - theta^s, minimal for Li_s (kernel adds 1, log^j z)."""
    if s < 1:
        raise ValueError("s >= 1")
    theta = [Poly([]) for _ in range(s + 2)]
    theta[s + 1] = Poly([Fraction(1), Fraction(-1)])
    theta[s] = theta[s] + Poly([Fraction(-1)])
    return DifferentialOperator.from_theta_polys(theta)


def builtin(name: str) -> tuple[DifferentialOperator, FunctionProvider]:
    """(operator, value/derivative/coefficient provider) for a built-in name."""
    name = name.strip().lower()
    if name == "geometric":
        return geometric_operator(), provider_for("geometric")
    if name == "polylog":
        name = "li2"
    if name.startswith("li"):
        s = int(name[2:])
        return polylog_operator(s), provider_for(f"li{s}")
    raise KeyError(f"unknown built-in operator {name!r}")


BUILTIN_NAMES = ("geometric", "li2", "li3", "polylog")
