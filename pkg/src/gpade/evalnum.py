"""Certified evaluation facade: linear-form values J_F^(k-1)(z0) from
continued companion vectors (exact coefficients times balls), the quadrature
cross-check, and the numerical variation pipeline.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp, mpf, mpc

from .approximants import ApproximantSet
from .balls import Ball
from .companion import CompanionSystem, DerivedRows, build_system, derived_rows_for
from .continuation import (ContinuationPath, FamilyValues, combine_columns,
                           continue_family, gp, plan_path, solution_in_basis)
from .contours import contour_bounds, jf_decay_bound
from .nilsson import NilssonSeries
from .operators import DifferentialOperator, OperatorProfile
from .polylogs import FunctionProvider, li_value, polylog_connection
from .polynomials import Poly
from .quadrature import jf_quadrature
from .verify import VariationData, variation_data, variation_series


def eval_poly_ball(p: Poly, z: Ball) -> Ball:
    acc = Ball(0)
    for c in reversed(p.coeffs):
        acc = acc * z + Ball.exact(Fraction(c))
    return acc


def jf_eval(rows: DerivedRows, k: int, z0, values: list[Ball]) -> Ball:
    """J_F^(k-1)(z0) = sum_i P_{k,i}(z0) y_i(z0).

    z0 may be an exact Fraction (exact coefficients) or a Ball."""
    comp = rows.companion
    if isinstance(z0, Ball):
        T0 = eval_poly_ball(comp.T_poly, z0)
        acc = Ball(0)
        Tk = T0 ** (k - 1)
        for i in range(comp.q):
            num = eval_poly_ball(rows.numerators[k - 1][i], z0)
            acc = acc + num * values[i]
        return acc / Tk
    acc = Ball(0)
    for i in range(comp.q):
        pv = rows.value(k, i, z0)
        if pv:
            acc = acc + values[i] * pv
    return acc


def jf_eval_checked(approx: ApproximantSet, comp: CompanionSystem, k: int, z0,
                    values: list[Ball], provider: FunctionProvider,
                    quad_nodes: int = 20) -> tuple[Ball, Ball]:
    """Primary dot-product value plus the S-dimensional quadrature
    cross-check; raises if the two disagree beyond combined radii."""
    rows = derived_rows_for(approx, comp, max(k, 1))
    primary = jf_eval(rows, k, z0, values)
    cross = jf_quadrature(approx.n, approx.r, approx.S, k, z0, provider,
                          N=quad_nodes)
    if not primary.overlaps(cross):
        raise ArithmeticError(
            f"quadrature cross-check disjoint from dot product at k={k}: "
            f"{primary!r} vs {cross!r}")
    return primary, cross


def variation_numeric(L: DifferentialOperator, prof: OperatorProfile, S: int,
                      alpha, precision: int = 256,
                      local_order: int = 48) -> VariationData:
    """Loop-continuation variation data at a singularity (cached)."""
    return variation_data(L, prof, S, alpha, precision=precision,
                          local_order=local_order)


def continue_solution(L: DifferentialOperator, prof: OperatorProfile, S: int,
                      F_coeffs, z_target, precision: int,
                      path: ContinuationPath | None = None) -> list[Ball]:
    """Values (F_u^[s], theta^u F)(z_target) for the holomorphic solution F
    given by its Taylor coefficients."""
    vals = continue_family(L, prof, S, z_target, precision, path=path)
    coords = solution_in_basis(vals.basis0,
                               [Fraction(c) for c in F_coeffs[:int(vals.basis0.order)]])
    with mpmath.workprec(precision + 32):
        return combine_columns(vals, coords)
