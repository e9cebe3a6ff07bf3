"""Flux-plane geometry.

The quadratic form J, the Pohozaev-admissible region Omega, the
a-priori-bound region S_N with its boundary lines ell_1 and ell_2, the
line flux parameter gamma_1, and the SU(3) mass-identity residuals.

Line membership is exact equality within 1e-12; callers that want
bands (e.g. for plotting near-boundary families) pass an explicit
tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .quadrature import grid_integral
from .shooting import NONTOPOLOGICAL

LINE_TOL = 1e-12


@dataclass(frozen=True)
class FluxPoint:
    """A pair (beta1, beta2) with the vortex data (N1, N2)."""

    beta1: float
    beta2: float
    n1: int = 0
    n2: int = 0

    def __post_init__(self):
        for n in (self.n1, self.n2):
            if n < 0 or int(n) != n:
                raise ValueError("multiplicities must be nonnegative "
                                 "integers")


def J(x, y):
    """J(x, y) = x^2 + x y + y^2."""
    return x * x + x * y + y * y


def in_omega(p):
    """beta_i > 1 and J(beta1-1, beta2-1) > J(N1+1, N2+1)."""
    return (p.beta1 > 1.0 and p.beta2 > 1.0
            and J(p.beta1 - 1.0, p.beta2 - 1.0) > J(p.n1 + 1.0, p.n2 + 1.0))


def in_SN(p):
    """All four strict inequalities of the a-priori-bound region."""
    diff = p.beta2 - p.beta1
    return (p.beta1 > 1.0 and p.beta2 > 1.0
            and -2.0 * p.n1 - p.n2 - 3.0 < diff < p.n1 + 2.0 * p.n2 + 3.0
            and 2.0 * p.beta1 + p.beta2 > p.n1 + 2.0 * p.n2 + 6.0
            and p.beta1 + 2.0 * p.beta2 > 2.0 * p.n1 + p.n2 + 6.0)


def on_ell1(p, tol=LINE_TOL):
    """beta2 - beta1 = N1 + 2 N2 + 3 with beta_i > 1."""
    return (p.beta1 > 1.0 and p.beta2 > 1.0
            and abs(p.beta2 - p.beta1 - (p.n1 + 2.0 * p.n2 + 3.0)) <= tol)


def on_ell2(p, tol=LINE_TOL):
    """2 beta1 + beta2 = N1 + 2 N2 + 6 with beta_i > 1."""
    return (p.beta1 > 1.0 and p.beta2 > 1.0
            and abs(2.0 * p.beta1 + p.beta2
                    - (p.n1 + 2.0 * p.n2 + 6.0)) <= tol)


def gamma1(p):
    """gamma_1 = (2/3)(2 N1 + 2 beta1 + N2 + beta2)."""
    return (2.0 / 3.0) * (2.0 * p.n1 + 2.0 * p.beta1 + p.n2 + p.beta2)


def mass_identities(sol, tail_points=24):
    """Relative residuals of the two SU(3) mass identities.

    int 2 F_1 dx = (8 pi / 3)(2 N1 + 2 beta1 + N2 + beta2) and
    int 2 F_2 dx = (8 pi / 3)(N1 + beta1 + 2 N2 + 2 beta2), with the
    F_i integrated directly on the grid (power-law tail extension using
    the fitted betas) and the betas taken from the slope fit -- two
    independent routes to the same numbers.
    """
    if sol.n_components != 2:
        raise DomainError("mass identities apply to two-component runs")
    if sol.classification != NONTOPOLOGICAL or sol.betas is None:
        raise DomainError("mass identities need a non-topological "
                          "solution with extracted betas")
    v1 = sol.v(0, sol.r)
    v2 = sol.v(1, sol.r)
    e1, e2 = np.exp(v1), np.exp(v2)
    f1 = 2.0 * (e1 - 2.0 * e1 * e1 + e1 * e2)
    f2 = 2.0 * (e2 - 2.0 * e2 * e2 + e1 * e2)
    b1, b2 = sol.betas
    n1, n2 = sol.multiplicities
    lhs1 = grid_integral(sol.r, f1, tail_exponent=2.0 * b1,
                         tail_points=tail_points)
    lhs2 = grid_integral(sol.r, f2, tail_exponent=2.0 * b2,
                         tail_points=tail_points)
    rhs1 = (8.0 * math.pi / 3.0) * (2.0 * n1 + 2.0 * b1 + n2 + b2)
    rhs2 = (8.0 * math.pi / 3.0) * (n1 + b1 + 2.0 * n2 + 2.0 * b2)
    return abs(lhs1 - rhs1) / abs(rhs1), abs(lhs2 - rhs2) / abs(rhs2)
