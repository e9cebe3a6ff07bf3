"""Radial shooting for the scalar Chern-Simons-Higgs equation and the
SU(3) system.

Each component is propagated as its regular part w_i = v_i - 2 N_i ln r
in log-radius s = ln r, which removes the vortex singularity and
autonomizes the Euler operator: w'' + w'/r becomes d^2 w/ds^2 / r^2.
Running flux integrals m_i(r) = int_0^r RHS_i rho drho ride along as
extra state, so every solved profile carries its total mass to
integrator accuracy (the exact identity m_i(r) = 2 N_i - r v_i'(r)
is preserved step by step).

Two scalar normalizations are supported:

* ``cs1``: Delta v + e^v (1 - e^v),   topological limit v -> 0
* ``f``:   Delta v + 2 e^v (1 - 2 e^v), topological limit v -> ln(1/2)

The SU(3) system uses the ``cs1`` convention (topological limit 0).
Blow-up detection is one-sided: a trajectory is terminated once some
v_i exceeds +50 (the exponentials leave the regime where the equation
is meaningful) and the run is classified ``undetermined``.  The drift
of a non-topological solution to -infinity is logarithmic and is the
behavior we are after, so no lower cutoff is applied.
"""
from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .errors import (BracketError, DomainError, NonConvergenceError,
                     SpreadError, StiffnessError, WindowError)

R_ORIGIN = 1e-6
R_MAX_DEFAULT = 1e4
BLOWUP_V = 50.0
TOPO_TOL = 1e-4
N_GRID = 4096

NORM_CS1 = "cs1"
NORM_F = "f"

TOPOLOGICAL = "topological"
NONTOPOLOGICAL = "nontopological"
MIXED1 = "mixed1"
MIXED2 = "mixed2"
UNDETERMINED = "undetermined"

_LOG_HALF = math.log(0.5)


def _exp(v):
    # one-sided overflow guard; only the doomed (v > 50) regime is clipped
    return math.exp(min(v, 60.0))


def topological_value(normalization):
    return _LOG_HALF if normalization == NORM_F else 0.0


def scalar_nonlinearity(normalization):
    """RHS nonlinearity g(v) with Delta v + g(v) = 4 pi N delta_0."""
    if normalization == NORM_CS1:
        return lambda v: _exp(v) - _exp(2.0 * v)
    if normalization == NORM_F:
        return lambda v: 2.0 * _exp(v) - 4.0 * _exp(2.0 * v)
    raise ValueError(f"unknown normalization {normalization!r}")


def su3_nonlinearities(v1, v2):
    """(G1, G2) with Delta v_i + G_i = 4 pi N_i delta_0 (Cartan coupling)."""
    e1, e2 = _exp(v1), _exp(v2)
    e11, e22, e12 = _exp(2.0 * v1), _exp(2.0 * v2), _exp(v1 + v2)
    g1 = 2.0 * e1 - 4.0 * e11 - e2 + 2.0 * e22 + e12
    g2 = 2.0 * e2 - 4.0 * e22 - e1 + 2.0 * e11 + e12
    return g1, g2


@dataclass
class RadialSolution:
    """A solved radial profile on a log-spaced grid.

    ``w[i]`` holds the regular part v_i - 2 N_i ln r, ``dwds[i]`` its
    s-derivative, ``m[i]`` the running flux integral of the i-th
    nonlinearity.  ``betas`` are filled by :func:`extract_beta`.
    """

    r: np.ndarray
    w: tuple
    dwds: tuple
    m: tuple
    multiplicities: tuple
    normalization: str
    c: tuple
    r_target: float
    complete: bool = True
    classification: str = UNDETERMINED
    betas: tuple | None = None
    beta_spreads: tuple | None = None
    _splines: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.r[0] <= 0.0 or np.any(np.diff(self.r) <= 0.0):
            raise ValueError("grid must be positive and strictly increasing")
        for wi in self.w:
            if not np.all(np.isfinite(wi)):
                raise ValueError("regular parts must be finite on the grid")

    @property
    def n_components(self):
        return len(self.w)

    @property
    def s(self):
        return np.log(self.r)

    def _spline(self, key, values):
        if key not in self._splines:
            self._splines[key] = CubicSpline(self.s, values)
        return self._splines[key]

    def w_at(self, i, r):
        """Regular part w_i at radius r (spline inside the grid,
        linear-in-ln-r continuation outside, which matches the exact
        asymptotics on both ends)."""
        sp = self._spline(("w", i), self.w[i])
        s = np.log(np.asarray(r, dtype=float))
        s0, s1 = self.s[0], self.s[-1]
        inner = np.clip(s, s0, s1)
        out = sp(inner)
        lo = s < s0
        hi = s > s1
        if np.any(lo):
            out = np.where(lo, self.w[i][0], out)
        if np.any(hi):
            out = np.where(hi, self.w[i][-1]
                           + self.dwds[i][-1] * (s - s1), out)
        return out if out.ndim else float(out)

    def v(self, i, r):
        """v_i(r) = 2 N_i ln r + w_i(r)."""
        r = np.asarray(r, dtype=float)
        return 2.0 * self.multiplicities[i] * np.log(r) + self.w_at(i, r)

    def rv_prime(self, i, r):
        """r v_i'(r) = 2 N_i + dw_i/ds, interpolated."""
        sp = self._spline(("dw", i), self.dwds[i])
        s = np.log(np.asarray(r, dtype=float))
        s1 = self.s[-1]
        out = sp(np.clip(s, self.s[0], s1))
        out = np.where(s > s1, self.dwds[i][-1], out)
        return (2.0 * self.multiplicities[i] + out) if out.ndim \
            else 2.0 * self.multiplicities[i] + float(out)

    def mass_at(self, i, r):
        """Running integral int_0^r RHS_i(v) rho drho."""
        sp = self._spline(("m", i), self.m[i])
        s = np.log(np.asarray(r, dtype=float))
        out = sp(np.clip(s, self.s[0], self.s[-1]))
        out = np.where(s > self.s[-1], self.m[i][-1], out)
        return out if out.ndim else float(out)

    def gamma_quad(self, i=0):
        """Flux parameter from the integrated mass: int G_i dx = 4 pi
        (N_i + beta_i) gives gamma = m_end/2 for the scalar equation."""
        return self.m[i][-1] / 2.0

    def gamma_deriv(self, i=0):
        """Flux parameter from the far-field derivative,
        gamma = N - r v'(r)/2 at the end of the grid.  Consistent with
        the profile's own tail to integrator accuracy."""
        n = self.multiplicities[i]
        return n - (2.0 * n + self.dwds[i][-1]) / 2.0

    def tail_intercept(self, i, gamma=None, window=0.1):
        """(I, spread) with v_i(r) = -2(gamma - N_i) ln r + I + o(1),
        fitted over the last ``window`` fraction of the grid."""
        gamma = self.gamma_deriv(i) if gamma is None else gamma
        mask = self.s >= self.s[-1] - window * (self.s[-1] - self.s[0])
        vals = self.w[i][mask] + 2.0 * gamma * self.s[mask]
        return float(np.mean(vals)), float(np.max(vals) - np.min(vals))

    def beta_along(self, i):
        """-r v_i'(r)/2 along the grid (the local decay exponent)."""
        return -(2.0 * self.multiplicities[i] + self.dwds[i]) / 2.0


def _series_start(terms, r0):
    """Start values from the leading Taylor coefficients of the ODE.

    ``terms`` lists (coef, power) with RHS ~ sum coef * r^power near 0;
    the particular solution of w'' + w'/r = A r^p is A r^(p+2)/(p+2)^2.
    """
    w = 0.0
    dwds = 0.0
    mass = 0.0
    for coef, p in terms:
        w -= coef * r0 ** (p + 2) / (p + 2) ** 2
        dwds -= coef * r0 ** (p + 2) / (p + 2)
        mass += coef * r0 ** (p + 2) / (p + 2)
    return w, dwds, mass


def _run_ivp(rhs, y0, s_span, tol, n_grid, blowup):
    s_grid = np.linspace(s_span[0], s_span[1], n_grid)
    blowup.terminal = True
    blowup.direction = 1.0
    sol = solve_ivp(rhs, s_span, y0, method="RK45", rtol=tol,
                    atol=tol, t_eval=s_grid, events=blowup)
    if sol.status == -1:
        if "step size" in sol.message.lower():
            raise StiffnessError(sol.message)
        raise StiffnessError(f"integrator failed: {sol.message}")
    complete = sol.status == 0
    if sol.t.size < 16:
        raise StiffnessError(
            f"blow-up too close to the origin (reached r = "
            f"{math.exp(sol.t[-1]) if sol.t.size else s_span[0]:.3e})")
    return sol.t, sol.y, complete


def integrate_scalar(n, c, normalization=NORM_F, r_max=R_MAX_DEFAULT,
                     tol=1e-10, n_grid=N_GRID, fit_window=None):
    """Shoot the radial scalar equation from w(0) = c, w'(0) = 0.

    Integrates adaptively to ``r_max`` or to numerical blow-up (the
    latter is reported through classification ``undetermined``).
    """
    if n < 0 or int(n) != n:
        raise ValueError("vortex multiplicity must be a nonnegative integer")
    if r_max <= 0.0 or tol <= 0.0:
        raise ValueError("r_max and tol must be positive")
    n = int(n)
    nl = scalar_nonlinearity(normalization)
    k0 = 1.0 if normalization == NORM_CS1 else 2.0

    def rhs(s, y):
        v = 2.0 * n * s + y[0]
        g = nl(v)
        e2s = math.exp(2.0 * s)
        return (y[1], -e2s * g, e2s * g)

    def blowup(s, y):
        return (2.0 * n * s + y[0]) - BLOWUP_V

    w0, dw0, m0 = _series_start([(k0 * math.exp(c), 2 * n)], R_ORIGIN)
    y0 = (c + w0, dw0, m0)
    s_span = (math.log(R_ORIGIN), math.log(r_max))
    t, y, complete = _run_ivp(rhs, y0, s_span, tol, n_grid, blowup)
    sol = RadialSolution(
        r=np.exp(t), w=(y[0],), dwds=(y[1],), m=(y[2],),
        multiplicities=(n,), normalization=normalization, c=(float(c),),
        r_target=r_max, complete=complete)
    classify(sol, fit_window)
    if sol.classification == NONTOPOLOGICAL:
        extract_beta(sol, raise_on_spread=False)
    return sol


def integrate_su3(n1, n2, c1, c2, r_max=R_MAX_DEFAULT, tol=1e-10,
                  n_grid=N_GRID, fit_window=None):
    """Shoot the radial SU(3) system from (w_1, w_2)(0) = (c1, c2)."""
    for n in (n1, n2):
        if n < 0 or int(n) != n:
            raise ValueError("multiplicities must be nonnegative integers")
    if r_max <= 0.0 or tol <= 0.0:
        raise ValueError("r_max and tol must be positive")
    n1, n2 = int(n1), int(n2)

    def rhs(s, y):
        v1 = 2.0 * n1 * s + y[0]
        v2 = 2.0 * n2 * s + y[2]
        g1, g2 = su3_nonlinearities(v1, v2)
        e2s = math.exp(2.0 * s)
        return (y[1], -e2s * g1, y[3], -e2s * g2, e2s * g1, e2s * g2)

    def blowup(s, y):
        return max(2.0 * n1 * s + y[0], 2.0 * n2 * s + y[2]) - BLOWUP_V

    w10, dw10, m10 = _series_start(
        [(2.0 * math.exp(c1), 2 * n1), (-math.exp(c2), 2 * n2)], R_ORIGIN)
    w20, dw20, m20 = _series_start(
        [(2.0 * math.exp(c2), 2 * n2), (-math.exp(c1), 2 * n1)], R_ORIGIN)
    y0 = (c1 + w10, dw10, c2 + w20, dw20, m10, m20)
    s_span = (math.log(R_ORIGIN), math.log(r_max))
    t, y, complete = _run_ivp(rhs, y0, s_span, tol, n_grid, blowup)
    sol = RadialSolution(
        r=np.exp(t), w=(y[0], y[2]), dwds=(y[1], y[3]), m=(y[4], y[5]),
        multiplicities=(n1, n2), normalization=NORM_CS1,
        c=(float(c1), float(c2)), r_target=r_max, complete=complete)
    classify(sol, fit_window)
    if sol.classification == NONTOPOLOGICAL:
        extract_beta(sol, raise_on_spread=False)
    return sol


def _window_mask(sol, window):
    if window is None:
        r_lo, r_hi = 0.5 * sol.r[-1], sol.r[-1]
    elif np.isscalar(window):
        r_lo, r_hi = float(window), sol.r[-1]
    else:
        r_lo, r_hi = window
    mask = (sol.r >= r_lo) & (sol.r <= r_hi)
    if np.count_nonzero(mask) < 10:
        raise WindowError(
            f"fit window [{r_lo:.3g}, {r_hi:.3g}] holds fewer than 10 "
            "grid points")
    return mask


def classify(sol, window=None):
    """Asymptotic trichotomy of a solved profile.

    topological: all components tend to the zero of the nonlinearity
    (0, or ln(1/2) in the f-normalization) with decreasing deviation;
    nontopological: every v_i ~ -2 beta_i ln r with beta_i > 1;
    mixed1/mixed2 (two components): one component tends to ln(1/2),
    the other decays; anything else is undetermined.
    """
    if not sol.complete:
        sol.classification = UNDETERMINED
        return UNDETERMINED
    mask = _window_mask(sol, window)
    ncomp = sol.n_components

    # scalar topological target; for the SU(3) system the constants
    # solve G_i = 0 jointly only at v = 0
    tau = topological_value(sol.normalization)
    last_decade = sol.r >= sol.r[-1] / 10.0

    def tends_to(i, value):
        dev = np.abs(sol.v(i, sol.r[last_decade]) - value)
        return dev[-1] < TOPO_TOL and dev[-1] <= dev[0] + TOPO_TOL

    betas = [float(np.mean(sol.beta_along(i)[mask])) for i in range(ncomp)]
    v_end = [float(sol.v(i, sol.r[-1])) for i in range(ncomp)]

    def decays(i):
        return betas[i] > 1.0 and v_end[i] < tau - 1.0

    if all(tends_to(i, tau if ncomp == 1 else 0.0) for i in range(ncomp)):
        sol.classification = TOPOLOGICAL
    elif all(decays(i) for i in range(ncomp)):
        sol.classification = NONTOPOLOGICAL
    elif ncomp == 2 and tends_to(0, _LOG_HALF) and decays(1):
        sol.classification = MIXED1
    elif ncomp == 2 and tends_to(1, _LOG_HALF) and decays(0):
        sol.classification = MIXED2
    else:
        sol.classification = UNDETERMINED
    return sol.classification


def extract_beta(sol, fit_window=None, raise_on_spread=True):
    """Flux exponents beta_i = -r v_i'(r)/2 averaged over the window.

    The spread (max - min over the window) is reported alongside; a
    spread above 1% of beta signals that r_max is too small.
    """
    if sol.classification != NONTOPOLOGICAL:
        raise DomainError("beta extraction requires a non-topological "
                          f"solution, got {sol.classification!r}")
    mask = _window_mask(sol, fit_window)
    betas, spreads = [], []
    for i in range(sol.n_components):
        vals = sol.beta_along(i)[mask]
        beta = float(np.mean(vals))
        spread = float(np.max(vals) - np.min(vals))
        if beta <= 1.0:
            raise DomainError("extracted beta <= 1 contradicts the "
                              "non-topological classification")
        if raise_on_spread and spread > 0.01 * abs(beta):
            raise SpreadError(
                f"beta_{i+1} spread {spread:.3e} exceeds 1% of "
                f"{beta:.6f}; increase r_max")
        betas.append(beta)
        spreads.append(spread)
    sol.betas = tuple(betas)
    sol.beta_spreads = tuple(spreads)
    return sol.betas


def flux_consistency(sol):
    """Relative gap |gamma_quad - (N + beta_slope)| / gamma_quad for a
    scalar solution (the Eq.-of-flux cross-check)."""
    if sol.n_components != 1 or sol.betas is None:
        raise DomainError("flux consistency check needs a scalar "
                          "non-topological solution with extracted beta")
    gamma_quad = sol.gamma_quad(0)
    gamma_slope = sol.multiplicities[0] + sol.betas[0]
    return abs(gamma_quad - gamma_slope) / abs(gamma_quad)


_EXCEPTIONAL_WARNED = "gamma target sits near the exceptional set"


def shoot_scalar_for_gamma(n, gamma_target, tol=1e-4,
                           normalization=NORM_F, r_max=R_MAX_DEFAULT,
                           scan_range=(-40.0, 5.0), scan_tol=1e-8,
                           final_tol=1e-10):
    """Root-find the shooting constant giving flux gamma_target.

    Monotone bracketing over ``scan_range`` in unit steps, bisection to
    1e-3 in c, then secant refinement on gamma(c) - gamma_target with
    full-precision solves.  The flux is measured by the quadrature
    gamma = (1/4 pi) int f(V) dx carried by the integrator.
    """
    if gamma_target <= 2 * n + 2:
        raise DomainError(
            f"gamma_target must exceed 2N+2 = {2*n+2} "
            "(Spruck-Yang lower bound for radial profiles)")
    for k in range(2, n + 1):
        if abs(gamma_target - 2.0 * n * k / (k - 1.0)) < 1e-2:
            warnings.warn(f"{_EXCEPTIONAL_WARNED} {{2Nk/(k-1)}}; "
                          "conditioning is not guaranteed there",
                          RuntimeWarning)

    scan_rmax = min(r_max, 2e3)

    def gamma_of(c, fast=True):
        sol = integrate_scalar(
            n, c, normalization,
            r_max=scan_rmax if fast else r_max,
            tol=scan_tol if fast else final_tol,
            n_grid=1024 if fast else N_GRID)
        if sol.classification != NONTOPOLOGICAL:
            return None, sol
        return sol.gamma_quad(0), sol

    lo, hi = scan_range
    cs = np.arange(lo, hi + 0.5, 1.0)
    gammas = []
    for c in cs:
        g, _ = gamma_of(float(c))
        gammas.append(g)
    bracket = None
    for (c1, g1), (c2, g2) in zip(zip(cs, gammas), zip(cs[1:], gammas[1:])):
        if g1 is None or g2 is None:
            continue
        if (g1 - gamma_target) * (g2 - gamma_target) <= 0.0:
            bracket = (float(c1), g1, float(c2), g2)
            break
    if bracket is None:
        raise BracketError(
            f"no shooting constant in [{lo}, {hi}] brackets "
            f"gamma = {gamma_target}")

    c_lo, g_lo, c_hi, g_hi = bracket
    while c_hi - c_lo > 1e-3:
        c_mid = 0.5 * (c_lo + c_hi)
        g_mid, _ = gamma_of(c_mid)
        if g_mid is None:
            raise BracketError("bisection landed outside the "
                               "non-topological regime")
        if (g_lo - gamma_target) * (g_mid - gamma_target) <= 0.0:
            c_hi, g_hi = c_mid, g_mid
        else:
            c_lo, g_lo = c_mid, g_mid

    # secant refinement on full-precision solves
    ca, cb = c_lo, c_hi
    ga, sol_a = gamma_of(ca, fast=False)
    gb, sol_b = gamma_of(cb, fast=False)
    best = (ca, ga, sol_a) if abs(ga - gamma_target) < abs(gb - gamma_target) \
        else (cb, gb, sol_b)
    for _ in range(30):
        c_star, g_star, sol_star = best
        if abs(g_star - gamma_target) <= tol:
            return c_star, sol_star
        if gb == ga:
            break
        c_new = cb - (gb - gamma_target) * (cb - ca) / (gb - ga)
        c_new = min(max(c_new, min(ca, cb) - 1.0), max(ca, cb) + 1.0)
        g_new, sol_new = gamma_of(c_new, fast=False)
        if g_new is None:
            break
        ca, ga = cb, gb
        cb, gb, = c_new, g_new
        if abs(g_new - gamma_target) < abs(best[1] - gamma_target):
            best = (c_new, g_new, sol_new)
    c_star, g_star, sol_star = best
    if abs(g_star - gamma_target) <= tol:
        return c_star, sol_star
    raise NonConvergenceError(
        f"secant refinement stalled at gamma = {g_star:.8f} "
        f"(target {gamma_target}, tol {tol})")


@dataclass
class RescaledProfile:
    """u(r) = v(r/eps) - 2 ln eps on the transformed grid."""

    r: np.ndarray
    u: np.ndarray
    du_dr: np.ndarray
    eps: float

    def __call__(self, r):
        sp = CubicSpline(np.log(self.r), self.u)
        return sp(np.log(np.asarray(r, dtype=float)))

    def rescale(self, eps):
        """Apply the two-scale change of variables once more."""
        return RescaledProfile(
            r=self.r * eps, u=self.u - 2.0 * math.log(eps),
            du_dr=self.du_dr / eps, eps=self.eps * eps)


def rescale_component2(sol, eps):
    """Two-scale change of variables u_2(x) = v_2(x/eps) - 2 ln eps."""
    if sol.n_components != 2:
        raise DomainError("rescaling applies to two-component solutions")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    v2 = sol.v(1, sol.r)
    rvp = np.asarray(sol.rv_prime(1, sol.r), dtype=float)
    return RescaledProfile(
        r=sol.r * eps, u=v2 - 2.0 * math.log(eps),
        du_dr=rvp / (sol.r * eps), eps=float(eps))


def solution_to_csv(sol, path):
    """Write columns r, v1, v1p[, v2, v2p]."""
    header = ["r", "v1", "v1p"]
    cols = [sol.r, sol.v(0, sol.r),
            np.asarray(sol.rv_prime(0, sol.r)) / sol.r]
    if sol.n_components == 2:
        header += ["v2", "v2p"]
        cols += [sol.v(1, sol.r),
                 np.asarray(sol.rv_prime(1, sol.r)) / sol.r]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in zip(*cols):
            writer.writerow([f"{x:.16e}" for x in row])


def solution_meta(sol):
    """JSON-ready metadata for a solved profile."""
    meta = {
        "multiplicities": list(sol.multiplicities),
        "shooting_constants": list(sol.c),
        "normalization": sol.normalization,
        "classification": sol.classification,
        "r_max": float(sol.r[-1]),
        "complete": bool(sol.complete),
        "betas": list(sol.betas) if sol.betas else None,
        "beta_spreads": list(sol.beta_spreads) if sol.beta_spreads else None,
        "masses": [float(mi[-1]) for mi in sol.m],
    }
    if sol.n_components == 1:
        meta["gamma_quad"] = sol.gamma_quad(0)
        meta["gamma_deriv"] = sol.gamma_deriv(0)
        if sol.betas is not None:
            meta["flux_consistency"] = flux_consistency(sol)
    return meta


def solution_to_json(sol, path):
    with open(path, "w") as fh:
        json.dump(solution_meta(sol), fh, indent=2, sort_keys=True)
        fh.write("\n")
