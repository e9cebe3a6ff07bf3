"""Weighted norms, the projection Q, and application of the linearized
operator, together with the duality and Green-representation checks
used throughout the construction.

Fields live on polar grids (log-uniform radii x uniform angles).  The
X^1 / X^2 distinction (log growth forbidden vs allowed) is realized as
a norm computation plus a tail diagnostic, not a type-level constraint:
discrete fields cannot encode growth classes, but the tail fit detects
and reports them.  No discrete inversion of the linearized operator is
attempted; the module applies operators and verifies identities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline

from . import profiles
from .errors import (DivergentNormError, DomainError, ScaleMismatchError)
from .quadrature import (QuadratureSpec, cumulative_radial, integrate_polar,
                         theta_nodes)

SPACE_X1 = "x1"
SPACE_X2 = "x2"
SPACE_Y = "y"


@dataclass(frozen=True)
class WeightedNormSpec:
    """(alpha, space) selecting the weights and norm recipe.

    alpha must satisfy 0 < alpha < min{2(N2 + (gamma1-2)/2), 1/3}; the
    1/3 cap is universal, the other branch is checked against concrete
    profile parameters via :func:`validate_alpha`.
    """

    alpha: float = 0.2
    space: str = SPACE_Y

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0 / 3.0:
            raise ValueError("alpha must lie in (0, 1/3)")
        if self.space not in (SPACE_X1, SPACE_X2, SPACE_Y):
            raise ValueError(f"unknown space tag {self.space!r}")


def validate_alpha(spec, params):
    bound = min(2.0 * (params.n2 + (params.gamma1 - 2.0) / 2.0), 1.0 / 3.0)
    if not 0.0 < spec.alpha < bound:
        raise ValueError(
            f"alpha = {spec.alpha} outside (0, {bound:.4f}) for "
            f"gamma1 = {params.gamma1}, N2 = {params.n2}")


def weight_rho(spec, i, x):
    """rho_1 = (1+|x|)^-1 (ln(2+|x|))^(-1-alpha/2);
    rho_2 = (1+|x|)^(-1-alpha/2)."""
    r = np.linalg.norm(np.asarray(x, dtype=float), axis=-1) \
        if np.ndim(x) > 1 else float(np.hypot(*np.asarray(x, dtype=float)))
    return weight_rho_radial(spec, i, r)


def weight_rho_radial(spec, i, r):
    r = np.asarray(r, dtype=float)
    a2 = spec.alpha / 2.0
    if i == 1:
        out = (1.0 + r) ** (-1.0) * np.log(2.0 + r) ** (-1.0 - a2)
    elif i == 2:
        out = (1.0 + r) ** (-1.0 - a2)
    else:
        raise ValueError("weight index must be 1 or 2")
    return out if out.ndim else float(out)


def default_grid(r_min=1e-3, r_max=1e3, n_r=481, n_theta=64):
    return np.geomspace(r_min, r_max, n_r), theta_nodes(n_theta)


@dataclass
class FieldOnGrid:
    """Discrete carrier of a planar field on a polar grid.

    ``values[i, j]`` is the field at radius r[i], angle theta[j].
    """

    r: np.ndarray
    theta: np.ndarray
    values: np.ndarray
    laplacian: np.ndarray | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        self.theta = np.asarray(self.theta, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.r.size, self.theta.size):
            raise ValueError("values must have shape (n_r, n_theta)")

    @classmethod
    def from_function(cls, fn, r=None, theta=None, laplacian_fn=None):
        """Sample fn(r, theta) (vectorized over theta) on a polar grid."""
        if r is None or theta is None:
            r_d, t_d = default_grid()
            r = r_d if r is None else np.asarray(r, dtype=float)
            theta = t_d if theta is None else np.asarray(theta, dtype=float)
        vals = np.stack([np.broadcast_to(fn(ri, theta), theta.shape)
                         for ri in r]).astype(float)
        lap = None
        if laplacian_fn is not None:
            lap = np.stack([np.broadcast_to(laplacian_fn(ri, theta),
                                            theta.shape) for ri in r])
        return cls(r=r, theta=theta, values=vals, laplacian=lap)

    @property
    def s(self):
        return np.log(self.r)

    def is_radial(self, tol=1e-10):
        dev = np.max(np.abs(self.values - self.values[:, :1]))
        scale = max(1.0, float(np.max(np.abs(self.values))))
        return dev <= tol * scale

    def radial_profile(self):
        return np.mean(self.values, axis=1)

    def interp_radial(self, r_new, extrapolate=False):
        """Values at new radii on the same angular nodes (cubic in
        log-radius per angle column)."""
        r_new = np.asarray(r_new, dtype=float)
        if not extrapolate:
            if np.any(r_new < self.r[0] * (1 - 1e-12)) \
                    or np.any(r_new > self.r[-1] * (1 + 1e-12)):
                raise ScaleMismatchError(
                    f"radii [{r_new.min():.3e}, {r_new.max():.3e}] fall "
                    f"outside the grid [{self.r[0]:.3e}, {self.r[-1]:.3e}] "
                    "and extrapolation is disabled")
        if "rad_spline" not in self._cache:
            self._cache["rad_spline"] = CubicSpline(self.s, self.values,
                                                    axis=0)
        return self._cache["rad_spline"](np.log(r_new))

    def fd_laplacian(self):
        """Grid Laplacian e^{-2s} (d^2/ds^2 + d^2/dtheta^2).

        Fourth-order centered stencil in (uniform) log-radius, spectral
        second derivative in theta.
        """
        s = self.s
        ds = np.diff(s)
        if not np.allclose(ds, ds[0], rtol=1e-8):
            raise ValueError("grid Laplacian needs log-uniform radii")
        h = float(ds[0])
        v = self.values
        wss = np.empty_like(v)
        # 4th-order interior stencil
        wss[2:-2] = (-v[:-4] + 16.0 * v[1:-3] - 30.0 * v[2:-2]
                     + 16.0 * v[3:-1] - v[4:]) / (12.0 * h * h)
        # 2nd-order near the edges
        for i in (1, -2):
            wss[i] = (v[i - 1] - 2.0 * v[i] + v[i + 1]) / (h * h)
        wss[0] = (v[0] - 2.0 * v[1] + v[2]) / (h * h)
        wss[-1] = (v[-3] - 2.0 * v[-2] + v[-1]) / (h * h)
        n = self.theta.size
        k = np.fft.fftfreq(n, d=1.0 / n)
        vtt = np.real(np.fft.ifft(-(k * k) * np.fft.fft(v, axis=1), axis=1))
        return (wss + vtt) / (self.r ** 2)[:, None]

    def ensure_laplacian(self):
        if self.laplacian is None:
            self.laplacian = self.fd_laplacian()
        return self.laplacian

    def integrate(self, weight=None):
        """int values * weight(r) dx: trapezoid in theta (exact for
        resolved harmonics), Simpson in log-radius."""
        mean_t = np.mean(self.values if weight is None
                         else self.values * weight(self.r)[:, None], axis=1)
        return 2.0 * math.pi * float(simpson(mean_t * self.r ** 2, x=self.s))

    def inner(self, other_values, weight=None):
        """int values * other * weight(r) dx on the shared grid."""
        prod = self.values * other_values
        mean_t = np.mean(prod if weight is None
                         else prod * weight(self.r)[:, None], axis=1)
        return 2.0 * math.pi * float(simpson(mean_t * self.r ** 2, x=self.s))

    def replace_values(self, values):
        return FieldOnGrid(r=self.r, theta=self.theta,
                           values=np.asarray(values, dtype=float))


def tail_exponent(h, window=0.25):
    """Fitted decay exponent p of the angular-RMS profile over the last
    ``window`` fraction of the grid (h ~ r^-p)."""
    rms = np.sqrt(np.mean(h.values ** 2, axis=1))
    s = h.s
    mask = s >= s[-1] - window * (s[-1] - s[0])
    vals = np.clip(rms[mask], 1e-300, None)
    slope = np.polyfit(s[mask], np.log(vals), 1)[0]
    return -float(slope)


def y_norm(h, spec, tail_hint=None):
    """||h||_{Y_alpha} = sqrt(int h^2 (1+|x|)^{2+alpha} dx).

    ``h`` is a FieldOnGrid (grid quadrature plus fitted power tail) or
    a callable h(r, theta) (adaptive polar quadrature; ``tail_hint``
    gives the decay exponent of |h|).  Divergence is detected by
    tail-exponent analysis and raised, not returned.
    """
    alpha = spec.alpha
    if callable(h):
        if tail_hint is not None and 2.0 * tail_hint - (2.0 + alpha) <= 2.0:
            raise DivergentNormError(
                f"integrand decays like r^{-(2 * tail_hint - 2 - alpha):.3f}"
                " * r dr: the Y-norm diverges")
        qspec = QuadratureSpec(
            abs_tol=1e-14, rel_tol=1e-10,
            tail_exponent_hint=(2.0 * tail_hint - 2.0 - alpha)
            if tail_hint is not None else None)
        val, _ = integrate_polar(
            lambda r, th: np.asarray(h(r, th)) ** 2
            * (1.0 + r) ** (2.0 + alpha), qspec, points=[0.5, 1.0, 5.0])
        return math.sqrt(max(val, 0.0))
    p = tail_exponent(h)
    if 2.0 * p - (2.0 + alpha) <= 2.0:
        raise DivergentNormError(
            f"tail exponent p = {p:.3f} gives integrand ~ "
            f"r^{2 + alpha - 2 * p:.3f} r dr: the Y-norm diverges")
    h2 = h.replace_values(h.values ** 2)
    body = h2.integrate(weight=lambda r: (1.0 + r) ** (2.0 + alpha))
    return math.sqrt(max(body, 0.0))


def x_norm(w, spec):
    """||w||_{X^i_alpha} with the tail diagnostic.

    Returns (norm, log_growth_flag): the flag reports an apparently
    logarithmic tail, which is admissible in X^2 but not in X^1.
    """
    if spec.space not in (SPACE_X1, SPACE_X2):
        raise ValueError("x_norm needs an X-space tag")
    i = 1 if spec.space == SPACE_X1 else 2
    alpha = spec.alpha
    lap = w.ensure_laplacian()
    lap2 = w.replace_values(np.asarray(lap) ** 2)
    part1 = lap2.integrate(weight=lambda r: (1.0 + r) ** (2.0 + alpha))
    wr = w.replace_values(
        w.values ** 2 * weight_rho_radial(spec, i, w.r)[:, None] ** 2)
    part2 = wr.integrate()
    # tail diagnostic: compare the far field against c * ln r
    prof = w.radial_profile()
    mask = w.s >= w.s[-1] - 0.2 * (w.s[-1] - w.s[0])
    coef = np.polyfit(w.s[mask], prof[mask], 1)[0]
    log_growth = abs(coef) > 1e-3 * max(1.0, float(np.max(np.abs(prof))))
    return math.sqrt(max(part1 + part2, 0.0)), bool(log_growth)


def kernel_fields(params, grid_like):
    """Z1, Z2 sampled on the grid of ``grid_like``."""
    s = grid_like.s
    th = grid_like.theta
    z1 = np.stack([profiles.kernel_log_radius(params, profiles.Z1, si, th)
                   for si in s])
    z2 = np.stack([profiles.kernel_log_radius(params, profiles.Z2, si, th)
                   for si in s])
    return z1, z2


def project_Q(h, params, spec):
    """Q h = h - c1 Z1 - c2 Z2 with the coefficients chosen so that the
    Z1, Z2 moments of the result vanish (Z1 and Z2 are orthogonal).

    Identity when gamma1/2 is not an integer.  Both moments and the
    normalizations come from the same grid quadrature, so the result's
    moments vanish to round-off and Q is idempotent on the grid.
    """
    if not params.integer_branch():
        return h
    if params.kappa <= 1.0 + spec.alpha / 2.0:
        raise DomainError("projection needs kappa > 1 + alpha/2 for "
                          "int Z_i^2 dx to converge")
    z1, z2 = kernel_fields(params, h)
    n1 = h.inner(z1 * z1)
    n2 = h.inner(z2 * z2)
    c1 = h.inner(z1) / n1
    c2 = h.inner(z2) / n2
    return h.replace_values(h.values - c1 * z1 - c2 * z2)


def projection_coefficients(h, params, spec):
    if not params.integer_branch():
        return 0.0, 0.0
    z1, z2 = kernel_fields(params, h)
    return (h.inner(z1) / h.inner(z1 * z1),
            h.inner(z2) / h.inner(z2 * z2))


def f_prime(v):
    """f'(t) = 2 e^t (1 - 4 e^t) for f(t) = 2 e^t (1 - 2 e^t)."""
    ev = np.exp(np.minimum(v, 50.0))
    return 2.0 * ev - 8.0 * ev * ev


def apply_linearized(w1, w2, eps, params, profile=None, extrapolate=False):
    """Both components of the linearized operator:

    L1 = Delta w1 + f'(V(x)) w1 - eps^2 e^{W_a(eps x)} w2(eps x)
    L2 = Delta w2 + 2 e^{W_0(x)} w2 - f'(V(x/eps)) w1(x/eps) / (2 eps^2)

    ``eps`` = 0 or None drops the cross-scale coupling terms (the
    zeroth-order limit).  Off-grid sampling raises ScaleMismatchError
    unless ``extrapolate`` is set.
    """
    coupling = eps is not None and eps > 0.0
    if profile is None and coupling:
        raise ValueError("coupled application needs the scalar profile V")
    base = LParamsBase(params)

    lap1 = w1.ensure_laplacian()
    out1 = np.array(lap1, dtype=float, copy=True)
    if profile is not None:
        v_vals = _profile_on_grid(profile, w1)
        out1 += f_prime(v_vals) * w1.values
    if coupling:
        ew = np.stack([profiles.exp_w(params, math.log(eps * ri), w1.theta)
                       * np.ones_like(w1.theta) for ri in w1.r])
        w2_scaled = w2.interp_radial(eps * w1.r, extrapolate=extrapolate)
        out1 -= eps * eps * ew * w2_scaled

    lap2 = w2.ensure_laplacian()
    out2 = np.array(lap2, dtype=float, copy=True)
    ew0 = np.stack([profiles.exp_w(base.w0, math.log(ri), w2.theta)
                    * np.ones_like(w2.theta) for ri in w2.r])
    out2 += 2.0 * ew0 * w2.values
    if coupling:
        v_scaled = np.stack([
            np.broadcast_to(profile.value(
                np.stack([ri / eps * np.cos(w2.theta),
                          ri / eps * np.sin(w2.theta)], axis=-1)),
                w2.theta.shape)
            for ri in w2.r])
        w1_scaled = w1.interp_radial(w2.r / eps, extrapolate=extrapolate)
        out2 -= f_prime(v_scaled) * w1_scaled / (2.0 * eps * eps)

    return (w1.replace_values(out1), w2.replace_values(out2))


class LParamsBase:
    """Base-point (lambda1 = 0, a = 0) companion of a parameter set."""

    def __init__(self, params):
        self.w0 = profiles.LiouvilleParams(params.gamma1, params.n2)


def _profile_on_grid(profile, grid):
    return np.stack([
        np.broadcast_to(profile.value(
            np.stack([ri * np.cos(grid.theta),
                      ri * np.sin(grid.theta)], axis=-1)), grid.theta.shape)
        for ri in grid.r])


def green_representation_check(w, n_eval=40):
    """Sup-residual of w(x) = c_w + (1/2 pi) int ln|x-y| Delta w(y) dy
    for a radial field, after fitting the free constant c_w.

    The circle average of ln|x-y| over |y| = rho is ln max(|x|, rho),
    which reduces the right side to one radial integral.
    """
    if not w.is_radial(tol=1e-8):
        raise DomainError("representation check supports radial fields")
    prof = w.radial_profile()
    lap = np.mean(np.asarray(w.ensure_laplacian()), axis=1)
    r = w.r
    # int_0^R ln(max(r_i, rho)) lap(rho) rho drho, split at rho = r_i
    m_in = cumulative_radial(r, lap)               # int_0^r lap rho drho
    lw = cumulative_radial(r, lap * np.log(r))     # int_0^r lap ln rho ...
    rhs = np.log(r) * m_in + (lw[-1] - lw)
    idx = np.linspace(2, r.size - 3, n_eval).astype(int)
    c_w = float(np.median(prof[idx] - rhs[idx]))
    return float(np.max(np.abs(prof[idx] - c_w - rhs[idx])))
