"""Closed-form Liouville machinery.

The two-parameter profile family W_{lambda1,a}, its regular part, its
total flux, the linearization kernels Z0, Z1, Z2, and the xi functions
feeding the reduced problem.

All evaluations work in log-radius s = ln|x| and route large powers
through log1p/logaddexp, so the formulas stay finite over the whole
plane.  The complex power x^kappa uses the principal branch with
theta in (-pi, pi]; for kappa not an integer this leaves Z1, Z2 and
xi_{i,j} with a branch discontinuity across the negative real axis
(the integer-kappa regime is the one in which they matter).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .quadrature import QuadratureSpec, integrate_polar, integrate_radial

Z0, Z1, Z2 = 0, 1, 2  # kernel indices


@dataclass(frozen=True)
class LiouvilleParams:
    """Parameters (gamma1, N2, lambda1, a) of the profile family.

    ``kappa = 1 + gamma1/2 + n2`` is the derived exponent; gamma1 > 2
    keeps e^W integrable (kappa > 2).
    """

    gamma1: float
    n2: int = 0
    lambda1: float = 0.0
    a: complex = 0j

    def __post_init__(self):
        if self.gamma1 <= 2.0:
            raise DomainError("gamma1 must exceed 2 for an integrable profile")
        if self.n2 < 0 or int(self.n2) != self.n2:
            raise ValueError("n2 must be a nonnegative integer")
        object.__setattr__(self, "n2", int(self.n2))
        a = self.a
        if isinstance(a, (tuple, list, np.ndarray)):
            a = complex(a[0], a[1])
        object.__setattr__(self, "a", complex(a))

    @property
    def kappa(self):
        return self.n2 + self.gamma1 / 2.0 + 1.0

    @property
    def at_base_point(self):
        return self.lambda1 == 0.0 and self.a == 0j

    def integer_branch(self, tol=1e-9):
        """True when gamma1/2 is a positive integer (projection active)."""
        half = self.gamma1 / 2.0
        return abs(half - round(half)) <= tol


def _split(x):
    """(s, theta) = (ln|x|, arg x) for a 2-vector or complex point."""
    if isinstance(x, complex):
        re, im = x.real, x.imag
    else:
        x = np.asarray(x, dtype=float)
        re, im = float(x[0]), float(x[1])
    r = math.hypot(re, im)
    if r == 0.0:
        return -math.inf, 0.0
    return math.log(r), math.atan2(im, re)


def _log_abs2_xk_plus_a(params, s, theta):
    """ln |x^kappa + a|^2, stable for arbitrarily large |x|."""
    k = params.kappa
    a = params.a
    if a == 0j:
        return 2.0 * k * np.asarray(s, dtype=float)
    m, cross = np.broadcast_arrays(
        np.asarray(k * np.asarray(s, dtype=float)),
        np.asarray(a.real * np.cos(k * np.asarray(theta))
                   + a.imag * np.sin(k * np.asarray(theta))))
    m = m.astype(float)
    amod2 = abs(a) ** 2
    out = np.empty_like(m)
    big = m > 150.0
    small = ~big
    em = np.where(small, np.exp(np.where(small, m, 0.0)), 0.0)
    d = em * em + 2.0 * em * cross + amod2
    with np.errstate(divide="ignore"):
        out[small] = np.log(np.maximum(d, 1e-300))[small]
    if np.any(big):
        en = np.where(big, np.exp(np.where(big, -m, 0.0)), 0.0)
        out[big] = (2.0 * m + np.log1p(2.0 * cross * en + amod2 * en * en))[big]
    return out if out.ndim else float(out)


def w_log_radius(params, s, theta=0.0):
    """W_{lambda1,a} as a function of (ln r, theta); vectorized."""
    k = params.kappa
    log_pref = math.log(4.0 * k * k) + params.lambda1
    log_d = np.logaddexp(0.0, params.lambda1
                         + _log_abs2_xk_plus_a(params, s, theta))
    return log_pref + (2.0 * k - 2.0) * np.asarray(s) - 2.0 * log_d


def exp_w(params, s, theta=0.0):
    """e^W evaluated stably (underflows to 0 far out, never overflows)."""
    return np.exp(w_log_radius(params, s, theta))


def liouville_eval(params, x):
    """W_{lambda1,a}(x).  The origin is a logarithmic singularity."""
    s, theta = _split(x)
    if s == -math.inf:
        raise DomainError("W has a logarithmic singularity at the origin")
    return float(w_log_radius(params, s, theta))


def liouville_regular_part(params, x):
    """Regular part W~_a(x) = W_a(x) - (gamma1 + 2 N2) ln|x|.

    Extends continuously to the origin, where its value is
    ln[4 kappa^2  e^{lambda1} / (1 + e^{lambda1} |a|^2)^2].
    """
    k = params.kappa
    s, theta = _split(x)
    if s == -math.inf:
        log_a2 = 2.0 * math.log(abs(params.a)) if params.a != 0j else -math.inf
        return float(math.log(4.0 * k * k) + params.lambda1
                     - 2.0 * np.logaddexp(0.0, params.lambda1 + log_a2))
    return float(w_log_radius(params, s, theta) - (2.0 * k - 2.0) * s)


def regular_part_log_radius(params, s, theta=0.0):
    """Vectorized W~_a on (ln r, theta) for r > 0."""
    k = params.kappa
    return w_log_radius(params, s, theta) - (2.0 * k - 2.0) * np.asarray(s)


def liouville_flux(params, spec=None):
    """Quadrature of int 2 e^{W_{lambda1,a}} over the plane.

    Equals 8*pi*kappa independently of lambda1 and a.
    """
    spec = spec or QuadratureSpec()
    k = params.kappa
    tail_spec = QuadratureSpec(spec.abs_tol, spec.rel_tol,
                               spec.max_subdivisions,
                               tail_exponent_hint=2.0 * k + 2.0)
    # scale transition where e^{lambda1} r^{2 kappa} ~ 1
    r_knee = math.exp(-params.lambda1 / (2.0 * k))
    pts = [r_knee, 2.0 * r_knee, 0.5 * r_knee]
    if params.a == 0j:
        value, _ = integrate_radial(
            lambda r: 2.0 * float(exp_w(params, math.log(r))),
            tail_spec, points=pts)
        return value
    # |a| > 0 feeds a geometric tail of kappa-harmonics; 256 nodes keep
    # the trapezoid error far below the radial tolerance
    value, _ = integrate_polar(
        lambda r, th: 2.0 * exp_w(params, math.log(r), th),
        tail_spec, n_theta=256, oscillation_order=k, points=pts)
    return value


def kernel_eval(params, k_index, x):
    """Kernel Z_i at the base point lambda1 = 0, a = 0.

    Z0 = (1-|x|^{2k})/(1+|x|^{2k}),  Z1/Z2 = |x|^k cos/sin(k theta)
    over (1+|x|^{2k}), with k = kappa.  Stable tanh/cosh forms.
    """
    if not params.at_base_point:
        raise DomainError("kernels are defined at lambda1 = 0, a = 0")
    s, theta = _split(x)
    return float(kernel_log_radius(params, k_index, s, theta))


def kernel_log_radius(params, k_index, s, theta=0.0):
    """Vectorized kernels on (ln r, theta); s = -inf allowed for Z0."""
    k = params.kappa
    s = np.asarray(s, dtype=float)
    u = k * s
    if k_index == Z0:
        return -np.tanh(u)
    with np.errstate(over="ignore"):
        sech = 1.0 / (2.0 * np.cosh(u))
    ang = np.cos(k * theta) if k_index == Z1 else np.sin(k * theta)
    return ang * sech


def xi_radial_parts(params, x):
    """(xi_r, xi_theta)(|x|): the radial building blocks of xi_{i,j}."""
    s, _ = _split(x)
    return tuple(float(v) for v in xi_parts_log_radius(params, s))


def xi_parts_log_radius(params, s):
    k = params.kappa
    s = np.asarray(s, dtype=float)
    two_ks = 2.0 * k * s
    log1pt = np.logaddexp(0.0, two_ks)      # ln(1 + r^{2k})
    inv = np.exp(-log1pt)                   # 1/(1+t)
    frac = np.exp(two_ks - log1pt)          # t/(1+t)
    xi_r = 0.25 * inv * inv
    xi_t = -0.25 * inv * frac
    return xi_r, xi_t


def xi_eval(params, i, j, x):
    """xi_{i,j}(x) for i, j in {1, 2} at the base point."""
    if not params.at_base_point:
        raise DomainError("xi functions are defined at lambda1 = 0, a = 0")
    if i not in (1, 2) or j not in (1, 2):
        raise ValueError("xi indices must lie in {1, 2}")
    s, theta = _split(x)
    return float(xi_log_radius(params, i, j, s, theta))


def xi_log_radius(params, i, j, s, theta=0.0):
    k = params.kappa
    xi_r, xi_t = xi_parts_log_radius(params, s)
    ang = 2.0 * k * theta
    if i == j:
        sign = 1.0 if i == 1 else -1.0
        return xi_r + sign * xi_t * np.cos(ang)
    return xi_t * np.sin(ang)


def kernel_l2_sq(params):
    """Closed form of int Z_1^2 dx = pi^2 / (2 kappa^2 sin(pi/kappa)).

    Finite because Z1 decays like |x|^{-kappa} with kappa > 1; used as
    an independent anchor for grid quadratures.
    """
    k = params.kappa
    return math.pi ** 2 / (2.0 * k * k * math.sin(math.pi / k))
