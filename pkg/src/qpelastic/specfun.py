"""Bessel/Hankel/modified-Bessel kernels with the conventions the series need.

Backed by scipy.special (AMOS/cephes); the test suite checks every function
against an independent 40-digit mpmath reference on log-spaced grids.
Derivatives are composed from the standard recurrences

    K_nu'(x)  = -K_{nu-1}(x) - (nu/x) K_nu(x)
    H_m^(1)'(x) = H_{m-1}^(1)(x) - (m/x) H_m^(1)(x)

so they inherit the accuracy of the base evaluations.
"""

from __future__ import annotations

import numpy as np
from scipy import special as sp

from .errors import DomainError


def bessel_j(n: int, x):
    """Bessel J_n for integer n >= 0 and real x."""
    if n < 0:
        raise DomainError(f"order must be >= 0, got {n}")
    return sp.jv(n, x)


def hankel1(m: int, x):
    """Hankel function H_m^(1)(x) = J_m(x) + i Y_m(x) for x > 0."""
    if m < 0:
        raise DomainError(f"order must be >= 0, got {m}")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise DomainError("hankel1 requires x > 0 (logarithmic singularity at 0)")
    out = sp.hankel1(m, x)
    return complex(out) if out.ndim == 0 else out


def hankel1_deriv(m: int, x):
    """d/dx H_m^(1)(x) via the recurrence; H_0' = -H_1."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise DomainError("hankel1_deriv requires x > 0")
    if m == 0:
        out = -sp.hankel1(1, x)
    else:
        out = sp.hankel1(m - 1, x) - (m / x) * sp.hankel1(m, x)
    return complex(out) if np.ndim(out) == 0 else out


def mod_k(nu: int, x):
    """Modified Bessel K_nu(x) for integer nu >= 0 and x > 0."""
    if nu < 0:
        raise DomainError(f"order must be >= 0, got {nu}")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise DomainError("mod_k requires x > 0")
    out = sp.kv(nu, x)
    return float(out) if out.ndim == 0 else out


def mod_k_deriv(nu: int, x):
    """d/dx K_nu(x) = -K_{nu-1}(x) - (nu/x) K_nu(x), composed from mod_k."""
    if nu < 1:
        raise DomainError(f"order must be >= 1, got {nu}")
    return -mod_k(nu - 1, x) - (nu / np.asarray(x, dtype=float)) * mod_k(nu, x)


# Unified transverse kernels for the 3D mode tensors.  With the Im >= 0
# branch root m of k^2 - alpha_l^2 these play K_0/K_1 for evanescent modes
# (m = i*g gives u0 = K_0(g r), u1 = K_1(g r)) and carry the outgoing wave
# for propagating ones.

def u0(m, r):
    """(pi i/2) H_0^(1)(m r) for complex m with Im m >= 0."""
    return (0.5j * np.pi) * sp.hankel1(0, np.asarray(m) * r)


def u1(m, r):
    """-(pi/2) H_1^(1)(m r) for complex m with Im m >= 0."""
    return (-0.5 * np.pi) * sp.hankel1(1, np.asarray(m) * r)
