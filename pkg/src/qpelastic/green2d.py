"""2D quasi-periodic Lame Green's function as a truncated spectral series.

Two formula paths are kept permanently: the ``literal`` path spells out the
three case matrices (L1/L2/L3) with per-class real square roots, the
``unified`` path uses the single branch-root form

    M(alpha_l, d) = (i/4pi) C [[ g Eg + a^2/b Eb ,  s a (Eb - Eg) ],
                               [ s a (Eb - Eg)   ,  b Eb + a^2/g Eg ]]

with ``b = sqrt(k_p^2 - a^2)``, ``g = sqrt(k_s^2 - a^2)`` (Im >= 0 branch),
``Eb = e^{i b |d|}``, ``Eg = e^{i g |d|}``, ``s = sgn(d)`` and
``C = (lam+mu) / (mu (lam+2mu) (k_p^2 - k_s^2))``.  Their equality is kept
as a standing regression against transcription errors in either table.

The full tensor is ``G(x, y) = sum_l e^{i alpha_l (x1-y1)} M(alpha_l, x2-y2)``
and solves ``(Delta* + rho omega^2) G = (1/2pi) * phased delta comb``; see
:func:`qpelastic.green_free.comb_normalization` for the lattice-sum mapping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import roots_laguerre

from .errors import NearSourceLine
from .green_free import GreenEval, _kupradze2d_value
from .medium import (ElasticMedium, ModeData, QuasiMomentum, branch_sqrt,
                     check_wood_window, mode_window)

GAP_MIN = 1e-3
DEFAULT_TOL = 1e-12
_AP_NODES = 48


def _pref(medium: ElasticMedium):
    kp2, ks2 = medium.k_p**2, medium.k_s**2
    c = (medium.lam + medium.mu) / (medium.mu * (medium.lam + 2 * medium.mu) * (kp2 - ks2))
    return 0.25j / np.pi * c


def _unified_blocks(medium, alpha_l, D, s):
    """Mode matrices (..., 2, 2) for array alpha_l (complex allowed)."""
    a = np.asarray(alpha_l, dtype=complex)
    b = branch_sqrt(medium.k_p**2 - a * a)
    g = branch_sqrt(medium.k_s**2 - a * a)
    Eb = np.exp(1j * b * D)
    Eg = np.exp(1j * g * D)
    shape = np.broadcast_shapes(a.shape, np.shape(D), np.shape(s))
    M = np.empty(shape + (2, 2), dtype=complex)
    M[..., 0, 0] = g * Eg + a * a / b * Eb
    M[..., 0, 1] = M[..., 1, 0] = s * a * (Eb - Eg)
    M[..., 1, 1] = b * Eb + a * a / g * Eg
    return _pref(medium) * M


def _unified_blocks_jet(medium, alpha_l, D, s):
    """(value, d/dx1, d/dx2) stacks of mode matrices, each (..., 2, 2)."""
    a = np.asarray(alpha_l, dtype=complex)
    b = branch_sqrt(medium.k_p**2 - a * a)
    g = branch_sqrt(medium.k_s**2 - a * a)
    Eb = np.exp(1j * b * D)
    Eg = np.exp(1j * g * D)
    pref = _pref(medium)
    shape = np.broadcast_shapes(a.shape, np.shape(D), np.shape(s))
    val = np.empty(shape + (2, 2), dtype=complex)
    d2 = np.empty_like(val)
    val[..., 0, 0] = g * Eg + a * a / b * Eb
    val[..., 0, 1] = val[..., 1, 0] = s * a * (Eb - Eg)
    val[..., 1, 1] = b * Eb + a * a / g * Eg
    # d/dx2 = s * d/dD; the sgn factor squares away on the off-diagonal
    d2[..., 0, 0] = s * (1j * g * g * Eg + 1j * a * a * Eb)
    d2[..., 0, 1] = d2[..., 1, 0] = a * (1j * b * Eb - 1j * g * Eg)
    d2[..., 1, 1] = s * (1j * b * b * Eb + 1j * a * a * Eg)
    d1 = (1j * a)[..., None, None] * val
    return pref * val, pref * d1, pref * d2


def _literal_block(medium, mode: ModeData, D, s):
    lam, mu = medium.lam, medium.mu
    kp2, ks2 = medium.k_p**2, medium.k_s**2
    a = mode.alpha_l
    a2 = a * a
    if mode.klass == "L1":
        pref = 0.25j / np.pi * (lam + mu) / (mu * (lam + 2 * mu) * (kp2 - ks2))
        b = np.sqrt(kp2 - a2)
        g = np.sqrt(ks2 - a2)
        eb, eg = np.exp(1j * b * D), np.exp(1j * g * D)
        M = np.array([[g * eg + a2 / b * eb, s * a * (eb - eg)],
                      [s * a * (eb - eg), b * eb + a2 / g * eg]])
    elif mode.klass == "L2":
        pref = 0.25 / np.pi * (lam + mu) / (mu * (lam + 2 * mu) * (ks2 - kp2))
        bp = np.sqrt(a2 - kp2)
        g = np.sqrt(ks2 - a2)
        ebp, eg = np.exp(-bp * D), np.exp(1j * g * D)
        M = np.array([[-a2 / bp * ebp - 1j * g * eg, 1j * a * s * (eg - ebp)],
                      [1j * a * s * (eg - ebp), bp * ebp - 1j * a2 / g * eg]])
    else:
        pref = 0.25 / np.pi * (lam + mu) / (mu * (lam + 2 * mu) * (ks2 - kp2))
        bp = np.sqrt(a2 - kp2)
        bs = np.sqrt(a2 - ks2)
        ebp, ebs = np.exp(-bp * D), np.exp(-bs * D)
        M = np.array([[bs * ebs - a2 / bp * ebp, 1j * a * s * (ebs - ebp)],
                      [1j * a * s * (ebs - ebp), bp * ebp - a2 / bs * ebs]])
    return pref * M


@dataclass(frozen=True)
class ModeTerm2D:
    """One mode's 2x2 block (prefactor included) and which formula produced it."""

    mode: ModeData
    matrix: np.ndarray
    case_used: str


def mode_term_2d(medium: ElasticMedium, mode: ModeData, x2: float, y2: float,
                 form: str = "unified") -> ModeTerm2D:
    """Single-mode block G_i^{alpha_l}(x2, y2), literal or unified form."""
    d = x2 - y2
    D, s = abs(d), np.sign(d)
    if form == "unified":
        mat = _unified_blocks(medium, np.asarray([mode.alpha_l]), D, s)[0]
        case = "unified"
    elif form == "literal":
        mat = _literal_block(medium, mode, D, s)
        case = f"literal_{mode.klass}"
    else:
        raise ValueError(f"form must be 'literal' or 'unified', got {form!r}")
    return ModeTerm2D(mode, mat, case)


def _tail_bound(medium, alpha_first_omitted, D):
    """Rigorous max-norm bound on one side's omitted modes.

    Valid once |alpha| >= sqrt(2) k_s; callers arrange the window to reach
    that regime.  Per-mode bound 5|pref||alpha| e^{-Im(gamma) D} and
    Im(gamma) grows by at least 2 pi per omitted mode.
    """
    a0 = abs(alpha_first_omitted)
    ks2 = np.real(medium.k_s**2)
    img0 = np.sqrt(max(a0 * a0 - ks2, 0.0))
    if D <= 0.0:
        return float("inf")
    q = np.exp(-2 * np.pi * D)
    geo = a0 / (1 - q) + 2 * np.pi * q / (1 - q) ** 2
    return 5.0 * abs(_pref(medium)) * np.exp(-img0 * D) * geo


def _window_arrays(medium, q, D, tol):
    m, al = mode_window(medium, q, gap=max(D, GAP_MIN), tol=tol)
    # extend so the tail-bound regime |alpha| >= sqrt(2) k_s is reached
    ks = float(np.real(medium.k_s))
    extra = 0
    while abs(al[0]) < np.sqrt(2) * ks or abs(al[-1]) < np.sqrt(2) * ks:
        extra += 1
        m = np.arange(m[0] - 1, m[-1] + 2)
        al = q.alpha + 2 * np.pi * m
        if extra > 64:
            break
    return m, al


def green2d_eval_batch(medium: ElasticMedium, q: QuasiMomentum, X, y,
                       tol: float = DEFAULT_TOL, want_jet: bool = False,
                       gap_min: float = GAP_MIN, tol_wood: float | None = None):
    """Vectorized evaluation at points ``X`` (n, 2) for one source ``y``.

    Returns ``(values, tails)`` with values (n, 2, 2), or
    ``(values, d/dx1, d/dx2, tails)`` when ``want_jet``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    t1 = X[:, 0] - y[0]
    d = X[:, 1] - y[1]
    if np.any(np.abs(d) < gap_min):
        raise NearSourceLine(f"|x2-y2| below gap_min={gap_min}")
    Dmin = float(np.min(np.abs(d)))
    m, al = _window_arrays(medium, q, Dmin, tol)
    check_wood_window(medium, q, al, tol_wood)

    phases = np.exp(1j * np.outer(t1, al))  # (n, M)
    tails = np.array([
        _tail_bound(medium, al[-1] + 2 * np.pi, abs(di)) +
        _tail_bound(medium, al[0] - 2 * np.pi, abs(di))
        for di in d
    ])
    if not want_jet:
        out = np.empty((len(t1), 2, 2), dtype=complex)
        for i in range(len(t1)):
            blocks = _unified_blocks(medium, al, abs(d[i]), np.sign(d[i]))
            out[i] = np.tensordot(phases[i], blocks, axes=(0, 0))
        return out, tails

    val = np.empty((len(t1), 2, 2), dtype=complex)
    g1 = np.empty_like(val)
    g2 = np.empty_like(val)
    for i in range(len(t1)):
        v, dx1, dx2 = _unified_blocks_jet(medium, al, abs(d[i]), np.sign(d[i]))
        val[i] = np.tensordot(phases[i], v, axes=(0, 0))
        g1[i] = np.tensordot(phases[i], dx1, axes=(0, 0))
        g2[i] = np.tensordot(phases[i], dx2, axes=(0, 0))
    return val, g1, g2, tails


def green2d_eval(medium: ElasticMedium, q: QuasiMomentum, x, y,
                 tol: float = DEFAULT_TOL, gap_min: float = GAP_MIN,
                 tol_wood: float | None = None) -> GreenEval:
    """Spectral series value of the quasi-periodic tensor at one point pair.

    Requires ``|x2 - y2| >= gap_min`` (NearSourceLine otherwise); the
    reported ``tail_bound`` rigorously bounds the omitted modes in max-norm.
    """
    vals, tails = green2d_eval_batch(medium, q, np.asarray(x)[None, :], y, tol,
                                     gap_min=gap_min, tol_wood=tol_wood)
    Dmin = abs(np.asarray(x, dtype=float)[1] - np.asarray(y, dtype=float)[1])
    m, al = _window_arrays(medium, q, Dmin, tol)
    return GreenEval(2, vals[0], len(al), float(tails[0]))


# ---------------------------------------------------------------------------
# Near-line evaluation via Abel-Plana tail summation.
#
# The plain series needs O(1/d) modes as the transverse gap d -> 0.  For the
# boundary-integral kernels we instead sum the finitely many low modes exactly
# and replace each one-sided evanescent tail by the Abel-Plana identity
#
#   sum_{m>=0} h(m) = h(0)/2 + int_0^inf h(m) dm
#                     + i int_0^inf [h(iy) - h(-iy)] / (e^{2 pi y} - 1) dy,
#
# rotating the first integral onto the ray of steepest decay.  Both integrals
# converge exponentially for any (t1, d) != (0, 0) mod 1.
# ---------------------------------------------------------------------------

_gl_x, _gl_w = roots_laguerre(_AP_NODES)
_leg_x, _leg_w = np.polynomial.legendre.leggauss(12)


def _mode_h(medium, a, D, s, tau, jet: bool):
    """Phased mode matrices; a, D, s, tau broadcast together.

    Returns (..., 2, 2) or a (value, d1, d2) tuple of such stacks.
    """
    ph = np.exp(1j * a * tau)[..., None, None]
    if jet:
        v, d1, d2 = _unified_blocks_jet(medium, a, D, s)
        return v * ph, d1 * ph, d2 * ph
    return _unified_blocks(medium, a, D, s) * ph


def _ray_nodes(rho_min, a_scale):
    """Panelized Gauss-Legendre nodes for int_0^inf f(u) du where f varies on
    scale ``a_scale`` and decays like e^{-2 pi rho u}.

    Geometrically growing panels resolve both the algebraic transition at
    u ~ a_scale (the 1/m tail of the mode sum) and the exponential cutoff.
    """
    u_max = 42.0 / (2 * np.pi * max(rho_min, 1e-9))
    knots = [0.0, a_scale]
    while knots[-1] < u_max:
        knots.append(2.0 * knots[-1])
    nodes, weights = [], []
    for a, b in zip(knots[:-1], knots[1:]):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        nodes.append(mid + half * _leg_x)
        weights.append(half * _leg_w)
    return np.concatenate(nodes), np.concatenate(weights)


def _ap_tail_batch(medium, a0, sigma, D, s, tau, jet):
    """Abel-Plana sum of modes a0 + 2 pi sigma m over m >= 0, batched.

    D, s, tau are (P,) arrays; the mode function is analytic in the mode
    index for |Re a| > k_s, which the caller guarantees via the margin.
    """
    rho0 = np.maximum(np.hypot(tau, D), 1e-14)  # (P,)

    def h(mm):  # mm (P, K) complex
        a = a0 + 2 * np.pi * sigma * mm
        return _mode_h(medium, a, D[:, None], s[:, None], tau[:, None], jet)

    # endpoint h(0)
    zero = np.zeros((len(D), 1))
    end = h(zero)

    # rotated ray: (i sigma tau - D) e^{i theta} = -rho, so the integrand
    # decays like e^{-2 pi rho u} exactly along the ray
    w_c = D - 1j * sigma * tau
    eith = np.conj(w_c) / np.abs(w_c)  # (P,)
    u, uw = _ray_nodes(float(np.min(rho0)), max(abs(a0) / (2 * np.pi), 1.0))
    decay = np.exp(-2 * np.pi * np.outer(rho0, u))  # (P, K) true modulus
    ray_vals = h(eith[:, None] * u[None, :])
    # drop the tiny tail contributions explicitly to avoid overflow surprises
    ray_wts = uw[None, :] * np.ones((len(D), 1))
    mask = decay < 1e-18
    ray_wts = np.where(mask, 0.0, ray_wts)

    # correction integral, conservative decay rate (true rate is 2 pi (1-|tau|))
    rate = 2 * np.pi * np.maximum(0.25, 1.0 - np.abs(tau) - D)  # (P,)
    y = _gl_x[None, :] / rate[:, None]
    num_p = h(1j * y)
    num_m = h(-1j * y)
    ker = (_gl_w[None, :] * np.exp(_gl_x[None, :] - 2 * np.pi * y)
           / (1.0 - np.exp(-2 * np.pi * y)))

    def combine(endpoint, rv, cv):
        ray = np.einsum("pk,pkab->pab", ray_wts, rv)
        corr = np.einsum("pk,pkab->pab", ker, cv)
        return 0.5 * endpoint + eith[:, None, None] * ray \
            + (1j / rate)[:, None, None] * corr

    if jet:
        return tuple(combine(end[j][:, 0], ray_vals[j], num_p[j] - num_m[j])
                     for j in range(3))
    return combine(end[:, 0], ray_vals, num_p - num_m)


def green2d_near_line_batch(medium: ElasticMedium, alpha: float, tau, d,
                            want_jet: bool = False, margin_modes: int = 3):
    """Quasi-periodic tensor at separations (tau, d), valid arbitrarily close
    to (and on) the source-height line, d = 0 included, for
    (tau, d) != (0, 0) mod the lattice.  |tau| <= 1/2 expected.

    Exact low-mode block plus Abel-Plana summation of the two evanescent
    tails; internal workhorse for boundary-integral kernels.
    Returns (P, 2, 2), or a (value, d/dx1, d/dx2) tuple when ``want_jet``.
    """
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    d = np.atleast_1d(np.asarray(d, dtype=float))
    n = len(tau)
    chunk = 4096
    if n > chunk:
        # sort by separation so each chunk shares a ray panel structure
        order = np.argsort(np.hypot(tau, d))
        inv = np.argsort(order)
        parts = [green2d_near_line_batch(medium, alpha, tau[order][i:i + chunk],
                                         d[order][i:i + chunk], want_jet, margin_modes)
                 for i in range(0, n, chunk)]
        if want_jet:
            return tuple(np.concatenate([p[j] for p in parts])[inv] for j in range(3))
        return np.concatenate(parts)[inv]

    D, s = np.abs(d), np.sign(d)
    ks = float(np.real(medium.k_s))
    lo = int(np.floor((-ks - 2 * np.pi * margin_modes - alpha) / (2 * np.pi)))
    hi = int(np.ceil((ks + 2 * np.pi * margin_modes - alpha) / (2 * np.pi)))
    al = (alpha + 2 * np.pi * np.arange(lo, hi + 1)).astype(complex)
    check_wood_window(medium, QuasiMomentum("qp2d", alpha), al.real)

    main = _mode_h(medium, al[None, :], D[:, None], s[:, None], tau[:, None], want_jet)
    hi_tail = _ap_tail_batch(medium, alpha + 2 * np.pi * (hi + 1), +1, D, s, tau, want_jet)
    lo_tail = _ap_tail_batch(medium, alpha + 2 * np.pi * (lo - 1), -1, D, s, tau, want_jet)
    if want_jet:
        return tuple(main[j].sum(axis=1) + hi_tail[j] + lo_tail[j] for j in range(3))
    return main.sum(axis=1) + hi_tail + lo_tail


def green2d_near_line(medium: ElasticMedium, alpha: float, t1: float, d: float,
                      want_jet: bool = False, margin_modes: int = 3):
    """Single-pair convenience wrapper around the batched near-line evaluator."""
    out = green2d_near_line_batch(medium, alpha, [t1], [d], want_jet, margin_modes)
    if want_jet:
        return np.stack([out[j][0] for j in range(3)], axis=0)
    return out[0]


def regularized_at_origin(medium: ElasticMedium, alpha: float) -> np.ndarray:
    """R(0) = lim_{r->0} [G(r) + (1/2pi) Phi(r)], the smooth local remainder.

    The diagonal entries are even in the transverse offset, so R(0) follows
    from an even polynomial fit through small offsets; the off-diagonal
    entries vanish by the sgn symmetry.
    """
    deltas = np.array([0.01, 0.02, 0.03, 0.04])
    vals = []
    for dd in deltas:
        r_p = green2d_near_line(medium, alpha, 0.0, +dd) \
            + _kupradze2d_value(medium, (0.0, +dd)) / (2 * np.pi)
        r_m = green2d_near_line(medium, alpha, 0.0, -dd) \
            + _kupradze2d_value(medium, (0.0, -dd)) / (2 * np.pi)
        vals.append(0.5 * (r_p + r_m))
    vals = np.array(vals)
    x2 = deltas**2
    out = np.zeros((2, 2), dtype=complex)
    for i in (0, 1):
        coeffs = np.polyfit(x2, vals[:, i, i], 3)
        out[i, i] = coeffs[-1]
    return out
