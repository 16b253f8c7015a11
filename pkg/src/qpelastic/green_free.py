"""Free-space Kupradze tensors and phased lattice-sum oracles.

The lattice sums are the slow-but-independent cross-check for every spectral
series in this package: at a complexified frequency ``omega*(1+i*eta)`` both
representations converge absolutely and must agree up to the comb
normalization returned by :func:`comb_normalization`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import hankel1

from .errors import CoincidentPoints
from .medium import ElasticMedium, QuasiMomentum

COINCIDENT_TOL = 1e-12


@dataclass(frozen=True)
class GreenEval:
    """A Green-tensor value with truncation metadata.

    ``tail_bound`` bounds the dropped series tail in max-norm (entrywise
    absolute value); it is 0 for closed-form evaluations and ``inf`` when no
    rigorous bound is available (conditionally convergent lattice sums).
    """

    dim: int
    value: np.ndarray
    modes_used: int
    tail_bound: float


def comb_normalization(kind: str) -> float:
    """Factor c with  spectral_series = c * phased_kupradze_lattice_sum.

    The spectral series solve ``(Delta* + rho omega^2) G = w * comb`` with the
    Fourier weight ``w = 1/(2 pi)`` per periodic direction (``1/(4 pi^2)`` for
    the biperiodic lattice), while the free-space tensor solves the same
    equation with ``-delta``; hence c = -w.
    """
    if kind in ("qp2d", "qp3d"):
        return -1.0 / (2.0 * np.pi)
    if kind == "biqp3d":
        return -1.0 / (4.0 * np.pi**2)
    raise ValueError(f"unknown kind {kind!r}")


def _kupradze2d_value(medium: ElasticMedium, dx):
    """Batched over leading axes; dx has shape (..., 2)."""
    dx = np.asarray(dx, dtype=float)
    ks, kp = medium.k_s, medium.k_p
    r = np.sqrt(np.sum(dx * dx, axis=-1))
    rhat = dx / r[..., None]
    h0 = lambda k: hankel1(0, k * r)
    h1 = lambda k: hankel1(1, k * r)
    f = h0(ks) - h0(kp)
    fp = -ks * h1(ks) + kp * h1(kp)
    fpp = -(ks**2) * h0(ks) + ks * h1(ks) / r + kp**2 * h0(kp) - kp * h1(kp) / r
    eye = np.eye(2)
    rr = rhat[..., :, None] * rhat[..., None, :]
    hess = fpp[..., None, None] * rr + (fp / r)[..., None, None] * (eye - rr)
    return (0.25j / medium.mu) * h0(ks)[..., None, None] * eye \
        + (0.25j / medium.rho_omega2) * hess


def _kupradze3d_value(medium: ElasticMedium, dx):
    """Batched over leading axes; dx has shape (..., 3)."""
    dx = np.asarray(dx, dtype=float)
    ks, kp = medium.k_s, medium.k_p
    r = np.sqrt(np.sum(dx * dx, axis=-1))
    rhat = dx / r[..., None]
    es, ep = np.exp(1j * ks * r), np.exp(1j * kp * r)
    f = (es - ep) / r
    fp = (1j * ks * es - 1j * kp * ep) / r - f / r
    fpp = (-(ks**2) * es + kp**2 * ep) / r - 2.0 * fp / r
    eye = np.eye(3)
    rr = rhat[..., :, None] * rhat[..., None, :]
    hess = fpp[..., None, None] * rr + (fp / r)[..., None, None] * (eye - rr)
    pref = 1.0 / (4.0 * np.pi)
    return pref / medium.mu * (es / r)[..., None, None] * eye \
        + pref / medium.rho_omega2 * hess


def kupradze(medium: ElasticMedium, dim: int, x, y) -> GreenEval:
    """Free-space fundamental tensor, ``(Delta* + rho omega^2) Phi = -delta I``.

    2D: ``(i/4mu) H_0^(1)(k_s r) I + (i/4 rho omega^2) Hess[H_0^(1)(k_s r) - H_0^(1)(k_p r)]``;
    3D: ``(1/4 pi mu) e^{i k_s r}/r I + (1/4 pi rho omega^2) Hess[(e^{i k_s r} - e^{i k_p r})/r]``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dx = x - y
    if np.linalg.norm(dx) < COINCIDENT_TOL:
        raise CoincidentPoints(f"|x-y| = {np.linalg.norm(dx):.3e}")
    if dim == 2:
        val = _kupradze2d_value(medium, dx)
    elif dim == 3:
        val = _kupradze3d_value(medium, dx)
    else:
        raise ValueError("dim must be 2 or 3")
    return GreenEval(dim, val, 0, 0.0)


def lattice_sum(medium: ElasticMedium, q: QuasiMomentum, x, y,
                damping: float = 0.0, N: int = 100) -> GreenEval:
    """Phased sum of free-space copies over the source lattice.

    ``sum_{|n|<=N} e^{i n alpha} e^{-damping n^2} Phi(x, y + n e_1)`` for the
    scalar-lattice kinds; pairs ``n=(n1,n2)`` with phase ``e^{i n.alpha}`` and
    shift ``n1 e_1 + n2 e_2`` for ``biqp3d``.  Index-ordered summation, so
    results are bit-stable.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dim = 2 if q.kind == "qp2d" else 3
    kup = _kupradze2d_value if dim == 2 else _kupradze3d_value

    if q.kind == "biqp3d":
        a1, a2 = q.alpha
        n1, n2 = np.meshgrid(np.arange(-N, N + 1), np.arange(-N, N + 1), indexing="ij")
        n1, n2 = n1.ravel(), n2.ravel()
        shifts = np.zeros((n1.size, 3))
        shifts[:, 0], shifts[:, 1] = n1, n2
        weights = np.exp(1j * (n1 * a1 + n2 * a2) - damping * (n1 * n1 + n2 * n2))
    else:
        n = np.arange(-N, N + 1)
        shifts = np.zeros((n.size, dim))
        shifts[:, 0] = n
        weights = np.exp(1j * n * q.alpha - damping * n * n)

    dx = x - y - shifts
    if np.any(np.sqrt(np.sum(dx * dx, axis=-1)) < COINCIDENT_TOL):
        raise CoincidentPoints("evaluation point on the source lattice")
    vals = kup(medium, dx)
    total = np.tensordot(weights, vals, axes=(0, 0))
    count = len(weights)

    tail = _lattice_tail_bound(medium, q, N, damping)
    return GreenEval(dim, total, count, tail)


def _lattice_tail_bound(medium, q, N, damping):
    """Geometric bound on the omitted copies; inf when undamped at real omega."""
    imkp = float(np.imag(medium.k_p))
    rate = imkp + 0.0
    if damping > 0.0:
        # e^{-damping n^2} <= e^{-damping N n} for n >= N
        rate += damping * N
    if rate <= 0.0:
        return float("inf")
    # |Phi| at distance d >= n - O(1) decays like e^{-Im(k_p) d} with an O(1/sqrt d)
    # prefactor; use a crude unit prefactor times the mode scale.
    scale = 1.0 / (4.0 * abs(medium.mu)) + 1.0 / (4.0 * abs(medium.rho_omega2))
    per_dir = 2 if q.kind == "biqp3d" else 1
    first = np.exp(-rate * (N + 1 - 2))
    geo = first / (1.0 - np.exp(-rate))
    if per_dir == 2:
        geo = geo * (2 * N + 3) * 4
    else:
        geo *= 2
    return float(scale * geo)


def lattice_sum_richardson(medium: ElasticMedium, q: QuasiMomentum, x, y,
                           eps_list=(0.04, 0.02, 0.01), N: int = 600) -> np.ndarray:
    """Richardson-extrapolated Gaussian-damped lattice sum at real frequency.

    Extrapolates the damped sums to ``damping -> 0`` assuming an expansion in
    powers of the damping parameter; only used as a low-accuracy oracle.
    """
    eps = np.asarray(eps_list, dtype=float)
    table = [lattice_sum(medium, q, x, y, damping=e, N=N).value for e in eps]
    n = len(table)
    # Neville elimination in the damping parameter
    for level in range(1, n):
        for i in range(n - level):
            x0, x1 = eps[i], eps[i + level]
            table[i] = (x0 * table[i + 1] - x1 * table[i]) / (x0 - x1)
    return table[0]
