"""Forward solver for the 2D rigid-grating Dirichlet problem.

Single-layer representation with the quasi-periodic kernel,

    u_sc(x) = int_Gamma G(x, y) psi(y) ds(y),      u_sc = -u_inc on Gamma,

discretized by Nystrom collocation at N uniform parameter nodes.  The kernel
splits as ``A(t,s) ln(4 sin^2(pi (t-s))) + B(t,s)`` with both factors smooth
and 1-periodic: A carries the logarithmic singularity of the local
free-space copy (windowed away from the seam |t-s| = 1/2), and B is
evaluated through the near-line form of the spectral series, which stays
accurate for arbitrarily small vertical gaps.  The log factor is integrated
with the spectrally accurate product-trapezoid rule for log kernels, the
smooth factor with the plain trapezoid rule.

First-kind formulation by design: spurious interior resonances are detected
through a condition estimate, not cured.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack, lu_factor, lu_solve
from scipy.special import j0, j1

from .errors import ResonanceSuspected, TooCloseToBoundary
from .green2d import green2d_near_line_batch, regularized_at_origin
from .medium import ElasticMedium, QuasiMomentum

EULER_GAMMA = 0.5772156649015328606
COND_LIMIT = 1e12
EVAL_CLEARANCE_FACTOR = 10.0


# ---------------------------------------------------------------------------
# geometry
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ProfileCurve2:
    """Grating profile x2 = f(x1), period 1, as a truncated Fourier series.

    f(t) = height + sum_k cos_coeffs[k-1] cos(2 pi k t) + sin_coeffs[k-1] sin(2 pi k t)
    """

    height: float = 0.0
    cos_coeffs: tuple = ()
    sin_coeffs: tuple = ()

    def _terms(self):
        kmax = max(len(self.cos_coeffs), len(self.sin_coeffs))
        a = np.zeros(kmax)
        b = np.zeros(kmax)
        a[: len(self.cos_coeffs)] = self.cos_coeffs
        b[: len(self.sin_coeffs)] = self.sin_coeffs
        return np.arange(1, kmax + 1), a, b

    def f(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full_like(t, self.height)
        if max(len(self.cos_coeffs), len(self.sin_coeffs)) == 0:
            return out
        k, a, b = self._terms()
        ang = 2 * np.pi * np.multiply.outer(t, k)
        return out + np.cos(ang) @ a + np.sin(ang) @ b

    def df(self, t):
        t = np.asarray(t, dtype=float)
        if max(len(self.cos_coeffs), len(self.sin_coeffs)) == 0:
            return np.zeros_like(t)
        k, a, b = self._terms()
        ang = 2 * np.pi * np.multiply.outer(t, k)
        return -np.sin(ang) @ (2 * np.pi * k * a) + np.cos(ang) @ (2 * np.pi * k * b)

    def ddf(self, t):
        t = np.asarray(t, dtype=float)
        if max(len(self.cos_coeffs), len(self.sin_coeffs)) == 0:
            return np.zeros_like(t)
        k, a, b = self._terms()
        ang = 2 * np.pi * np.multiply.outer(t, k)
        w2 = (2 * np.pi * k) ** 2
        return -np.cos(ang) @ (w2 * a) - np.sin(ang) @ (w2 * b)

    @property
    def max_height(self):
        return self.height + float(np.sum(np.abs(self.cos_coeffs)) + np.sum(np.abs(self.sin_coeffs)))


# ---------------------------------------------------------------------------
# incident fields
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class IncidentField:
    """Plane p/s wave or phased point source.

    ``direction`` is the (unit, downward) propagation direction for plane
    waves; ``source``/``polarization`` describe a point source whose field is
    the quasi-periodic tensor applied to the polarization vector.
    """

    kind: str
    direction: tuple | None = None
    source: tuple | None = None
    polarization: tuple | None = None

    def eval(self, medium: ElasticMedium, q: QuasiMomentum, X):
        return self.jet(medium, q, X)[0]

    def jet(self, medium: ElasticMedium, q: QuasiMomentum, X):
        """(u, du/dx1, du/dx2) at points X (n, 2); each (n, 2) complex."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.kind == "plane_p":
            d = np.asarray(self.direction, dtype=float)
            pol = d
            k = np.real(medium.k_p)
        elif self.kind == "plane_s":
            d = np.asarray(self.direction, dtype=float)
            pol = np.array([-d[1], d[0]])
            k = np.real(medium.k_s)
        elif self.kind == "point_source":
            z = np.asarray(self.source, dtype=float)
            pvec = np.asarray(self.polarization, dtype=complex)
            t1 = X[:, 0] - z[0]
            tau = t1 - np.round(t1)
            nstar = np.round(t1).astype(int)
            phase = np.exp(1j * q.alpha * nstar)
            val, g1, g2 = green2d_near_line_batch(medium, q.alpha, tau, X[:, 1] - z[1],
                                                  want_jet=True)
            u = phase[:, None] * np.einsum("nab,b->na", val, pvec)
            du1 = phase[:, None] * np.einsum("nab,b->na", g1, pvec)
            du2 = phase[:, None] * np.einsum("nab,b->na", g2, pvec)
            return u, du1, du2
        else:
            raise ValueError(f"unknown incident kind {self.kind!r}")
        ph = np.exp(1j * k * (X @ d))
        u = pol[None, :] * ph[:, None]
        return u, 1j * k * d[0] * u, 1j * k * d[1] * u


def plane_incidence(medium: ElasticMedium, kind: str, theta: float):
    """Downward plane wave at incidence angle theta; returns (field, momentum).

    ``theta`` is measured from the downward vertical, so the direction is
    ``(sin theta, -cos theta)`` and the matching quasi-momentum is
    ``k sin(theta)``.
    """
    d = (np.sin(theta), -np.cos(theta))
    k = np.real(medium.k_p) if kind == "plane_p" else np.real(medium.k_s)
    from .medium import make_quasi_momentum

    q = make_quasi_momentum("qp2d", k * d[0], medium)
    return IncidentField(kind, direction=d), q


def point_source_incidence(z, polarization):
    return IncidentField("point_source", source=tuple(z), polarization=tuple(polarization))


# ---------------------------------------------------------------------------
# traction
# ---------------------------------------------------------------------------
def traction(medium: ElasticMedium, u, grad, nu, tau=None):
    """Surface traction 2 mu d_nu u + lam nu (div u) - mu tau (curl u).

    ``grad[..., i, j] = d_j u_i``; ``tau`` defaults to ``nu`` rotated by +90
    degrees, which makes the formula the physical stress vector sigma.nu.
    """
    u = np.asarray(u)
    grad = np.asarray(grad)
    nu = np.asarray(nu, dtype=float)
    if tau is None:
        tau = np.stack([-nu[..., 1], nu[..., 0]], axis=-1)
    else:
        tau = np.asarray(tau, dtype=float)
    div = grad[..., 0, 0] + grad[..., 1, 1]
    curl = grad[..., 1, 0] - grad[..., 0, 1]
    dnu = np.einsum("...ij,...j->...i", grad, nu)
    return 2 * medium.mu * dnu + medium.lam * div[..., None] * nu \
        - medium.mu * curl[..., None] * tau


# ---------------------------------------------------------------------------
# kernel split machinery
# ---------------------------------------------------------------------------
def _chi(tau):
    """C-inf window: 1 for |tau| <= 0.25, 0 for |tau| >= 0.4."""
    u = (np.abs(tau) - 0.25) / 0.15
    out = np.ones_like(u)
    out[u >= 1.0] = 0.0
    mid = (u > 0.0) & (u < 1.0)
    um = u[mid]
    h1 = np.exp(-1.0 / (1.0 - um))
    h0 = np.exp(-1.0 / um)
    out[mid] = h1 / (h1 + h0)
    return out


def _log_coeff(medium: ElasticMedium, dx1, dx2):
    """Log-coefficient matrix a(r) of the free-space tensor, Phi = a ln r + smooth.

    a(r) = -(1/2pi) [ (1/mu) J0(k_s r) I + (1/rho w^2) Hess g(r) ],
    g(r) = J0(k_s r) - J0(k_p r); analytic at r = 0.
    """
    ks, kp = np.real(medium.k_s), np.real(medium.k_p)
    dx1 = np.asarray(dx1, dtype=float)
    dx2 = np.asarray(dx2, dtype=float)
    r = np.hypot(dx1, dx2)
    out = np.empty(r.shape + (2, 2), dtype=float)
    g2_0 = -(ks**2 - kp**2) / 2.0

    small = r < 1e-6
    rs = np.where(small, 1.0, r)
    gp = -ks * j1(ks * rs) + kp * j1(kp * rs)
    gpp = -ks**2 * (j0(ks * rs) - j1(ks * rs) / (ks * rs)) \
        + kp**2 * (j0(kp * rs) - j1(kp * rs) / (kp * rs))
    gp_over_r = np.where(small, g2_0, gp / rs)
    gpp = np.where(small, g2_0, gpp)
    r1 = np.where(small, 1.0, dx1 / rs)
    r2 = np.where(small, 0.0, dx2 / rs)

    j0s = j0(ks * r)
    hxx = gpp * r1 * r1 + gp_over_r * r2 * r2
    hyy = gpp * r2 * r2 + gp_over_r * r1 * r1
    hxy = (gpp - gp_over_r) * r1 * r2
    c = -1.0 / (2 * np.pi)
    rw2 = np.real(medium.rho_omega2)
    out[..., 0, 0] = c * (j0s / medium.mu + hxx / rw2)
    out[..., 1, 1] = c * (j0s / medium.mu + hyy / rw2)
    out[..., 0, 1] = out[..., 1, 0] = c * hxy / rw2
    return out


def _phi_reg_diag(medium: ElasticMedium, that):
    """Finite part of the free-space tensor at coincidence along tangent that.

    Phi(r) - a(r) ln r  ->  (i/4mu) c_s I
        + (i/4 rho w^2) [ (2i/pi) g2 (that that^T + I/2) + 2 e1 I ]
    with c_k = 1 + (2i/pi)(ln(k/2) + gamma_E), g2 = -(k_s^2 - k_p^2)/2 and
    e1 = -(k_s^2 c_s - k_p^2 c_p)/4 + (i/2pi)(k_s^2 - k_p^2).
    """
    ks, kp = np.real(medium.k_s), np.real(medium.k_p)
    c_s = 1 + (2j / np.pi) * (np.log(ks / 2) + EULER_GAMMA)
    c_p = 1 + (2j / np.pi) * (np.log(kp / 2) + EULER_GAMMA)
    g2 = -(ks**2 - kp**2) / 2.0
    e1 = -(ks**2 * c_s - kp**2 * c_p) / 4.0 + (1j / (2 * np.pi)) * (ks**2 - kp**2)
    eye = np.eye(2)
    tt = np.outer(that, that)
    rw2 = np.real(medium.rho_omega2)
    return (0.25j / medium.mu) * c_s * eye \
        + (0.25j / rw2) * ((2j / np.pi) * g2 * (tt + eye / 2.0) + 2.0 * e1 * eye)


def log_quadrature_weights(N: int) -> np.ndarray:
    """Circulant weights w_d with sum_j w_{i-j} e^{2 pi i m t_j} = -e^{2 pi i m t_i}/|m|.

    Product-trapezoid rule for the periodic log kernel ln(4 sin^2(pi(t-s)))
    on N uniform nodes; exact for trigonometric polynomials of degree < N/2.
    """
    sym = np.zeros(N)
    freqs = np.fft.fftfreq(N, d=1.0 / N)
    nz = freqs != 0
    sym[nz] = -1.0 / np.abs(freqs[nz])
    w = np.fft.ifft(sym).real
    return w


def log_quadrature_weights_at(t: float, nodes: np.ndarray) -> np.ndarray:
    """Off-node weights R_j(t) for the same log rule."""
    N = len(nodes)
    n = N // 2
    m = np.arange(1, n)
    diff = t - nodes
    w = -(2.0 / N) * np.cos(2 * np.pi * np.outer(diff, m)) @ (1.0 / m) \
        - (2.0 / N**2) * np.cos(np.pi * N * diff)
    return w


# ---------------------------------------------------------------------------
# solver
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class ScatterSolution:
    """Nystrom solution: density at the nodes plus cached geometry."""

    medium: ElasticMedium
    q: QuasiMomentum
    profile: ProfileCurve2
    incident: IncidentField
    N: int
    nodes: np.ndarray
    points: np.ndarray        # (N, 2) on-curve points
    jacobian: np.ndarray      # (N,)
    normal: np.ndarray        # (N, 2), upward
    density: np.ndarray       # (N, 2) complex
    cond_estimate: float

    @property
    def arc_length(self) -> float:
        return float(np.mean(self.jacobian))


def _geometry(profile: ProfileCurve2, t):
    f = profile.f(t)
    fp = profile.df(t)
    jac = np.sqrt(1.0 + fp * fp)
    pts = np.stack([t, f], axis=-1)
    nu = np.stack([-fp, np.ones_like(fp)], axis=-1) / jac[:, None]
    return pts, jac, nu


def _kernel_split(medium, q, t_rows, pts_rows, t_cols, pts_cols, jac_cols,
                  r00, phi_reg_rows=None):
    """A (log coefficient) and B (smooth remainder) matrices of the kernel.

    Rows are collocation points (may be off-node), columns the quadrature
    nodes.  ``phi_reg_rows`` supplies the tangential finite-part matrices for
    rows that coincide with columns (the on-node case); pass None when the
    row set avoids all columns.
    """
    alpha = q.alpha
    nr, nc = len(t_rows), len(t_cols)
    dt = t_rows[:, None] - t_cols[None, :]
    tau = dt - np.round(dt)
    nstar = np.round(dt).astype(int)
    d = pts_rows[:, 1][:, None] - pts_cols[:, 1][None, :]
    phase = np.exp(1j * alpha * nstar)

    diag_mask = np.zeros((nr, nc), dtype=bool)
    if phi_reg_rows is not None:
        # rows and columns share the node set
        diag_mask[np.arange(nr), np.arange(nc)] = True

    # smooth log-coefficient factor
    a_log = _log_coeff(medium, tau, d)
    chi = _chi(tau)
    A = -(chi * phase)[..., None, None] * a_log * jac_cols[None, :, None, None] / (4 * np.pi)

    # kernel values off the diagonal
    tau_flat = tau[~diag_mask]
    d_flat = d[~diag_mask]
    G = np.zeros((nr, nc, 2, 2), dtype=complex)
    G[~diag_mask] = green2d_near_line_batch(medium, alpha, tau_flat, d_flat)
    K = phase[..., None, None] * G * jac_cols[None, :, None, None]

    lnterm = np.zeros((nr, nc))
    lnterm[~diag_mask] = np.log(4.0 * np.sin(np.pi * dt[~diag_mask]) ** 2)
    B = K - A * lnterm[..., None, None]

    if phi_reg_rows is not None:
        a0 = _log_coeff(medium, np.zeros(nr), np.zeros(nr))
        for i in range(nr):
            ji = jac_cols[i]
            core = -(a0[i] * np.log(ji / (2 * np.pi)) + phi_reg_rows[i]) / (2 * np.pi) + r00
            B[i, i] = ji * core
    return A, B


def _build_system(medium: ElasticMedium, q: QuasiMomentum, profile: ProfileCurve2, N: int):
    if N < 32 or (N & (N - 1)) != 0:
        raise ValueError("N must be a power of two >= 32")
    t = np.arange(N) / N
    pts, jac, nu = _geometry(profile, t)
    fp = profile.df(t)
    that = np.stack([np.ones_like(fp), fp], axis=-1) / jac[:, None]

    r00 = regularized_at_origin(medium, q.alpha)
    phi_reg = np.array([_phi_reg_diag(medium, that[i]) for i in range(N)])
    A, B = _kernel_split(medium, q, t, pts, t, pts, jac, r00, phi_reg_rows=phi_reg)

    w = log_quadrature_weights(N)
    idx = (np.arange(N)[:, None] - np.arange(N)[None, :]) % N
    M = w[idx][..., None, None] * A + B / N
    M2 = M.transpose(0, 2, 1, 3).reshape(2 * N, 2 * N)

    lu, piv = lu_factor(M2)
    anorm = np.linalg.norm(M2, 1)
    rcond = lapack.zgecon(lu, anorm)[0]
    cond = 1.0 / max(rcond, 1e-300)
    if cond > COND_LIMIT:
        raise ResonanceSuspected(cond)
    return dict(t=t, pts=pts, jac=jac, nu=nu, lu=(lu, piv), cond=cond)


def solve_dirichlet(medium: ElasticMedium, q: QuasiMomentum, profile: ProfileCurve2,
                    incident: IncidentField, N: int = 128) -> ScatterSolution:
    """Solve the rigid-boundary problem by first-kind Nystrom collocation.

    ``N`` must be a power of two >= 32.  Raises ResonanceSuspected when the
    estimated condition number of the single-layer system exceeds 1e12.
    """
    return solve_dirichlet_multi(medium, q, profile, [incident], N)[0]


def solve_dirichlet_multi(medium: ElasticMedium, q: QuasiMomentum,
                          profile: ProfileCurve2, incidents, N: int = 128):
    """Solve one grating for several incident fields, factoring the matrix once."""
    for inc in incidents:
        if inc.kind in ("plane_p", "plane_s"):
            k = np.real(medium.k_p) if inc.kind == "plane_p" else np.real(medium.k_s)
            mismatch = (k * inc.direction[0] - q.alpha + np.pi) % (2 * np.pi) - np.pi
            if abs(mismatch) > 1e-10:
                raise ValueError(
                    f"incident wave momentum k*d1={k * inc.direction[0]:.6f} is not "
                    f"congruent to alpha={q.alpha:.6f} modulo 2 pi")
    sysd = _build_system(medium, q, profile, N)
    out = []
    for inc in incidents:
        rhs = -inc.eval(medium, q, sysd["pts"]).reshape(-1)
        psi = lu_solve(sysd["lu"], rhs).reshape(N, 2)
        out.append(ScatterSolution(medium, q, profile, inc, N, sysd["t"], sysd["pts"],
                                   sysd["jac"], sysd["nu"], psi, sysd["cond"]))
    return out


def boundary_residual(sol: ScatterSolution, n_check: int | None = None) -> float:
    """Relative max-norm residual ||S psi + u_inc|| at off-node boundary points."""
    N = sol.N
    if n_check is None:
        n_check = 2 * N
    tc = (np.arange(n_check) + 0.37) / n_check
    pc, jc, _ = _geometry(sol.profile, tc)
    r00 = regularized_at_origin(sol.medium, sol.q.alpha)
    A, B = _kernel_split(sol.medium, sol.q, tc, pc, sol.nodes, sol.points,
                         sol.jacobian, r00)
    Wfull = np.stack([log_quadrature_weights_at(ti, sol.nodes) for ti in tc])
    Mat = Wfull[..., None, None] * A + B / N
    u_sc = np.einsum("cnab,nb->ca", Mat, sol.density)
    u_inc = sol.incident.eval(sol.medium, sol.q, pc)
    ref = float(np.max(np.abs(u_inc)))
    return float(np.max(np.abs(u_sc + u_inc))) / ref


def eval_scattered(sol: ScatterSolution, X, need_gradient: bool = False):
    """Scattered field (and gradient) at points X away from the boundary.

    Trapezoid quadrature of the representation; requires a clearance of
    ``10 * arc_length / N`` from the periodized curve.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    N = sol.N
    clearance = EVAL_CLEARANCE_FACTOR * sol.arc_length / N

    t1 = X[:, 0][:, None] - sol.nodes[None, :]
    tau = t1 - np.round(t1)
    nstar = np.round(t1).astype(int)
    d = X[:, 1][:, None] - sol.points[:, 1][None, :]
    dist = np.sqrt(tau**2 + d**2)
    if np.any(dist.min(axis=1) < clearance):
        raise TooCloseToBoundary(f"need distance >= {clearance:.3e} from the curve")

    phase = np.exp(1j * sol.q.alpha * nstar)
    wj = sol.jacobian / N
    shape = tau.shape
    if need_gradient:
        v, g1, g2 = green2d_near_line_batch(sol.medium, sol.q.alpha,
                                            tau.ravel(), d.ravel(), want_jet=True)
        v = v.reshape(shape + (2, 2))
        g1 = g1.reshape(shape + (2, 2))
        g2 = g2.reshape(shape + (2, 2))
        u = np.einsum("xn,xnab,nb,n->xa", phase, v, sol.density, wj)
        du1 = np.einsum("xn,xnab,nb,n->xa", phase, g1, sol.density, wj)
        du2 = np.einsum("xn,xnab,nb,n->xa", phase, g2, sol.density, wj)
        grad = np.stack([du1, du2], axis=-1)  # grad[..., i, j] = d_j u_i
        return u, grad
    v = green2d_near_line_batch(sol.medium, sol.q.alpha, tau.ravel(), d.ravel())
    v = v.reshape(shape + (2, 2))
    return np.einsum("xn,xnab,nb,n->xa", phase, v, sol.density, wj)
