"""Command-line front door: config parsing, batch evaluation, verification.

All outputs are deterministic for a fixed config (fixed summation orders, no
timestamps) and embed the fully-resolved configuration for reproducibility.
Exit codes: 0 success, 1 numerical suite failure, 2 config error, 3 domain
error (Wood anomaly, near-source evaluation, resonance, ...).
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import errors
from .bem2d import (ProfileCurve2, boundary_residual, eval_scattered,
                    plane_incidence, point_source_incidence, solve_dirichlet,
                    traction)
from .errors import ConfigError
from .fdcheck import delta_weight_biqp, delta_weight_qp3d, navier_residual
from .green2d import green2d_eval, green2d_eval_batch
from .green3d_biqp import greenbi_eval, greenbi_eval_batch
from .green3d_qp import green3dqp_eval, green3dqp_eval_batch, ode_residual
from .green_free import comb_normalization, lattice_sum
from .medium import ElasticMedium, make_medium, make_quasi_momentum
from .phaseless import (PhaselessDataset, SourceConfig, cosine_identity,
                        dataset_gap, nonvanishing_probe, synth_phaseless)
from .rayleigh import (RayleighCoeffs2, eval_rayleigh_2d, extract_coeffs_2d,
                       flux_2d)
from .specfun import bessel_j, hankel1, hankel1_deriv, mod_k, mod_k_deriv

_DOMAIN_ERRORS = (errors.WoodAnomaly, errors.NearSourceLine, errors.NearSourcePlane,
                  errors.DomainError, errors.CoincidentPoints,
                  errors.TooCloseToBoundary, errors.ResonanceSuspected,
                  errors.DegenerateModeBasis, errors.AliasedGrid,
                  errors.InvalidMedium, errors.GridMismatch)

GEOMETRIES = ("qp2d", "qp3d", "biqp3d")


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------
def _need(cfg, field, path, types=None):
    if field not in cfg:
        raise ConfigError(f"{path}{field}", "missing")
    val = cfg[field]
    if types is not None and not isinstance(val, types):
        raise ConfigError(f"{path}{field}", f"expected {types}, got {type(val).__name__}")
    return val


def _opt(cfg, field, default):
    return cfg.get(field, default)


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(path, f"cannot read: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(path, f"invalid JSON: {exc}")
    if not isinstance(cfg, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    return cfg


def resolve_config(cfg: dict, geometry_override: str | None = None) -> dict:
    """Validate and fill defaults; returns the fully-resolved config dict."""
    out = {}
    med = _need(cfg, "medium", "", dict)
    for f in ("lambda", "mu", "omega"):
        _need(med, f, "medium.", (int, float))
    out["medium"] = {
        "lambda": float(med["lambda"]),
        "mu": float(med["mu"]),
        "rho": float(_opt(med, "rho", 1.0)),
        "omega": float(med["omega"]),
    }
    try:
        make_medium(out["medium"]["lambda"], out["medium"]["mu"],
                    out["medium"]["rho"], out["medium"]["omega"])
    except errors.InvalidMedium as exc:
        raise ConfigError("medium", str(exc))

    geometry = geometry_override or _opt(cfg, "geometry", "qp2d")
    if geometry not in GEOMETRIES:
        raise ConfigError("geometry", f"must be one of {GEOMETRIES}")
    out["geometry"] = geometry

    qm = _opt(cfg, "quasi_momentum", {"alpha": 0.0})
    alpha = _need(qm, "alpha", "quasi_momentum.", (int, float, list))
    if geometry == "biqp3d":
        if not (isinstance(alpha, list) and len(alpha) == 2):
            raise ConfigError("quasi_momentum.alpha", "biqp3d needs a pair [a1, a2]")
        out["quasi_momentum"] = {"alpha": [float(alpha[0]), float(alpha[1])]}
    else:
        if isinstance(alpha, list):
            raise ConfigError("quasi_momentum.alpha", f"{geometry} needs a scalar")
        out["quasi_momentum"] = {"alpha": float(alpha)}

    trunc = _opt(cfg, "truncation", {})
    out["truncation"] = {
        "tol": float(_opt(trunc, "tol", 1e-10)),
        "gap_min": trunc.get("gap_min"),
        "tol_wood": trunc.get("tol_wood"),
    }

    prof = _opt(cfg, "profile", {})
    out["profile"] = {
        "height": float(_opt(prof, "height", 0.0)),
        "cos": [float(v) for v in _opt(prof, "cos", [])],
        "sin": [float(v) for v in _opt(prof, "sin", [])],
    }
    out["solver"] = {"N": int(_opt(_opt(cfg, "solver", {}), "N", 128))}

    for key in ("eval", "incident", "rayleigh", "phaseless", "verify"):
        if key in cfg:
            out[key] = cfg[key]
    return out


def _medium_of(rc) -> ElasticMedium:
    m = rc["medium"]
    return make_medium(m["lambda"], m["mu"], m["rho"], m["omega"])


def _momentum_of(rc, medium):
    kind = rc["geometry"]
    alpha = rc["quasi_momentum"]["alpha"]
    if kind == "biqp3d":
        return make_quasi_momentum(kind, tuple(alpha), medium)
    return make_quasi_momentum(kind, alpha, medium)


def _profile_of(rc) -> ProfileCurve2:
    p = rc["profile"]
    return ProfileCurve2(p["height"], tuple(p["cos"]), tuple(p["sin"]))


def _incident_of(rc, medium):
    inc = rc.get("incident")
    if inc is None:
        raise ConfigError("incident", "missing")
    kind = _need(inc, "kind", "incident.")
    if kind in ("plane_p", "plane_s"):
        theta = float(_need(inc, "theta", "incident.", (int, float)))
        return plane_incidence(medium, kind, theta)
    if kind == "point_source":
        z = _need(inc, "source", "incident.", list)
        pol = _need(inc, "polarization", "incident.", list)
        field = point_source_incidence(z, pol)
        rcq = rc["quasi_momentum"]["alpha"]
        return field, make_quasi_momentum("qp2d", rcq, medium)
    raise ConfigError("incident.kind", f"unknown kind {kind!r}")


def _fmt(x) -> str:
    return "%.17g" % float(x)


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------
def cmd_eval(rc, out_path):
    medium = _medium_of(rc)
    q = _momentum_of(rc, medium)
    ev = rc.get("eval")
    if ev is None:
        raise ConfigError("eval", "missing")
    pts = np.asarray(_need(ev, "points", "eval.", list), dtype=float)
    src = np.asarray(_need(ev, "source", "eval.", list), dtype=float)
    tol = rc["truncation"]["tol"]
    dim = 2 if rc["geometry"] == "qp2d" else 3
    if pts.ndim != 2 or pts.shape[1] != dim:
        raise ConfigError("eval.points", f"need shape (n, {dim})")
    if src.shape != (dim,):
        raise ConfigError("eval.source", f"need length {dim}")

    evalf = {"qp2d": green2d_eval, "qp3d": green3dqp_eval, "biqp3d": greenbi_eval}[rc["geometry"]]
    kwargs = {}
    if rc["truncation"]["gap_min"] is not None:
        kwargs["gap_min"] = float(rc["truncation"]["gap_min"])
    if rc["truncation"]["tol_wood"] is not None:
        kwargs["tol_wood"] = float(rc["truncation"]["tol_wood"])
    rows = []
    for x in pts:
        g = evalf(medium, q, x, src, tol, **kwargs)
        rows.append((x, g))

    cols = [f"x{i+1}" for i in range(dim)]
    for i in range(dim):
        for j in range(dim):
            cols += [f"re_G{i+1}{j+1}", f"im_G{i+1}{j+1}"]
    cols += ["modes_used", "tail_bound"]
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("# config: " + json.dumps(rc, sort_keys=True) + "\n")
        fh.write(",".join(cols) + "\n")
        for x, g in rows:
            vals = [_fmt(v) for v in x]
            for i in range(dim):
                for j in range(dim):
                    vals += [_fmt(g.value[i, j].real), _fmt(g.value[i, j].imag)]
            vals += [str(g.modes_used), _fmt(g.tail_bound)]
            fh.write(",".join(vals) + "\n")
    return 0


# ---------------------------------------------------------------------------
# verify suites
# ---------------------------------------------------------------------------
def _rand_medium(rng):
    lam = rng.uniform(-0.5, 3.0)
    mu = rng.uniform(0.5, 2.0)
    if lam + mu <= 0.1:
        lam = 0.1 - mu + 1.0
    omega = rng.uniform(0.8, 3.0)
    return make_medium(lam, mu, 1.0, omega)

def _rand_alpha(rng, medium, kind):
    kp = float(np.real(medium.k_p))
    for _ in range(100):
        if kind == "biqp3d":
            a = (rng.uniform(-kp, kp) * 0.7, rng.uniform(-kp, kp) * 0.7)
        else:
            a = rng.uniform(-kp, kp) * 0.9
        q = make_quasi_momentum(kind, a, medium)
        try:
            from .medium import list_modes
            list_modes(medium, q, "tail_bound", gap=0.5, tol=1e-12)
        except errors.WoodAnomaly:
            continue
        return q
    raise RuntimeError("could not draw anomaly-free momentum")


def _suite_quasiperiodicity(rng, trials):
    worst = 0.0
    for kind in GEOMETRIES:
        for _ in range(trials):
            med = _rand_medium(rng)
            q = _rand_alpha(rng, med, kind)
            if kind == "qp2d":
                x = np.array([rng.uniform(0, 1), rng.uniform(0.4, 1.5)])
                y = np.zeros(2)
                g0 = green2d_eval(med, q, x, y, 1e-12).value
                g1 = green2d_eval(med, q, x + np.array([1.0, 0]), y, 1e-12).value
                ph = np.exp(1j * q.alpha)
            elif kind == "qp3d":
                x = np.array([rng.uniform(0, 1), rng.uniform(0.4, 1.2), rng.uniform(0.2, 0.8)])
                y = np.zeros(3)
                g0 = green3dqp_eval(med, q, x, y, 1e-10).value
                g1 = green3dqp_eval(med, q, x + np.array([1.0, 0, 0]), y, 1e-10).value
                ph = np.exp(1j * q.alpha)
            else:
                x = np.array([rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0.4, 1.2)])
                y = np.zeros(3)
                g0 = greenbi_eval(med, q, x, y, 1e-8).value
                g1 = greenbi_eval(med, q, x + np.array([0, 1.0, 0]), y, 1e-8).value
                ph = np.exp(1j * q.alpha[1])
            worst = max(worst, float(np.max(np.abs(g1 - ph * g0)) / np.max(np.abs(g0))))
    return worst, 1e-12


def _suite_reciprocity(rng, trials):
    worst = 0.0
    for kind in GEOMETRIES:
        for _ in range(trials):
            med = _rand_medium(rng)
            q = _rand_alpha(rng, med, kind)
            qm = q.negated()
            if kind == "qp2d":
                x = np.array([rng.uniform(-0.5, 0.5), rng.uniform(0.4, 1.2)])
                y = np.array([rng.uniform(-0.5, 0.5), -rng.uniform(0.0, 0.5)])
                a = green2d_eval(med, q, x, y, 1e-12).value
                b = green2d_eval(med, qm, y, x, 1e-12).value
            elif kind == "qp3d":
                x = np.array([rng.uniform(-0.5, 0.5), rng.uniform(0.4, 1.0), 0.3])
                y = np.array([rng.uniform(-0.5, 0.5), -0.2, -0.1])
                a = green3dqp_eval(med, q, x, y, 1e-10).value
                b = green3dqp_eval(med, qm, y, x, 1e-10).value
            else:
                x = np.array([rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(0.4, 1.0)])
                y = np.array([rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), -0.2])
                a = greenbi_eval(med, q, x, y, 1e-8).value
                b = greenbi_eval(med, qm, y, x, 1e-8).value
            worst = max(worst, float(np.max(np.abs(a - b)) / np.max(np.abs(a))))
    return worst, 1e-12


def _suite_pde_residual(rng, trials):
    worst = 0.0
    for kind in GEOMETRIES:
        med = make_medium(2.0, 1.0, 1.0, 2.0)
        q = _rand_alpha(rng, med, kind)
        for _ in range(max(trials // 3, 2)):
            if kind == "qp2d":
                y = np.zeros(2)
                x = np.array([rng.uniform(0, 1), rng.uniform(0.8, 1.4)])

                def fld(P, j=rng.integers(0, 2)):
                    return green2d_eval_batch(med, q, P, y, 1e-13)[0][:, :, j]

                worst = max(worst, navier_residual(fld, med, x[None, :], 1e-2))
            elif kind == "qp3d":
                y = np.zeros(3)
                x = np.array([rng.uniform(0, 1), rng.uniform(0.7, 1.2), rng.uniform(0.3, 0.8)])

                def fld(P, j=rng.integers(0, 3)):
                    return green3dqp_eval_batch(med, q, P, y, 1e-12)[0][:, :, j]

                worst = max(worst, navier_residual(fld, med, x[None, :], 1e-2))
            else:
                y = np.zeros(3)
                x = np.array([rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0.8, 1.4)])

                def fld(P, j=rng.integers(0, 3)):
                    return greenbi_eval_batch(med, q, P, y, 1e-10)[0][:, :, j]

                worst = max(worst, navier_residual(fld, med, x[None, :], 1e-2))
    return worst, 1e-6


def _suite_oracle(rng, trials):
    worst = 0.0
    for kind in GEOMETRIES:
        for _ in range(max(trials // 3, 2)):
            med = _rand_medium(rng).complexified(0.1)
            qv = _rand_alpha(rng, make_medium(2, 1, 1, 1), kind)
            fac = comb_normalization(kind)
            if kind == "qp2d":
                x, y = np.array([0.3, 0.9]), np.zeros(2)
                spec = green2d_eval(med, qv, x, y, 1e-12).value
                lat = lattice_sum(med, qv, x, y, N=400).value
            elif kind == "qp3d":
                x, y = np.array([0.3, 0.7, 0.6]), np.zeros(3)
                spec = green3dqp_eval(med, qv, x, y, 1e-12).value
                lat = lattice_sum(med, qv, x, y, N=400).value
            else:
                x, y = np.array([0.3, 0.2, 0.9]), np.zeros(3)
                spec = greenbi_eval(med, qv, x, y, 1e-12).value
                lat = lattice_sum(med, qv, x, y, N=110).value
            worst = max(worst, float(np.max(np.abs(spec - fac * lat)) / np.max(np.abs(spec))))
    return worst, 1e-4


def _suite_ode_jump(rng, trials):
    med = make_medium(2.0, 1.0, 1.0, 1.0)
    q = make_quasi_momentum("qp3d", 0.3, med)
    worst = 0.0
    for m in (0, 1, -2):
        worst = max(worst, ode_residual(med, q, m, 0.7, 0.6, 1e-2)
                    / abs(med.rho_omega2))
    wq = delta_weight_qp3d(med, q, 0)
    worst = max(worst, float(np.max(np.abs(wq - np.eye(3) / (2 * np.pi)))))
    qb = make_quasi_momentum("biqp3d", (0.3, 0.45), med)
    for m in ((0, 0), (1, -1)):
        wb = delta_weight_biqp(med, qb, m)
        worst = max(worst, float(np.max(np.abs(wb - np.eye(3) / (4 * np.pi**2)))))
    return worst, 1e-6


def _suite_specfun(rng, trials):
    xs = np.logspace(-1, 2, 200)
    worst = 0.0
    for m in (0, 1, 3):
        wron = bessel_j(m + 1, xs) * np.imag(hankel1(m, xs)) \
            - bessel_j(m, xs) * np.imag(hankel1(m + 1, xs))
        worst = max(worst, float(np.max(np.abs(wron - 2 / (np.pi * xs)))))
    for nu in (1, 2):
        xs2 = np.logspace(-1, 1.5, 50)
        rec = mod_k_deriv(nu, xs2) + mod_k(nu - 1, xs2) + nu / xs2 * mod_k(nu, xs2)
        worst = max(worst, float(np.max(np.abs(rec))))
    h = 1e-6
    for m in (0, 1, 2):
        fd = (hankel1(m, 2.0 + h) - hankel1(m, 2.0 - h)) / (2 * h)
        worst = max(worst, abs(hankel1_deriv(m, 2.0) - fd) / abs(fd))
    return worst, 1e-8


_SUITES = {
    "quasiperiodicity": _suite_quasiperiodicity,
    "reciprocity": _suite_reciprocity,
    "pde_residual": _suite_pde_residual,
    "oracle": _suite_oracle,
    "ode_jump": _suite_ode_jump,
    "specfun": _suite_specfun,
}


def cmd_verify(rc, suite, out_path, seed):
    if suite not in _SUITES:
        raise ConfigError("suite", f"must be one of {sorted(_SUITES)}")
    trials = int(_opt(rc.get("verify", {}), "trials", 6))
    rng = np.random.default_rng(seed)
    worst, tol = _SUITES[suite](rng, trials)
    ok = bool(worst <= tol)
    report = {
        "suite": suite,
        "seed": seed,
        "trials": trials,
        "worst": worst,
        "tolerance": tol,
        "pass": ok,
        "config": rc,
    }
    if out_path:
        _write_json(out_path, report)
    print(f"suite {suite}: worst {worst:.3e} vs tol {tol:.1e} -> "
          + ("PASS" if ok else "FAIL"))
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# solve2d / rayleigh / phaseless
# ---------------------------------------------------------------------------
def _rayleigh_of_solution(medium, q, sol, height, m_modes):
    n_grid = max(4 * m_modes + 4, 16)
    x1 = np.arange(n_grid) / n_grid
    X = np.stack([x1, np.full(n_grid, height)], axis=-1)
    usc = eval_scattered(sol, X)
    return extract_coeffs_2d(medium, q, usc, height, m_modes)


def cmd_solve2d(rc, out_path):
    medium = _medium_of(rc)
    profile = _profile_of(rc)
    incident, q = _incident_of(rc, medium)
    N = rc["solver"]["N"]
    sol = solve_dirichlet(medium, q, profile, incident, N)
    resid = boundary_residual(sol)
    ray = rc.get("rayleigh", {})
    height = float(_opt(ray, "height", profile.max_height + 0.5))
    co = _rayleigh_of_solution(medium, q, sol, height, int(_opt(ray, "m_modes", 5)))

    # energy balance through the measurement line
    ngrid = 64
    x1 = np.arange(ngrid) / ngrid
    X = np.stack([x1, np.full(ngrid, height)], axis=-1)
    nu = np.tile([0.0, 1.0], (ngrid, 1))
    ui, di1, di2 = incident.jet(medium, q, X)
    gi = np.stack([di1, di2], axis=-1)
    us, gs = eval_scattered(sol, X, need_gradient=True)
    j_inc = flux_2d(medium, ui, traction(medium, ui, gi, nu))
    j_tot = flux_2d(medium, ui + us, traction(medium, ui + us, gi + gs, nu))

    out = {
        "config": rc,
        "cond_estimate": sol.cond_estimate,
        "boundary_residual": resid,
        "density": [[_fmt(v.real), _fmt(v.imag)] for v in sol.density.reshape(-1)],
        "rayleigh": {
            "height": height,
            "modes": [{"m": int(mo.m), "u_p": [mo2.real, mo2.imag], "u_s": [mo3.real, mo3.imag]}
                      for mo, mo2, mo3 in zip(co.modes, co.u_p, co.u_s)],
        },
        "energy": {"incident_flux": j_inc, "total_flux": j_tot,
                   "balance": abs(j_tot) / abs(j_inc) if j_inc else float("nan")},
    }
    _write_json(out_path, out)
    print(f"solve2d: N={N} residual {resid:.2e} energy balance {out['energy']['balance']:.2e}")
    return 0


def cmd_rayleigh(rc, action, out_path):
    medium = _medium_of(rc)
    ray = rc.get("rayleigh")
    if ray is None:
        raise ConfigError("rayleigh", "missing")
    if action == "extract":
        profile = _profile_of(rc)
        incident, q = _incident_of(rc, medium)
        sol = solve_dirichlet(medium, q, profile, incident, rc["solver"]["N"])
        height = float(_opt(ray, "height", profile.max_height + 0.5))
        m_modes = int(_opt(ray, "m_modes", 8))
        co = _rayleigh_of_solution(medium, q, sol, height, m_modes)
        out = {
            "config": rc,
            "height": height,
            "mode_index": "entries are [m, re, im] with lattice frequency l = 2*pi*m",
            "p": [[int(mo.m), c.real, c.imag] for mo, c in zip(co.modes, co.u_p)],
            "s": [[int(mo.m), c.real, c.imag] for mo, c in zip(co.modes, co.u_s)],
        }
        _write_json(out_path, out)
        print(f"rayleigh extract: {len(co.modes)} modes at height {height}")
        return 0
    if action == "eval":
        q = _momentum_of(rc, medium)
        coeffs = _need(ray, "coeffs", "rayleigh.", dict)
        pts = np.asarray(_need(ray, "points", "rayleigh.", list), dtype=float)
        from .medium import classify_mode
        modes, up, us = [], [], []
        for mp, ms in zip(coeffs.get("p", []), coeffs.get("s", [])):
            modes.append(classify_mode(medium, q, int(mp[0])))
            up.append(mp[1] + 1j * mp[2])
            us.append(ms[1] + 1j * ms[2])
        co = RayleighCoeffs2(tuple(modes), np.array(up), np.array(us))
        vals = eval_rayleigh_2d(medium, q, co, pts)
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write("# config: " + json.dumps(rc, sort_keys=True) + "\n")
            fh.write("x1,x2,re_u1,im_u1,re_u2,im_u2\n")
            for x, u in zip(pts, vals):
                fh.write(",".join([_fmt(x[0]), _fmt(x[1]), _fmt(u[0].real),
                                   _fmt(u[0].imag), _fmt(u[1].real), _fmt(u[1].imag)]) + "\n")
        print(f"rayleigh eval: {len(pts)} points")
        return 0
    raise ConfigError("rayleigh", f"unknown action {action!r}")


def _source_config_of(ph) -> SourceConfig:
    return SourceConfig(
        z_tilde=tuple(_need(ph, "z_tilde", "phaseless.", list)),
        fixed_pol=tuple(_need(ph, "fixed_pol", "phaseless.", list)),
        movable_pols=tuple(tuple(v) for v in _need(ph, "movable_pols", "phaseless.", list)),
        probes=tuple(tuple(v) for v in _need(ph, "probes", "phaseless.", list)),
        sigma_center=tuple(_need(ph, "sigma_center", "phaseless.", list)),
        sigma_axes=tuple(_need(ph, "sigma_axes", "phaseless.", list)),
        sigma_arc=tuple(_opt(ph, "sigma_arc", (0.25 * np.pi, 0.75 * np.pi))),
        n_sources=int(_opt(ph, "n_sources", 3)),
        grid_x1=tuple(_opt(ph, "grid_x1", tuple(np.linspace(0.05, 0.95, 10)))),
        height=float(_need(ph, "height", "phaseless.", (int, float))),
    )


def _dataset_to_json(ds: PhaselessDataset) -> dict:
    return {
        "grid_x1": list(ds.grid_x1),
        "height": ds.height,
        "r": ds.r.tolist(),
        "s": ds.s.tolist(),
        "b": ds.b.tolist(),
        "meta": ds.meta,
    }


def _dataset_from_json(obj) -> PhaselessDataset:
    return PhaselessDataset(np.asarray(obj["grid_x1"], float), float(obj["height"]),
                            np.asarray(obj["r"], float), np.asarray(obj["s"], float),
                            np.asarray(obj["b"], float), obj.get("meta", {}))


def cmd_phaseless(rc, action, out_path, threads):
    ph = rc.get("phaseless")
    if ph is None:
        raise ConfigError("phaseless", "missing")
    cfg = _source_config_of(ph)
    profile = _profile_of(rc)
    m = rc["medium"]
    freqs = [float(v) for v in _opt(ph, "frequencies", [m["omega"]])]
    N = int(_opt(ph, "solver_n", rc["solver"]["N"]))
    alpha = rc["quasi_momentum"]["alpha"]

    datasets = {}
    for w in freqs:
        medium = make_medium(m["lambda"], m["mu"], m["rho"], w)
        q = make_quasi_momentum("qp2d", alpha, medium)
        datasets[_fmt(w)] = synth_phaseless(medium, q, profile, cfg, N, threads)

    if action == "synth":
        out = {"config": rc, "datasets": {k: _dataset_to_json(v) for k, v in datasets.items()}}
        _write_json(out_path, out)
        print(f"phaseless synth: {len(datasets)} dataset(s), grid {len(cfg.grid_x1)}")
        return 0
    if action == "check":
        ref_path = _opt(ph, "reference", None)
        if ref_path is None:
            raise ConfigError("phaseless.reference", "missing (needed for check)")
        with open(ref_path, "r", encoding="utf-8") as fh:
            ref = json.load(fh)
        report = {"config": rc, "per_frequency": {}}
        worst = 0.0
        for k, ds in datasets.items():
            if k not in ref["datasets"]:
                raise ConfigError("phaseless.reference", f"missing frequency {k}")
            other = _dataset_from_json(ref["datasets"][k])
            disc = cosine_identity(ds, other)
            gap = dataset_gap(ds, other)
            report["per_frequency"][k] = {
                "cosine_discrepancy": disc,
                "magnitude_gap": gap,
                "zero_tracks": nonvanishing_probe(ds),
            }
            worst = max(worst, disc)
        report["worst_cosine_discrepancy"] = worst
        _write_json(out_path, report)
        print(f"phaseless check: worst cosine discrepancy {worst:.3e}")
        return 0
    raise ConfigError("phaseless", f"unknown action {action!r}")


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------
def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="qpelastic",
                                     description="quasi-periodic elastic scattering toolkit")
    parser.add_argument("command", choices=["eval", "verify", "solve2d", "rayleigh", "phaseless"])
    parser.add_argument("action", nargs="?", default=None,
                        help="subaction for rayleigh (extract|eval) / phaseless (synth|check)")
    parser.add_argument("--config", required=True)
    parser.add_argument("--out", default=None)
    parser.add_argument("--suite", default=None)
    parser.add_argument("--geometry", default=None, choices=GEOMETRIES)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    try:
        rc = resolve_config(load_config(args.config), args.geometry)
        if args.command == "eval":
            if not args.out:
                raise ConfigError("--out", "required for eval")
            return cmd_eval(rc, args.out)
        if args.command == "verify":
            if not args.suite:
                raise ConfigError("--suite", "required for verify")
            return cmd_verify(rc, args.suite, args.out, args.seed)
        if args.command == "solve2d":
            if not args.out:
                raise ConfigError("--out", "required for solve2d")
            return cmd_solve2d(rc, args.out)
        if args.command == "rayleigh":
            if args.action not in ("extract", "eval"):
                raise ConfigError("rayleigh", "action must be extract or eval")
            if not args.out:
                raise ConfigError("--out", "required")
            return cmd_rayleigh(rc, args.action, args.out)
        if args.command == "phaseless":
            if args.action not in ("synth", "check"):
                raise ConfigError("phaseless", "action must be synth or check")
            if not args.out:
                raise ConfigError("--out", "required")
            return cmd_phaseless(rc, args.action, args.out, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except _DOMAIN_ERRORS as exc:
        print(f"domain error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    return 2


if __name__ == "__main__":
    sys.exit(main())
