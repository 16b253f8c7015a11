"""Tour of the quasi-periodic Green's functions.

Evaluates the 2D and 3D quasi-periodic tensors and the 3D biperiodic tensor,
then demonstrates the three properties everything else in the package leans
on: exact quasi-periodicity, exact point-source reciprocity, and agreement
with the independent phased lattice sum at a complexified frequency.
"""

import numpy as np

from qpelastic import (comb_normalization, green2d_eval, green3dqp_eval,
                       greenbi_eval, lattice_sum, make_medium,
                       make_quasi_momentum)

med = make_medium(lam=2.0, mu=1.0, rho=1.0, omega=1.0)
print(f"medium: lam=2, mu=1  ->  k_p = {med.k_p:.3f}, k_s = {med.k_s:.3f}")

# --- 2D quasi-periodic tensor ---------------------------------------------
q = make_quasi_momentum("qp2d", 0.3, med)
x, y = np.array([0.25, 1.0]), np.zeros(2)
g = green2d_eval(med, q, x, y, tol=1e-12)
print(f"\n2D tensor at x={x}, source at origin ({g.modes_used} modes, "
      f"tail bound {g.tail_bound:.1e}):")
print(np.array_str(g.value, precision=6))

g_shift = green2d_eval(med, q, x + np.array([1.0, 0.0]), y, tol=1e-12)
qp_err = np.max(np.abs(g_shift.value - np.exp(1j * q.alpha) * g.value))
print(f"quasi-periodicity |G(x+e1) - e^(i alpha) G(x)| = {qp_err:.2e}")

g_rec = green2d_eval(med, q.negated(), y + np.array([0, -0.2]), x, tol=1e-12)
g_fwd = green2d_eval(med, q, x, y + np.array([0, -0.2]), tol=1e-12)
print(f"reciprocity    |G^a(x,z) - G^-a(z,x)|        = "
      f"{np.max(np.abs(g_fwd.value - g_rec.value)):.2e}")

# --- cross-check against the phased free-space lattice sum -----------------
med_c = med.complexified(0.1)
spec = green2d_eval(med_c, q, x, y, tol=1e-13).value
lat = lattice_sum(med_c, q, x, y, N=600).value * comb_normalization("qp2d")
print(f"lattice-sum oracle at omega(1+0.1i): rel diff = "
      f"{np.max(np.abs(spec - lat)) / np.max(np.abs(spec)):.2e}")

# --- 3D quasi-periodic and biperiodic tensors ------------------------------
q3 = make_quasi_momentum("qp3d", 0.3, med)
g3 = green3dqp_eval(med, q3, (0.3, 0.7, 0.6), (0, 0, 0))
print(f"\n3D quasi-periodic tensor ({g3.modes_used} modes): G_11 = {g3.value[0, 0]:.6f}")

qb = make_quasi_momentum("biqp3d", (0.3, 0.45), med)
gb = greenbi_eval(med, qb, (0.3, 0.2, 0.9), (0, 0, 0))
print(f"3D biperiodic tensor   ({gb.modes_used} modes): G_33 = {gb.value[2, 2]:.6f}")
gb1 = greenbi_eval(med, qb, (0.3, 1.2, 0.9), (0, 0, 0))
bi_err = np.max(np.abs(gb1.value - np.exp(1j * qb.alpha[1]) * gb.value))
print(f"biperiodicity in x2: {bi_err:.2e}")
