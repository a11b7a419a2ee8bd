"""
Quantum Fisher information of a single qudit
============================================

Four ways to compute the same number, and what it says about a probe.
"""

import numpy as np

import qudit_metrology as qm

d = 5
rng = np.random.default_rng(1)
psi = qm.random_pure_state(d, rng)
jx, jy, jz = qm.spin_operators(d)

# For a pure state every estimator reduces to four times the variance of the
# generator. The Bloch-vector form measures how fast the state moves through
# the Gell-Mann coordinates instead.
rho = qm.to_density(psi)
print("SLD        ", qm.qfi_sld(rho, jx))
print("spectral   ", qm.qfi_spectral(rho, jx))
print("4 Var      ", qm.qfi_pure(psi, jx))
print("Bloch speed", qm.qfi_pure_bloch(psi, jx))

# %%
# Maximizing over collective directions n . J picks out the best rotation
# axis. Coherent states sit exactly at d - 1, the standard quantum limit.
for name, state in [("coherent", qm.spin_coherent(d, 0.7, 0.3)),
                    ("middle level", qm.basis_state(d, 2)),
                    ("GHZ-like", qm.ghz_like(d)),
                    ("random", psi)]:
    f, n = qm.qfi_max_collective(state)
    print(f"{name:13s} F_max = {f:6.3f}  d_eff = {qm.d_eff(state):5.3f}  "
          f"W = {qm.metrological_power(state):5.3f}  n = {np.round(n.n, 3)}")

# %%
# Mixing can only lose information: the QFI is convex.
sigma = qm.random_density_matrix(d, rng)
mix = qm.DensityMatrix(0.5 * rho.matrix + 0.5 * sigma.matrix)
print("convexity:", qm.qfi_spectral(mix, jz), "<=",
      0.5 * qm.qfi_spectral(rho, jz) + 0.5 * qm.qfi_spectral(sigma, jz))
