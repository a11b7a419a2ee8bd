"""
A qudit as a symmetric register of qubits
=========================================

The d levels of a spin-(d-1)/2 map onto the symmetric subspace of N = d-1
qubits. Collective rotations act identically on both sides, so every QFI
carries over.
"""

import numpy as np

import qudit_metrology as qm

d = 5
V = qm.embedding_matrix(d)
print("isometry:", np.allclose(V.conj().T @ V, np.eye(d)))

# The GHZ-like qudit state becomes the N-qubit GHZ state.
print("GHZ image matches:", np.allclose(qm.embed_qudit(qm.ghz_like(d)).amplitudes,
                                        qm.ghz_multiqubit(d - 1).amplitudes))

rng = np.random.default_rng(3)
report = qm.qfi_equivalence_check(qm.ghz_like(d), ["x", "y", "z"], label="ghz")
for _ in range(5):
    report = report.merge(qm.qfi_equivalence_check(qm.random_pure_state(d, rng), ["x", rng.normal(size=3)]))
for case in report.cases[:4]:
    print(case.state_label, np.round(case.direction, 3), round(case.qudit_qfi, 6), round(case.multiqubit_qfi, 6))
print("max residual:", report.max_residual, "pass:", report.passed)

# %%
# The effective number of entangled qubits N_eff = F_Q / N.
for k in range(d):
    print(f"Dicke k={k}: N_eff = {qm.n_eff(qm.dicke_multiqubit(d - 1, k), d - 1):.3f}")
