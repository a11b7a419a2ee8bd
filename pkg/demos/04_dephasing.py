"""
Dephasing and the best qudit size
=================================

Coherence between |j> and |k> decays as exp(-(j-k)^2 gamma t), so the GHZ-like
probe loses its advantage faster the larger it is.
"""

import numpy as np

import qudit_metrology as qm

ch = qm.DephasingChannel(gamma=0.5, t=0.1)
rho = qm.ghz_dephased(4, ch)
print("purity after dephasing:", round(rho.purity, 4))

curve = qm.qfi_decay_curve(range(2, 8), [0.0, 0.01, 0.05])
for row in curve.rows:
    print(f"d={row.d}  gamma t={row.gamma_t:<5}  F_Q={row.f_q:8.4f}  W={row.metrological_power:.4f}")

# %%
# For each noise level there is a dimension that maximizes the power. Once
# every dimension has dropped to zero the tie goes to the smallest d.
for gt in (0.005, 0.01, 0.02, 0.05, 0.1):
    c = qm.power_decay_curve(range(2, 13), [gt])
    best = c.argmax_power(gt)
    print(f"gamma t = {gt:<6} best d = {best}  W = {c.for_dim(best)[0].metrological_power:.4f}")

# %%
# Optimizing the rotation axis instead of keeping P can recover some value:
# for d=3 the Jx direction couples |0> and |2> directly.
enc = qm.power_decay_curve([3], [0.01]).rows[0]
col = qm.power_decay_curve([3], [0.01], generator="collective").rows[0]
print("d=3 d_eff under P:", round(enc.d_eff, 4), " best collective:", round(col.d_eff, 4))
print(np.round(rho.matrix.real, 3))
