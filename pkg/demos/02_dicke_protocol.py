"""
Rotating a Dicke-like level
===========================

A basis state of a qudit plays the role of a Dicke state. Rotating it about
x and reading out Jz^2 estimates the rotation angle.
"""

import numpy as np

import qudit_metrology as qm

# The probe is compiled from |0> with a ladder of pi pulses.
seq = qm.compile_preparation(5, ("dicke", 2))
print("pulses:", [(p.level_j, p.level_k) for p in seq.pulses])

for d in (3, 4, 5, 8):
    res = qm.run_dicke_protocol(d)
    best = np.min(res.precision_sq)
    print(f"d={d}  i={res.spec.index}  min (dtheta)^2 = {best:.5f}  bound 1/F_Q = {res.crb:.5f}")

# %%
# Odd d (integer spin) reaches the bound as theta approaches zero. For even
# d the middle pair m = +-1/2 looks the same to Jz^2 and the readout stays
# at 4/(d^2 - 4), still shrinking like 1/d^2.
for d in (4, 6, 8, 10):
    res = qm.run_dicke_protocol(d, grid=qm.ThetaGrid(0, 1e-3, 3))
    print(f"d={d}  readout {res.precision_sq[1]:.5f}  4/(d^2-4) = {4 / (d * d - 4):.5f}")

# %%
# Where the slope of <Jz^2> vanishes the propagated error diverges.
res = qm.run_dicke_protocol(4, grid=qm.ThetaGrid(0, np.pi, 9))
for th, p in zip(res.theta, res.precision_sq):
    print(f"theta = {th:5.3f}  (dtheta)^2 = {p}")
