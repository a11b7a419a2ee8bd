"""
GHZ-like interferometry on a qudit
==================================

(|0> + |d-1>)/sqrt2 picks up a relative phase (d-1) theta. Moving |d-1> back
to |1> and closing with a pi/2 pulse turns that phase into a population.
"""

import numpy as np

import qudit_metrology as qm

d = 6
res = qm.run_ghz_protocol(d, qm.ThetaGrid(0, np.pi / 2, 7))
for th, p, prec in zip(res.theta, res.expectation, res.precision_sq):
    cf = qm.ghz_closed_form(d, th)
    print(f"theta={th:5.3f}  <P>={p:.6f}  closed form={cf.expectation:.6f}  (dtheta)^2={prec}")

# %%
# Away from the nodes the precision is 1/(d-1)^2 everywhere: the Heisenberg
# limit, with no fine tuning of theta.
for d in range(2, 9):
    res = qm.run_ghz_protocol(d, qm.ThetaGrid(0.1, 0.2, 2))
    print(f"d={d}  (dtheta)^2 = {res.precision_sq[0]:.6f}  1/(d-1)^2 = {1 / (d - 1) ** 2:.6f}")

# %%
# The same data seen as <Jz> oscillates between -(d-1)/2 and 1 - (d-1)/2.
print(np.round(qm.jz_view(res)[:3], 4))
