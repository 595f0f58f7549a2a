"""
A self-similar solution that blows up
=====================================

At the critical power p = 4/n the constant profile (-omega/k)^(n/4)
reconstructs into a field whose amplitude grows like (T - t)^(-n/2).
"""

import math

import numpy as np

from radial_nls import reduce as R
from radial_nls.core import Parameters, SpacetimePoint
from radial_nls.verify import pde_residual

params = Parameters(2, 2, 1)
spec = R.BlowupSpec("critical", -1.0, 1.0)  # omega = -1, blow-up at T = 1
level = R.blowup_constant_profile(params, spec)
field = R.blowup_solution(params, spec, lambda xi: level)

ts = np.linspace(0.5, 0.99, 6)
amps = [abs(field(t, 1.0)) for t in ts]
for t, a in zip(ts, amps):
    print(f"t={t:.3f}  |u(t, 1)|={a:.6f}")

slope = np.polyfit(np.log(1 - ts), np.log(amps), 1)[0]
print("log-log slope", slope, "expected", -params.n / 2)

pts = [SpacetimePoint(t, r) for t in (0.0, 0.5, 0.9) for r in (0.5, 1.0, 2.0)]
print("residual", pde_residual(params, field, pts).max_relative)
print("finite before T:", math.isfinite(abs(field(0.999, 1.0))))
