"""
Exact radial solutions and their residuals
==========================================

Evaluate a few catalogued families on a grid and measure how well each
one satisfies the radial equation by finite differences.
"""

import numpy as np

from radial_nls.catalog import FamilyConstants, get_family, instantiate, list_families
from radial_nls.core import Parameters, SpacetimePoint
from radial_nls.verify import pde_residual, perturbed

# the registry is a plain list of descriptors
families = list_families()
print(len(families), "families")
for fam in families[:5]:
    print(fam.id, fam.behaviour_tag, "|", fam.formula)

# the n = 3 soliton (1 + r^2)^(-1/2) needs p = 4/(n-2)
params = Parameters(3, 4, 3)
soliton = instantiate("T02", params, FamilyConstants.from_mapping(dict(c2=1), [1]))
r = np.linspace(0.25, 4, 6)
print(np.array([abs(soliton(0.0, x)) for x in r]))

pts = [SpacetimePoint(t, x) for t in (0.0, 0.5) for x in r]
rep = pde_residual(params, soliton, pts)
print("relative residual", rep.max_relative, "passed", rep.passed)

# scaling the amplitude by 1% breaks the equation, and the engine notices
bad = pde_residual(params, perturbed(soliton), pts)
print("perturbed residual", bad.max_relative, "passed", bad.passed)

# a standing wave built from Bessel functions (p = -1)
wave_params = Parameters(3, -1, -1)
wave = instantiate("S01", wave_params, FamilyConstants.from_mapping(dict(c2=0.5, c3=0.2, nu=2)))
print(get_family("S01").theorem_anchor)
print(pde_residual(wave_params, wave, pts).max_relative)
