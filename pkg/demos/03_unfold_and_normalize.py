"""
Two invariant curves and the monic form
=======================================

Doubling the base circle turns the invariant 2-curve into two ordinary
invariant curves of a map over the rotation ``(alpha + 1)/2``. A fiberwise
affine change then brings the map to ``z^2 + C(theta)`` without touching the
multiplicators.
"""

import numpy as np

from fibred import build_example, multiplicator
from fibred.construction import curve_residual

ex = build_example()
u = ex.unfolded
print("rotation of the unfolded map:", u.map.alpha)
for name, g in (("gamma1", u.gamma1), ("gamma2", u.gamma2)):
    print(f"{name}: kappa {multiplicator(u.map, g):.9f}, invariance {curve_residual(u.map, g):.1e}")
print("min gap between the curves:", np.abs(u.gamma1.samples - u.gamma2.samples).min())

nd = ex.norm
print(f"\nnormalization used {nd.terms} series terms")
print("conjugacy residual:", nd.residual)
print("coefficient residual:", nd.coefficient_residual)
for name, h in zip(("gamma1", "gamma2"), ex.curves):
    print(f"normalized {name}: kappa {multiplicator(nd.map, h):.9f}")
