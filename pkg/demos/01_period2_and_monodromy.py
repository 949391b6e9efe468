"""
Period-2 points and their monodromy
===================================

The period-2 cycle of ``z^2 + c`` is the pair of roots of ``z^2 + z + c + 1``.
Carrying the pair once around the parabolic parameter -3/4 swaps the two points,
so the tracked cycle only closes after two turns.
"""

import numpy as np

from fibred import build_dwell_loop, period2_points, track_two_curve
from fibred.twocurve import cycle_derivative_product

c = -1.05 + 0.1j
z1, z2 = period2_points(c)
print("cycle points:", z1, z2)
print("q(z1) - z2 =", abs(z1 * z1 + c - z2))
print("multiplier 4(c+1) =", cycle_derivative_product(c), " |.| =", abs(4 * (c + 1)))

# a loop of radius 0.2 around -3/4, stopping longest near the limb centre
loop = build_dwell_loop(r=0.2, a=0.8)
curve = track_two_curve(loop, n=2048)
z0 = curve.samples[0]
half = curve.samples[1024]
print("\nafter one turn the point sits on the partner root:", abs(half - (-1 - z0)))
print("after two turns it is back:", curve.closure_error)
print("fiber gap 2 sqrt(r) =", 2 * np.sqrt(0.2), " measured:", np.abs(curve.samples[:1024] - curve.samples[1024:]).min())
