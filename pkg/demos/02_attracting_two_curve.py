"""
A corrected map keeping the 2-curve invariant
=============================================

The rotation moves the base angle, so the 2-curve of ``z^2 + C(theta)`` is not
invariant as it stands. A fiberwise affine correction fixes this. The cycle
part of the multiplicator equals ``-a r`` for the dwell loop. Without the
reparametrization (``a = 0``) the average vanishes.
"""

from fibred import build_dwell_loop, kappa2_closed_form, multiplicator2, track_two_curve
from fibred.construction import correction, corrected_map, cycle_term, two_curve_residual

alpha = (5 ** 0.5 - 1) / 2 / 10  # 0.0618...

for a in (0.0, 0.4, 0.8):
    loop = build_dwell_loop(0.2, a)
    print(f"a={a}: cycle term {cycle_term(loop):+.12f}   closed form {kappa2_closed_form(0.2, a):+.3f}")

loop = build_dwell_loop(0.2, 0.8)
curve = track_two_curve(loop)
corr = correction(curve, alpha)
pmap = corrected_map(loop, corr, alpha)
print("\ninvariance residual (labels swapped):", two_curve_residual(pmap, curve, tau=1))
print("residual with labels kept:", two_curve_residual(pmap, curve, tau=0))
print("kappa_2 =", multiplicator2(pmap, curve))
