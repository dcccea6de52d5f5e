"""
Rays that leave the centre
==========================

For k = 1 - a r**n with n = 1 or 2 a null ray leaves the central
singularity as t ~ 1 + a**(2/3) r**(1 + 2n/3). We launch it just off the
centre and watch it stay under the apparent horizon.
"""
import numpy as np

from ltbcollapse import ModelParams, integrate_from_singularity, singular_start
from ltbcollapse import geometry as geo
from ltbcollapse.verification import fit_exponent

for n, a in [(1, 1.0), (2, 8.0)]:
    params = ModelParams(n, a, r_max=0.1)
    start = singular_start(params)
    path = integrate_from_singularity(params, start)
    print(f"\nn={n}, a={a}: launch x0={start.x0}, alpha={start.alpha:.4f}, stop: {path.termination}")

    # t - 1 is tiny near the centre, so print offsets rather than t itself
    print(f"{'r':>10} {'t-1':>12} {'t_h-1':>12} {'t_s-1':>12}")
    for r in np.geomspace(1e-5, 0.1, 6):
        i = np.searchsorted(path.r, r)
        i = min(i, path.r.size - 1)
        ri = path.r[i]
        th = geo.horizon_offset(params, ri)
        ts = geo.one_minus_k(params, ri) / geo.k(params, ri)
        print(f"{ri:10.3e} {path.tau[i]:12.4e} {th:12.4e} {ts:12.4e}")

    print(f"fitted exponent on [1e-6, 1e-4]: {fit_exponent(path, 1e-6, 1e-4):.5f} (expected {start.alpha:.5f})")

# The horizon overtakes the ray once a r**(n-3) is no longer large; for a
# small amplitude this happens well inside r = 0.1.
params = ModelParams(2, 0.05, r_max=0.1)
path = integrate_from_singularity(params, singular_start(params))
print(f"\nn=2, a=0.05 on r <= 0.1: {path.termination}")
