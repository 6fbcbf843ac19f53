"""
Two modes of a boosted condensate
=================================

In the Huang-Yang-Luttinger model moving n bosons from the condensate to the
mode v costs interaction energy and gains kinetic energy.  The result is a
concave parabola in n: positive up to n_min2 = N - v^2 V / (2 a), then
unbounded below as the volume grows.
"""
import math

import numpy as np

from nesslab import hyl
from nesslab.lattice import LatticeMomentum

params = hyl.HylParams.from_volume(100, 100, 1)
v = 1

n = np.arange(params.N + 1)
f = np.array([float(hyl.two_mode_energy(int(k), params, v)) for k in n])
st = hyl.two_mode_stationary(params, v)
print(f"stationary points: n_max = {st.n_max}, n_min1 = {st.n_min1}, n_min2 = {st.n_min2}")
print(f"maximum of the barrier: f({st.n_max_int}) = {f[st.n_max_int]:.3f}")
print("energy at n = 0, 25, 50, 75, 100:", f[[0, 25, 50, 75, 100]])

# the depleted-density cap keeps exactly the non-negative part
cap = hyl.rho_max(params, v)
kept = math.floor(float(cap.value * params.volume))
print(f"rho_max = {cap.value} keeps n <= {kept}; lowest kept energy = {f[: kept + 1].min()}")

# past n_min2 every extra particle lowers the energy by about a rho - v^2/2
for V in (100, 400, 1600, 6400):
    p = hyl.HylParams.from_volume(V, V, 1)
    tail = [float(hyl.depletion_tail(k, p, v)) for k in range(4)]
    print(f"V = {V:5d}: tail {np.round(tail, 5)}, step {tail[2] - tail[1]:.5f}")

# exhaustive check on a small box: the boosted minimum is the full transfer
small = hyl.HylParams(6, 6, 1, 1)
vel = LatticeMomentum((1,), 6)
cfg, e = hyl.brute_force_minimum(small, vel, 3)
print(f"brute-force minimum over {hyl.config_count(small, 3)} configs: {cfg.counts()} with E = {e}")
