"""
Umklapp cascades in a moving Tonks gas
======================================

Hard-core bosons in one dimension share their spectrum with free fermions.
Here we boost a ring of N = L = 101 particles and follow the ladder of
umklapp cascades, whose energies drop below zero while every small
particle-hole excitation stays positive.
"""
import math

import numpy as np

from nesslab import girardeau as gd
from nesslab.lattice import BoxSpec, snap_velocity
from nesslab.metastability import filter_cd, landau_vc, girardeau_window_spec

params = gd.GirardeauParams(101, 101)
v = snap_velocity(1.0, BoxSpec.from_side(101))
print(f"N = {params.N}, L = {params.side}, v snapped to {v.value[0]:.6f}")

# the cascade ladder: m particles carried across the Fermi sea
m = np.arange(0, 12)
ladder = np.array([float(gd.umklapp_cascade(int(k), v.snapped, params).energy) for k in m])
for k, e in zip(m, ladder):
    print(f"  cascade m={k:2d}  E = {e: .5f}")
print("steps between rungs:", np.round(np.diff(ladder)[:4], 4), "vs -2 k_F v =", round(-2 * float(params.kf) * v.value[0], 4))

# the lowest rung sits at the translated Fermi sea, -N v^2 / 2
best = gd.cascade_minimizer(v.snapped, params)
print(f"deepest cascade m = {best.m}, E = {float(best.energy):.3f}")

# small excitations: positive, with Landau velocity k_F + pi/L
spec = girardeau_window_spec(1, 3)
small = gd.restricted_excitations(params, v.snapped, spec.c, spec.d, 1)
print(f"{len(small)} single excitations inside the (c, d) window, min E = {min(float(p.energy) for p in small):.4f}")
rest = [p for p in gd.restricted_excitations(params, None, spec.c, spec.d, 1)]
print(f"Landau velocity of the window: {float(landau_vc(rest)):.6f} (pi = {math.pi:.6f})")

# cascades never survive the (c, d) filter
cloud = small + [gd.umklapp_cascade(int(k), v.snapped, params) for k in range(1, 5)]
print("cascades kept by the filter:", sum(p.content[0] == "cascade" for p in filter_cd(cloud, spec)))
