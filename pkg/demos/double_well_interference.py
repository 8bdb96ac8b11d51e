"""Two classical paths across a double-well barrier, and what their phases do.

Run with ``python demos/double_well_interference.py``; takes about 15 s.
"""

import numpy as np

from cohertherm import SystemSpec, find_boundary_trajectories, vvg_amplitude
from cohertherm.oracle import evolve_exact, windowed_point_source
from cohertherm.semiclassics import transition_probability

hbar = 0.05
well = SystemSpec("double_well", barrier_height=1.0, well_separation=2.0, hbar=hbar)

# Orbits leaving the left minimum that sit at the right minimum after t = 1.
# Inside this momentum window there are two: one swings straight over the
# barrier, the other first heads left, bounces off the outer wall and comes back.
window = (-7.0, 3.5)
orbits = find_boundary_trajectories(well, -1.0, 1.0, 1.0, window, 2000, dt=5e-5)
for tr in orbits:
    print(f"p_i = {tr.p_i:+.4f}   S = {tr.action:+.5f}   maslov = {tr.maslov_index}   "
          f"dq_f/dp_i = {tr.m21:+.4f}")

kernel = vvg_amplitude(orbits)
p, diag, cross = transition_probability(kernel)
print(f"\n|K|^2 = {p:.5f}  (classical sum {diag:.5f}, interference {cross:+.5f})")

# Same quantity from the Schrodinger equation: a point source filtered to the
# same initial momenta, propagated on a grid and read off at q = +1.
src, scale = windowed_point_source(-1.0, window, hbar, (-4.0, 4.0, 2048), edge_width=0.3)
psi = evolve_exact(src, well, 1.0, dt=2e-4)
exact = abs(psi.value_at(1.0) * scale) ** 2
print(f"split-step reference  {exact:.5f}   relative gap {(p - exact) / exact:+.2%}")

# The interference term follows cos(dS/hbar); sweeping t walks dS through
# several multiples of 2 pi hbar and the sign keeps flipping.
print("\n   t     dS/hbar   cross/diag")
for t in np.linspace(0.9, 1.3, 9):
    res = vvg_amplitude(find_boundary_trajectories(well, -1.0, 1.0, t, window, 300, dt=t / 4000))
    s = [c.action for c in res.contributions]
    print(f"{t:5.2f}  {(s[-1] - s[0]) / hbar:8.2f}   {res.cross_sum / res.diagonal_sum:+.3f}")
