# Transfer between two disjoint arcs of the kicked rotor after 20 kicks.
#
# For weak kicks the phase space is mostly regular tori and no classical orbit
# joins the arcs; the semiclassical estimate is zero and only a small quantum
# leak remains. Once the chaotic sea takes over, the orbits fold around the
# cylinder so often that their sum can only be closed with the classical sum
# rule, which already predicts the Floquet result well.

import math
import warnings

from cohertherm import SystemSpec
from cohertherm.errors import NoTrajectoryWarning
from cohertherm.oracle import region_transfer_exact
from cohertherm.semiclassics import chaos_census

a = (math.pi - 0.3, math.pi + 0.3)
b = (0.3, 0.9)

print("   K   orbits   coherent   closure   semiclassical   Floquet")
for k in (0.5, 1.0, 2.0, 4.0, 7.0):
    rotor = SystemSpec("kicked_rotor", kick_strength=k, hbar=0.05)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NoTrajectoryWarning)
        c = chaos_census(rotor, a, b, 20, 1000)
    exact = region_transfer_exact(rotor, a, b, 20)
    print(f"{k:4.1f}  {c.n_orbits:7d}   {c.coherent:8.5f}  {c.closure:8.5f}   "
          f"{c.probability:12.5f}   {exact:.5f}")

print(f"\nuniform spreading over the circle would give {(b[1] - b[0]) / (2 * math.pi):.5f}")

# Short times are the opposite regime: few orbits, each resolved and summed
# with its phase. After a single kick no orbit from A reaches B at all; the
# Floquet number there is diffraction off the sharp momentum cut of the source.
rotor = SystemSpec("kicked_rotor", kick_strength=7.0, hbar=0.05)
print("\n n   orbits   semiclassical   Floquet")
for n in (1, 2, 3):
    c = chaos_census(rotor, a, b, n, 1000)
    print(f"{n:2d}  {c.n_orbits:7d}   {c.probability:12.5f}   {region_transfer_exact(rotor, a, b, n):.5f}")
