# Two sites, the upper one initially occupied, each dephasing at rate 0.5.
# Without coupling nothing moves. A resonant coupling J lets population
# reach the lower site, and dephasing then makes the transfer irreversible.

import numpy as np

from cohertherm import DensityMatrix
from cohertherm.opensystem import (
    LindbladModel,
    ResonantCoupling,
    build_resonant_hamiltonian,
    dephasing_operators,
    entropy_trace,
    evolve_lindblad,
    write_snapshot_csv,
)

gamma = 0.5
start = DensityMatrix.pure([1.0, 0.0])

print("  J   <pop_target>   final pop_target   final entropy")
for j in (0.0, 0.25, 0.5, 1.0, 2.0):
    h = build_resonant_hamiltonian(ResonantCoupling(2, [[0, j], [j, 0]], site_energies=(1.0, 0.0)))
    model = LindbladModel(h, tuple(dephasing_operators(2)), (gamma, gamma))
    snaps = evolve_lindblad(start, model, 10.0, 0.01)
    pops = np.array([rho.populations()[1] for _, rho in snaps])
    avg = np.sum(0.5 * (pops[1:] + pops[:-1])) * 0.01 / 10.0
    s = entropy_trace(snaps)[-1][1]
    print(f"{j:4.2f}   {avg:11.4f}   {pops[-1]:16.4f}   {s:13.4f}")
    if j == 1.0:
        write_snapshot_csv(snaps[::10], "lindblad_snapshots.csv")

# Pure dephasing of |+> on its own: the entropy climbs to ln 2 and stays there.
plus = DensityMatrix.pure(np.array([1.0, 1.0]) / np.sqrt(2))
deph = LindbladModel(np.zeros((2, 2)), (np.diag([1.0, -1.0]),), (gamma,))
trace = entropy_trace(evolve_lindblad(plus, deph, 20.0, 0.01, snapshot_every=200))
print("\n".join(f"t={t:5.1f}  S={s:.6f}" for t, s in trace))
print(f"ln 2 = {np.log(2):.6f}")
