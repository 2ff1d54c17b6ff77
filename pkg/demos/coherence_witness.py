r"""
Witnessing coherence with a Fisher-information task
===================================================

Incoherent qubit states are the diagonal ones. The generalized robustness of a
state measures how much noise must be mixed in before it becomes diagonal, and its
optimal witness can be turned into a parameter estimation task. On that task the
probe gains exactly ``R^2`` Fisher information over the best incoherent state,
because the incoherent states form an affine slice of state space.
"""

from fisherwit import BlochBall, Incoherent, generalized_robustness, nc_from_witness
from fisherwit.linalg import from_bloch

F = Incoherent(2)

for bloch in ([1.0, 0.0, 0.0], [0.6, 0.0, 0.8], [0.3, 0.3, 0.1], [0.0, 0.0, 1.0]):
    rho = from_bloch(bloch)
    r, _ = generalized_robustness(rho, F)
    rep = nc_from_witness(rho, F)
    print(f"bloch={bloch}  R={r:.4f}  N_C={rep.n_value:.6f}  R^2={r * r:.6f}  flags={rep.flags}")

######################################################################
# The same construction for a Bloch-ball free set only pins the gain between
# ``R^2`` and ``R^2 + 2R``.

rep = nc_from_witness(from_bloch([0.0, 0.0, 1.0]), BlochBall(0.5))
lo, hi = rep.bounds
print(f"ball(1/2), |0>: N_C={rep.n_value:.6f} in [{lo:.6f}, {hi:.6f}]")
