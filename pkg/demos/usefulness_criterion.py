r"""
Deciding whether resource can help with phase estimation
========================================================

Given a generator ``G``, a semidefinite program bounds the best quantum Fisher
information reachable by free states. If the spread of ``G``'s spectrum squared
beats that bound, some resourceful state provably outperforms all free ones.
"""

import numpy as np

from fisherwit import BlochBall, Incoherent, Singleton, criterion_sdp
from fisherwit.linalg import PAULI_X, PAULI_Z, projector

cases = [
    ("sigma_z, free = {|0>}", PAULI_Z, Singleton(projector([1, 0]))),
    ("sigma_z, free = diagonal states", PAULI_Z, Incoherent(2)),
    ("sigma_x, free = diagonal states", PAULI_X, Incoherent(2)),
    ("sigma_z, free = all states", PAULI_Z, BlochBall(1.0)),
    ("diag(1,0,0), free = qutrit diagonals", np.diag([1.0, 0.0, 0.0]), Incoherent(3)),
]
for label, g, F in cases:
    res = criterion_sdp(g, F)
    print(f"{label:40s} s*={res.s_star:8.4f}  gap^2={res.gap_sq:.1f}  {res.verdict}")
