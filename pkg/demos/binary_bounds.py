r"""
Upper bounds for two-outcome tasks
==================================

For a two-outcome task the gain over a Bloch ball of radius 1/2 is bounded in terms
of the standard robustness. The form scaled by ``(R_S + 1)^2`` fails for some tasks,
for instance a y rotation read out in z with probe ``|+>``. The form scaled by
``(2 R_S + 1)^2`` holds.
"""

import numpy as np

from fisherwit import BlochBall, EstimationTask, n_c, nc_upper_bound_binary, unitary_family
from fisherwit.linalg import PAULI_Y

F = BlochBall(0.5)
task = EstimationTask(unitary_family(PAULI_Y / 2), [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
plus = np.full((2, 2), 0.5)
b = nc_upper_bound_binary(task, plus, F)
print(f"N_C = {n_c(task, plus, F).n_value:.6f}")
print(f"(R_S + 1)^2 bound = {b.tight:.6f}, (2 R_S + 1)^2 bound = {b.corrected:.6f}, R_S = {b.standard_robustness:.3f}")
