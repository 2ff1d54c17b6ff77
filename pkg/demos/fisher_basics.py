r"""
Classical and quantum Fisher information of a rotated qubit
===========================================================

A qubit is rotated about the y axis by ``exp(-i theta sigma_y / 2)`` and read out
with a noisy two-outcome measurement that reports outcome 0 for ``|0>`` and flips a
fair coin for ``|1>``. We compute how much information about ``theta`` that
measurement extracts (the classical Fisher information) and compare it with the
best any measurement could do (the quantum Fisher information).
"""

import math

import numpy as np

from fisherwit import classical_fisher, quantum_fisher_family
from fisherwit.linalg import projector
from fisherwit.reproduce import worked_example_closed_form, worked_example_task

task = worked_example_task()

######################################################################
# Probes on the x-z great circle, ``cos(t/2)|0> + sin(t/2)|1>``. The measured
# information follows a simple closed form, which we print next to it.

print(f"{'t':>8} {'F_C':>10} {'closed form':>12} {'F_Q':>6}")
for t in np.linspace(0, math.pi, 7):
    probe = projector([math.cos(t / 2), math.sin(t / 2)])
    fc = classical_fisher(task, probe)
    fq = quantum_fisher_family(task.family, probe)
    print(f"{t:8.4f} {fc:10.6f} {worked_example_closed_form(t):12.6f} {fq:6.3f}")

######################################################################
# Every pure probe on that circle has quantum Fisher information 1, but the noisy
# measurement recovers at most half of it, and nothing at all from ``|1>``.
