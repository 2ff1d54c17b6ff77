r"""
Witnessing a resourceful channel
================================

Free operations here are the identity, complete dephasing and a bit flip. The game
sends ``|+>`` or ``|->`` with equal odds and asks for a guess in the computational
basis. Free channels win half the time, the Hadamard gate always wins, and the
Fisher-information gap of the probe trajectory reports that difference.
"""

import numpy as np

from fisherwit import channel_nc_gap, op_psucc
from fisherwit.operations import hadamard_channel, hadamard_game, mix_channels

game = hadamard_game()
print("free success probabilities:", [round(op_psucc(o, game), 6) for o in game.free_ops])
for t in np.linspace(0, 1, 6):
    ch = mix_channels([game.free_ops[1], hadamard_channel()], [1 - t, t])
    res = channel_nc_gap(ch, game)
    print(f"weight on Hadamard {t:.1f}: p_succ={res.p_target:.3f}  gap={res.gap:.4f}")
