"""Fisher-information witnesses of quantum resources in convex resource theories."""

from .criterion import CriterionResult, certify_useful, criterion_sdp, generator_gap
from .errors import FisherWitError, InfiniteRobustness, NumericalFailure, Unsupported
from .fisher import (binary_cfi, classical_fisher, quantum_fisher, quantum_fisher_unitary, sld,
                     quantum_fisher_family)
from .freesets import (BlochBall, FreeSet, Incoherent, PolytopeHull, Separable, Singleton, hemisphere,
                       max_cfi_over_free, max_qfi_over_free, min_linear_over_free)
from .operations import OperationGame, channel_nc_gap, op_psucc
from .robustness import Witness, generalized_robustness, optimal_witness, standard_robustness
from .sdp import SdpProblem, solve_sdp
from .states import (ChannelFamily, EstimationTask, KrausChannel, mixture_family, unitary_family,
                     validate_povm, validate_state)
from .witness import (WitnessReport, build_discrimination_task, existence_task, n_c, n_q, nc_from_witness,
                      nc_upper_bound_binary, omega)

__all__ = [
    "BlochBall", "ChannelFamily", "CriterionResult", "EstimationTask", "FisherWitError", "FreeSet",
    "Incoherent", "InfiniteRobustness", "KrausChannel", "NumericalFailure", "OperationGame", "PolytopeHull",
    "SdpProblem", "Separable", "Singleton", "Unsupported", "Witness", "WitnessReport", "binary_cfi",
    "build_discrimination_task", "certify_useful", "channel_nc_gap", "classical_fisher", "criterion_sdp",
    "existence_task", "generalized_robustness", "generator_gap", "hemisphere", "max_cfi_over_free",
    "max_qfi_over_free", "min_linear_over_free", "mixture_family", "n_c", "n_q", "nc_from_witness",
    "nc_upper_bound_binary", "omega", "op_psucc", "optimal_witness", "quantum_fisher",
    "quantum_fisher_family", "quantum_fisher_unitary", "sld", "solve_sdp", "standard_robustness",
    "unitary_family", "validate_povm", "validate_state",
]
