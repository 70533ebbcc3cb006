"""qotsim: quantum m-out-of-n oblivious transfer simulator and analysis toolkit.

The package simulates the full protocol between honest or adversarial
parties over an idealized BB84 photon channel, computes the associated
concentration bounds, and verifies correctness and privacy claims by
Monte Carlo experiments checked against exact binomial oracles.
"""

__version__ = "0.1.0"

from .channel import Basis, Photon, RandomSource, encode, measure, random_bit
from .commitment import CheatModel, CommitmentSession
from .params import (
    BoundReport,
    ProtocolParams,
    build_bound_report,
    commitment_attack_bound,
    compute_x,
    correctness_epsilon,
    hoeffding_bound,
    min_N,
    privacy_epsilon,
    smallest_valid_N,
    target_rate,
    validate_params,
)
from .protocol import ChoiceVector, InputBits, Status, TrialOutcome, run_protocol
from .adversary import Strategy, run_with_adversary

__all__ = [
    "Basis",
    "BoundReport",
    "CheatModel",
    "ChoiceVector",
    "CommitmentSession",
    "InputBits",
    "Photon",
    "ProtocolParams",
    "RandomSource",
    "Status",
    "Strategy",
    "TrialOutcome",
    "build_bound_report",
    "commitment_attack_bound",
    "compute_x",
    "correctness_epsilon",
    "encode",
    "hoeffding_bound",
    "measure",
    "min_N",
    "privacy_epsilon",
    "random_bit",
    "run_protocol",
    "run_with_adversary",
    "smallest_valid_N",
    "target_rate",
    "validate_params",
]
