"""Frontends that build optimizer and solver instances for concrete problems."""

from .binary import binlp_build, qubo_build
from .noise import pswn_build
from .lattice import (
    HnfResult,
    LatticeInstance,
    cvp_build,
    hnf,
    sis_build,
    smallest_solution_build,
    svp_build,
    svp_coeff_bound,
)
from .ntru import (
    NtruAttack,
    NtruKey,
    NtruParams,
    ntru_attack_system,
    ntru_keygen,
    ntru_min_weight,
    ntru_witness,
)

__all__ = [
    "binlp_build",
    "qubo_build",
    "pswn_build",
    "HnfResult",
    "LatticeInstance",
    "cvp_build",
    "hnf",
    "sis_build",
    "smallest_solution_build",
    "svp_build",
    "svp_coeff_bound",
    "NtruAttack",
    "NtruKey",
    "NtruParams",
    "ntru_attack_system",
    "ntru_keygen",
    "ntru_min_weight",
    "ntru_witness",
]
