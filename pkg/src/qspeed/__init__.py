"""Fastest mixed states at fixed purity under unitary evolution.

All states are written in the eigenbasis of the Hamiltonian; a Hamiltonian
is a sorted vector of energies (hbar = 1).
"""

from .errors import *  # noqa: F401,F403
from .linalg import (
    DensityMatrix,
    Hamiltonian,
    OrthonormalBasis,
    bloch_vector,
    gell_mann_basis,
    partial_transpose,
    purity,
    validate_density,
)
from .optimal import (
    OptimalState,
    Regime,
    RegimeParams,
    kkt_check,
    optimal_speed,
    optimal_state,
    regime_params,
    x0_of_gamma,
    x_of_kappa,
)
from .oracle import Ansatz, OracleResult, max_speed_bruteforce, verify_x_structure
from .resources import (
    ProductDecomposition,
    concurrence_optimal_closed,
    concurrence_two_qubit,
    l1_coherence,
    negativity,
    separable_decomposition,
)
from .sampling import SamplerConfig, sample_density, sample_haar_unitary, sample_simplex
from .speed import (
    LindbladSet,
    energy_variance,
    squared_speed,
    squared_speed_bloch,
    squared_speed_commutator,
    squared_speed_open,
    wy_squared_speed,
)

__version__ = "0.1.0"
