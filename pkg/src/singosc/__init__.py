"""Transition probabilities of the quantum singular oscillator with a
time-dependent frequency."""

from .errors import (
    AsymptoteNotReached,
    CollapseError,
    LeakageError,
    NormDriftError,
    PoleError,
    RangeError,
    SingularOscillatorError,
    SolverError,
    TruncationError,
    WronskianViolation,
)
from .oracle import FockVector, OracleReport, compare, extract_probabilities, initial_state, propagate
from .reflection import (
    FrequencyProfile,
    ReflectionResult,
    SolverSettings,
    compute_rho,
    load_profile_table,
    rho_sudden,
)
from .special import GammaRatio, gamma_ratio, hyp2f1_terminating, jacobi_p, log_gamma
from .su11 import (
    GeneratorMatrices,
    OscillatorModel,
    build_generators,
    hamiltonian_matrix,
    make_model,
)
from .transitions import (
    TransitionTable,
    adiabatic_invariant_diagnostic,
    adiabatic_invariant_ratio,
    build_table,
    energy_level,
    generating_g0,
    generating_g1,
    transition_probability,
    transition_probability_hypergeometric,
    vacuum_probability,
)

__version__ = "0.1.0"
