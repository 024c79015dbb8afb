"""Numerical laboratory for anomalous relaxation (quantum Mpemba) effects
and their robustness to state-preparation errors.

Two mechanisms are implemented end to end:

* open-system relaxation speed-up by removing a state's overlap with the
  slowest decaying mode of a GKSL generator (collective-spin and damped
  oscillator models), and
* symmetry restoration in charge-conserving random unitary circuits,
  tracked by the entanglement asymmetry of small subsystems.

See the ``cli`` module (``mpemba-lab`` entry point) for the experiment
families and their CSV artifacts.
"""

__version__ = "0.1.0"

from .linalg import (
    DefectiveMatrixError,
    devectorize,
    eig_general,
    haar_unitary,
    hs_inner,
    sandwich_superoperator,
    vectorize,
)
from .liouville import (
    InvalidGeneratorError,
    LindbladModel,
    NonUniqueSteadyStateError,
    SpectralDecomposition,
    build_liouvillian,
    decompose,
    overlap_coefficients,
    propagate,
    relaxation_timescales,
)
from .metrics import (
    DegenerateBaselineError,
    HorizonExceededError,
    SweepResult,
    ThermalizationCurve,
    distance_from_coefficients,
    distance_profile,
    hs_distance,
    relative_speedup,
    run_epsilon_sweep,
    thermalization_time,
)
from .models import (
    DickeParams,
    OscillatorParams,
    dicke_model,
    oscillator_model,
    spin_operators,
)
from .ruc import (
    ChargeSectorTable,
    CircuitState,
    RucTrajectory,
    apply_brickwork_layer,
    charge_decohere,
    dimension_sweep,
    entanglement_asymmetry,
    reduced_density,
    run_ruc_experiment,
    sample_u1_gate,
    sector_overlaps,
    tilted_ferromagnet,
)
from .stateprep import (
    MethodInapplicableError,
    OrthogonalizingRotation,
    PreparationError,
    apply_rotation,
    build_rotation,
    diagonalizing_unitary,
    perturb_unitary,
    random_pure_state,
    random_state_vector,
)

__all__ = [
    "__version__",
    # linalg
    "DefectiveMatrixError",
    "vectorize",
    "devectorize",
    "sandwich_superoperator",
    "hs_inner",
    "haar_unitary",
    "eig_general",
    # liouville
    "LindbladModel",
    "SpectralDecomposition",
    "InvalidGeneratorError",
    "NonUniqueSteadyStateError",
    "build_liouvillian",
    "decompose",
    "overlap_coefficients",
    "propagate",
    "relaxation_timescales",
    # models
    "DickeParams",
    "OscillatorParams",
    "spin_operators",
    "dicke_model",
    "oscillator_model",
    # stateprep
    "MethodInapplicableError",
    "OrthogonalizingRotation",
    "PreparationError",
    "random_state_vector",
    "random_pure_state",
    "build_rotation",
    "apply_rotation",
    "diagonalizing_unitary",
    "perturb_unitary",
    # metrics
    "HorizonExceededError",
    "DegenerateBaselineError",
    "ThermalizationCurve",
    "SweepResult",
    "hs_distance",
    "distance_from_coefficients",
    "distance_profile",
    "thermalization_time",
    "relative_speedup",
    "run_epsilon_sweep",
    # ruc
    "CircuitState",
    "ChargeSectorTable",
    "RucTrajectory",
    "sample_u1_gate",
    "apply_brickwork_layer",
    "tilted_ferromagnet",
    "reduced_density",
    "charge_decohere",
    "entanglement_asymmetry",
    "sector_overlaps",
    "run_ruc_experiment",
    "dimension_sweep",
]
