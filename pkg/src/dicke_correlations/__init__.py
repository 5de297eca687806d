"""Quantum correlations of two atoms decaying into a common vacuum field.

Closed-form collective dynamics, three correlation measures (concurrence,
trace-distance discord, local quantum uncertainty) and numerical oracles
for all of them.
"""
from .dynamics import (
    AtomPairGeometry,
    CollectiveParams,
    CollectiveState,
    collective_damping_ratio,
    collective_params,
    collective_to_product,
    dipole_dipole_shift,
    evolve_closed_form,
    integrate_rk4,
    integrate_rk4_trajectory,
    lindblad_rhs,
    product_to_collective,
)
from .estimators import CorrelationTransformer, DickeEvolution
from .exceptions import (
    DickeCorrelationError,
    InvalidStateError,
    NonHermitian,
    TraceNotOne,
    NotPositiveSemidefinite,
    NotXState,
    NegativeDiscriminant,
    ResultNotPSD,
    DegenerateBlock,
    ZeroSeparation,
    GammaOutOfRange,
    BudgetTooSmall,
    ConfigError,
    LargeShiftWarning,
)
from .measures import (
    LocalObservable,
    TQDBudget,
    WMatrix,
    concurrence,
    lqu,
    lqu_bruteforce,
    skew_information,
    tqd_bruteforce,
    tqd_x,
    w_matrix,
    w_matrix_x,
)
from .scenarios import (
    CorrelationReport,
    Scenario,
    ScenarioKind,
    correlations_bell_zero_double,
    correlations_near_zero_separation,
    correlations_single_excitation,
    correlations_symmetric,
    state_bell_zero_double,
    state_single_excitation,
    state_symmetric,
)
from .states import (
    DensityMatrix,
    FanoBlochTensor,
    XSpectralData,
    XState,
    fano_bloch_decompose,
    hermitian_sqrt_generic,
    remove_x_phases,
    sqrt_fano_bloch,
    sqrt_x,
    validate_density,
    x_spectrum,
)

__version__ = "0.1.0"
