"""thermoflux: steady-state heat transport through a harmonic mode with
one- and two-photon thermal dissipation, plus the auxiliary-TLS scheme
that engineers such dissipation."""

from .fock import BathSpec, FockSpace, ModelConfig, annihilation, creation, number_operator, thermal_occupation
from .lindblad import (
    ChannelRates,
    apply_channel_dissipator,
    apply_dissipator,
    apply_liouvillian,
    bath_dissipator,
    channel_dissipator,
    check_density_matrix,
    dissipator,
    hamiltonian_superoperator,
    liouvillian,
    trace_functional,
    unvectorize,
    vectorize,
)
from .steady import (
    CutoffExceeded,
    DegenerateSteadyState,
    NonConvergent,
    PopulationVector,
    Sector,
    SteadyStateResult,
    convergence_check,
    default_sector,
    nullity,
    rate_generator,
    solve_rate_equation,
    solve_steady,
    steady_state,
)
from .transport import (
    CrossCheckFailed,
    RectificationResult,
    TransportResult,
    fock_moments,
    forward_reverse,
    heat_current,
    heat_current_channels,
    population_heat_current,
    rectification,
    transport_result,
)
from .analytic import (
    NoCoupling,
    NonLinearConfig,
    NoPositiveRoot,
    SemiClassicalCoefficients,
    TwoPhotonMoments,
    linear_current,
    linear_occupation,
    semiclassical_current,
    semiclassical_occupation,
    two_photon_current,
    two_photon_moments,
    two_photon_ratio,
    weak_coupling_current,
)
from .tls_reduction import (
    DimensionTooLarge,
    EffectiveBathConfig,
    EffectiveRates,
    FilterMode,
    InvertedRates,
    NegativeRate,
    ResonantFrequencies,
    TlsHoParams,
    ZeroFrequency,
    bath_response,
    composite_liouvillian,
    composite_steady_state,
    effective_heat_current,
    effective_liouvillian,
    effective_rates,
    filtered_rates,
    reduced_ho_liouvillian,
    tls_forward_reverse,
    tls_polarization,
    trace_out_tls,
    two_bath_effective_config,
)

__version__ = "0.1.0"
