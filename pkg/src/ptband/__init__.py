"""Exactly solvable non-Hermitian PT-symmetric two-band ring: Bloch modes, ladder algebra and wave-packet dynamics."""

from .algebra import (
    CommutatorReport,
    ModeDecomposition,
    check_canonical,
    check_quasi_canonical,
    decompose,
    from_coefficients,
    reconstruct,
)
from .bloch import (
    BlochBasis,
    BlochMode,
    ExceptionalModeError,
    band_energy,
    bloch_basis,
    momentum_grid,
    solve_bloch,
    spectrum_summary,
    verify_jordan_block,
)
from .counterpart import CounterpartFamily, CounterpartParams, NoCounterpartError, equivalence_map
from .dynamics import (
    ConditioningWarning,
    NormSeries,
    dirac_norm_series_closed,
    evolve_direct,
    evolve_spectral,
    fluctuation_bound,
    norm_series,
)
from .estimators import BlochBasisTransformer, DirectPropagator, SpectralPropagator
from .model import (
    Boundary,
    ModelParams,
    build_hermitian_counterpart,
    build_nonhermitian,
    uniform_ring,
)
from .wavepacket import (
    WavePacketSpec,
    build_gaussian,
    characteristic_times,
    circling_period,
    packet_decomposition,
    packet_metrics,
    revival_time,
)

__version__ = "0.1.0"
