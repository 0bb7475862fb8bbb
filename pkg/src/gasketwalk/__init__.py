"""Coined quantum walks on Sierpinski gaskets.

Build a gasket graph, evolve a walker with the Grover coin and flip-flop
shift, and analyze spreading, limiting distributions, and mixing times, with
dense spectral oracles for verification at small generations.
"""

from .gasket import (
    PERIODIC,
    REFLECTIVE,
    GasketSpec,
    GasketGraph,
    build_gasket,
    contains,
    direction_set,
    vertex_count,
)
from .coinshift import (
    DIRECTIONS,
    DirectionTable,
    ShiftPermutation,
    CoinOperator,
    CorruptStateError,
    build_shift,
    build_coin,
    coin_matrix,
    apply_coin,
    apply_shift,
    opposite,
)
from .evolution import (
    WalkerState,
    ObserverError,
    initial_state,
    step,
    evolve,
    save_checkpoint,
    load_checkpoint,
)
from .observables import (
    ProbabilityField,
    StdDevSample,
    TimeAverage,
    probability,
    stddev,
    time_averaged,
    tvd,
)
from .spectral import (
    DENSE_PORT_CAP,
    DimensionCapError,
    SpectralDecomposition,
    build_dense_unitary,
    spectral_decomposition,
    limiting_distribution,
    exact_time_average,
    empirical_limiting,
)
from .analysis import (
    PowerLawFit,
    ExponentHistogram,
    MixingResult,
    fit_power_law,
    sigma_series,
    sweep_exponents,
    tvd_decay_series,
    scan_mixing_time,
    envelope_prefactor,
    fit_mixing_time,
    mixing_time,
    mixing_scaling,
    classical_walk_series,
)

__version__ = "0.1.0"
