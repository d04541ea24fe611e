"""MIMO relay channel rate bounds and achievable-rate schemes.

Thin package wrapper around the native module: all types and operations
live in C++; this package re-exports them.
"""

from . import _relaylab as _native
from ._relaylab import (
    AntennaConfig,
    CdfPoint,
    ChannelRealization,
    ExperimentResult,
    ExperimentSpec,
    PowerConstraints,
    SchemeValue,
    SweepResult,
    SweepRow,
    Topology,
    TopologyDegenerateError,
    TrialFailure,
    db_to_power,
    empirical_cdf,
    evaluate_scheme,
    generate_realization,
    known_schemes,
    position_sweep,
    realization_checksum,
    run,
    scheme_uses_bandwidth,
)

__version__ = _native.__version__

__all__ = [
    "AntennaConfig",
    "CdfPoint",
    "ChannelRealization",
    "ExperimentResult",
    "ExperimentSpec",
    "PowerConstraints",
    "SchemeValue",
    "SweepResult",
    "SweepRow",
    "Topology",
    "TopologyDegenerateError",
    "TrialFailure",
    "db_to_power",
    "empirical_cdf",
    "evaluate_scheme",
    "generate_realization",
    "known_schemes",
    "position_sweep",
    "realization_checksum",
    "run",
    "scheme_uses_bandwidth",
]
