"""Time-lag estimation between two series through visibility-graph distances."""

from .lagscan import (
    LagResult,
    LagScanConfig,
    WindowSweepResult,
    distance_curve_csv,
    estimate_lag,
    parse_lags,
    window_sweep,
)
from .timeseries import (
    Carrier,
    ImputationMethod,
    MissingTarget,
    ParseError,
    SeriesError,
    ShiftMode,
    SimulationConfig,
    TimeSeries,
    from_csv,
    impute,
    inject_mcar,
    shift,
    simulate_pair,
)
from .visibility import (
    AdjacencyMatrix,
    build_graph,
    build_graph_fast,
    build_graph_reference,
    edge_difference,
    frobenius_distance,
    visible,
)

__version__ = "0.1.0"

__all__ = [
    "AdjacencyMatrix",
    "Carrier",
    "ImputationMethod",
    "LagResult",
    "LagScanConfig",
    "MissingTarget",
    "ParseError",
    "SeriesError",
    "ShiftMode",
    "SimulationConfig",
    "TimeSeries",
    "WindowSweepResult",
    "build_graph",
    "build_graph_fast",
    "build_graph_reference",
    "distance_curve_csv",
    "edge_difference",
    "estimate_lag",
    "frobenius_distance",
    "from_csv",
    "impute",
    "inject_mcar",
    "parse_lags",
    "shift",
    "simulate_pair",
    "visible",
    "window_sweep",
]
