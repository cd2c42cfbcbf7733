from metrics.lyapunov import LyapunovComponents, lyapunov_components
from metrics.trace import (
    TRACE_COLUMNS,
    TraceRecord,
    ConsensusError,
    consensus_error,
    RunningMin,
    p_metric_update,
    Measurer,
)

__all__ = [
    "LyapunovComponents",
    "lyapunov_components",
    "TRACE_COLUMNS",
    "TraceRecord",
    "ConsensusError",
    "consensus_error",
    "RunningMin",
    "p_metric_update",
    "Measurer",
]
