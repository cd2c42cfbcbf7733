from czsd.schedule import ScheduleRegime, Schedule, make_schedule
from czsd.state import Algorithm, BitConvention, AgentState, RunState, init
from czsd.algorithm import (
    DIVERGENCE_LIMIT,
    czsd_step,
    zsdpd_step,
    step,
    state_scale,
    dual_sum_residual,
    memory_residual,
)

__all__ = [
    "ScheduleRegime",
    "Schedule",
    "make_schedule",
    "Algorithm",
    "BitConvention",
    "AgentState",
    "RunState",
    "init",
    "DIVERGENCE_LIMIT",
    "czsd_step",
    "zsdpd_step",
    "step",
    "state_scale",
    "dual_sum_residual",
    "memory_residual",
]
