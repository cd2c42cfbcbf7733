from runner.config import (
    RunConfig,
    ProblemConfig,
    TopologyConfig,
    CompressorConfig,
    ScheduleConfig,
    parse_config,
    serialize_config,
    load_config,
    apply_overrides,
)
from runner.trace_io import TraceWriter, read_trace
from runner.run import (
    Components,
    SeedResult,
    RunSummary,
    build_components,
    make_topology,
    initial_point,
    bits_to_threshold,
    paired_bits,
    run_seed,
    run,
    compare,
)

__all__ = [
    "RunConfig",
    "ProblemConfig",
    "TopologyConfig",
    "CompressorConfig",
    "ScheduleConfig",
    "parse_config",
    "serialize_config",
    "load_config",
    "apply_overrides",
    "TraceWriter",
    "read_trace",
    "Components",
    "SeedResult",
    "RunSummary",
    "build_components",
    "make_topology",
    "initial_point",
    "bits_to_threshold",
    "paired_bits",
    "run_seed",
    "run",
    "compare",
]
