"""
实验编排
按种子执行 T 轮、按节拍写轨迹、汇总 P(T) 与达到阈值所需比特
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from compress.compressor import CompressorSpec, make_compressor
from czsd.algorithm import step
from czsd.schedule import Schedule, ScheduleRegime, make_schedule
from czsd.state import Algorithm, init
from graph.topology import (
    Topology,
    build_topology,
    complete_graph,
    path_graph,
    random_geometric_sphere,
    read_edge_list,
    ring_graph,
)
from metrics.trace import Measurer, TraceRecord
from problems import ProblemInstance, make_problem
from runner.config import RunConfig, TopologyConfig, serialize_config
from runner.trace_io import TraceWriter
from utils.errors import AllSeedsDivergedError, NonFiniteEvaluationError, NonFiniteStateError
from utils.save_content import save_content
from utils.utils import get_logger, iteration_stream

logger = get_logger("runner")

INIT_STREAM = 2


# ============== 数据结构 ==============

@dataclass(frozen=True, eq=False)
class Components:
    """一次实验共享的不可变部件"""
    topology: Topology
    problem: ProblemInstance
    compressor: CompressorSpec
    schedule: Schedule


@dataclass
class SeedResult:
    """单个种子的运行结果"""
    index: int
    seed: int
    trace_path: str
    records: list[TraceRecord] = field(repr=False)
    bits_total: int
    iterations_done: int
    diverged: bool = False
    diverged_at: Optional[int] = None
    thresholds: dict[float, Optional[int]] = field(default_factory=dict)
    resamples: int = 0

    @property
    def final_p(self) -> Optional[float]:
        return self.records[-1].p_running if self.records else None

    def to_dict(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "trace": self.trace_path,
            "final_p": self.final_p,
            "bits_total": self.bits_total,
            "iterations_done": self.iterations_done,
            "resamples": self.resamples,
            "diverged": self.diverged,
            "diverged_at": self.diverged_at,
            "bits_to_threshold": {repr(t): b for t, b in self.thresholds.items()},
        }


@dataclass
class RunSummary:
    """多种子汇总"""
    algorithm: str
    out_dir: str
    seeds: list[SeedResult]
    config: dict[str, Any]
    topology: dict[str, Any]
    summary_path: Optional[str] = None

    @property
    def diverged_count(self) -> int:
        return sum(1 for s in self.seeds if s.diverged)

    def aggregate(self) -> dict[str, Any]:
        finals = [s.final_p for s in self.seeds if s.final_p is not None]
        thresholds: dict[str, Any] = {}
        for t in self.config.get("thresholds", []):
            reached = [s.thresholds.get(t) for s in self.seeds if s.thresholds.get(t) is not None]
            thresholds[repr(t)] = {
                "reached": len(reached),
                "mean_bits": float(np.mean(reached)) if reached else None,
            }
        return {
            "final_p_mean": float(np.mean(finals)) if finals else None,
            "final_p_min": float(np.min(finals)) if finals else None,
            "final_p_max": float(np.max(finals)) if finals else None,
            "diverged": self.diverged_count,
            "bits_to_threshold": thresholds,
        }

    def to_dict(self) -> dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "topology": self.topology,
            "seeds": [s.to_dict() for s in self.seeds],
            "aggregate": self.aggregate(),
            "config": self.config,
        }


# ============== 构建 ==============

def make_topology(config: TopologyConfig, n: int) -> Topology:
    """按拓扑配置构建 n 节点拓扑"""
    if config.kind == "geometric":
        return random_geometric_sphere(n, config.angular_threshold, config.seed, config.max_retries)
    if config.kind == "edge_list":
        topology = read_edge_list(config.path, n)
    elif config.kind == "dense":
        topology = build_topology(np.asarray(config.matrix, dtype=float))
    elif config.kind == "path":
        topology = path_graph(n)
    elif config.kind == "ring":
        topology = ring_graph(n)
    else:
        topology = complete_graph(n)
    return topology


def build_components(config: RunConfig) -> Components:
    """由配置构建拓扑、问题、压缩器与调度"""
    problem = make_problem(config.problem.model_dump(exclude_none=True))
    topology = make_topology(config.topology, problem.n)
    compressor = make_compressor(config.compressor.model_dump(exclude_none=True), problem.p)
    params = dict(config.schedule.params)
    if config.schedule.regime == ScheduleRegime.THEOREM1_FIXED.value:
        params.setdefault("T", config.iterations)
    schedule = make_schedule(config.schedule.regime, params, problem.n, problem.p)
    return Components(topology=topology, problem=problem, compressor=compressor, schedule=schedule)


def initial_point(config: RunConfig, n: int, p: int, seed: int) -> np.ndarray:
    """初始点：全零或 x0_scale 倍标准正态"""
    if config.x0 == "zeros":
        return np.zeros((n, p))
    return config.x0_scale * iteration_stream(seed, 0, INIT_STREAM).standard_normal((n, p))


# ============== 运行 ==============

def bits_to_threshold(records: list[TraceRecord], threshold: float) -> Optional[int]:
    """
    P(T) 首次不超过阈值时的累计比特数
    Args:
        records: 非空轨迹
        threshold: P(T) 阈值
    Returns:
        比特数；从未达到时为 None
    """
    if not records:
        raise ValueError("bits_to_threshold needs a non-empty trace")
    for record in records:
        if record.p_running <= threshold:
            return record.bits
    return None


def trace_filename(algorithm: str, index: int, seed: int) -> str:
    return f"trace_{algorithm}_run{index}_seed{seed}.csv"


def run_seed(
    config: RunConfig,
    components: Components,
    index: int,
    seed: int,
    out_dir: Path,
) -> SeedResult:
    """执行单个种子的完整运行并写出轨迹"""
    problem = components.problem
    x0 = initial_point(config, problem.n, problem.p, seed)
    state = init(
        components.topology,
        problem,
        components.compressor,
        components.schedule,
        x0,
        seed,
        algorithm=config.algorithm,
        bit_convention=config.bit_convention,
    )
    measurer = Measurer(state, eval_batch=config.eval_batch, lyapunov=config.lyapunov)
    trace_path = out_dir / trace_filename(config.algorithm, index, seed)
    records: list[TraceRecord] = []
    diverged_at: Optional[int] = None

    start = time.perf_counter()
    with TraceWriter(trace_path) as writer:
        try:
            for k in range(config.iterations):
                if k % config.cadence == 0:
                    wall_ms = (time.perf_counter() - start) * 1000.0 if config.timing else None
                    record = measurer.measure(state, wall_ms)
                    writer.write(record)
                    records.append(record)
                step(state)
        except (NonFiniteStateError, NonFiniteEvaluationError) as e:
            diverged_at = state.k
            logger.warning(f"seed {seed}: {e}")

    result = SeedResult(
        index=index,
        seed=seed,
        trace_path=str(trace_path),
        records=records,
        bits_total=state.bits,
        iterations_done=state.k,
        diverged=diverged_at is not None,
        diverged_at=diverged_at,
        thresholds={t: bits_to_threshold(records, t) for t in config.thresholds} if records else {},
        resamples=components.topology.resamples,
    )
    logger.info(f"seed {seed} done: k={state.k}, P={result.final_p}, bits={state.bits}")
    return result


def run(config: RunConfig, out_dir: Optional[Union[str, Path]] = None) -> RunSummary:
    """
    执行配置中的所有种子
    Args:
        config: 运行配置
        out_dir: 输出目录，默认 config.out
    Returns:
        RunSummary；所有种子都发散时在写出摘要后抛 AllSeedsDivergedError
    """
    out = Path(out_dir if out_dir is not None else config.out)
    out.mkdir(parents=True, exist_ok=True)
    components = build_components(config)
    if components.topology.resamples:
        logger.info(f"topology needed {components.topology.resamples} resample(s)")

    jobs = list(enumerate(config.seeds))
    if config.workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda job: run_seed(config, components, job[0], job[1], out), jobs))
    else:
        results = [run_seed(config, components, index, seed, out) for index, seed in jobs]

    topology = components.topology
    summary = RunSummary(
        algorithm=config.algorithm,
        out_dir=str(out),
        seeds=results,
        config=serialize_config(config),
        topology={
            "n": topology.n,
            "edges": topology.edge_count,
            "spectral_radius": topology.spectral_radius,
            "fiedler": topology.fiedler,
            "resamples": topology.resamples,
        },
    )
    summary.summary_path = str(out / f"summary_{config.algorithm}.json")
    save_content(summary.summary_path, summary.to_dict())

    if summary.diverged_count == len(results):
        raise AllSeedsDivergedError(f"all {len(results)} seed(s) diverged; summary at {summary.summary_path}")
    return summary


# ============== 对比 ==============

def paired_bits(compressed: RunSummary, baseline: RunSummary, threshold: float) -> dict[str, Any]:
    """只在两种算法都达到阈值的种子上求平均比特，另记录各自达到阈值的种子数"""
    c_all = [s.thresholds.get(threshold) for s in compressed.seeds]
    b_all = [s.thresholds.get(threshold) for s in baseline.seeds]
    pairs = [(c, b) for c, b in zip(c_all, b_all) if c is not None and b is not None]
    c_bits = float(np.mean([c for c, _ in pairs])) if pairs else None
    b_bits = float(np.mean([b for _, b in pairs])) if pairs else None
    return {
        "compressed_bits": c_bits,
        "baseline_bits": b_bits,
        "ratio": b_bits / c_bits if c_bits and b_bits is not None else None,
        "paired_seeds": len(pairs),
        "compressed_reached": sum(1 for c in c_all if c is not None),
        "baseline_reached": sum(1 for b in b_all if b is not None),
    }


def compare(config: RunConfig, out_dir: Optional[Union[str, Path]] = None) -> dict[str, Any]:
    """
    同一配置与种子下对比 CZSD 与 ZSD-PD，写出 comparison.json
    Returns:
        对比字典：迭代对齐的末值 P(T) 比值，以及各阈值的比特比 (ZSD-PD / CZSD)
    """
    out = Path(out_dir if out_dir is not None else config.out)
    compressed_algo = config.algorithm if config.algorithm != Algorithm.ZSDPD.value else Algorithm.CZSD.value
    compressed = run(config.model_copy(update={"algorithm": compressed_algo}), out / compressed_algo)
    baseline = run(config.model_copy(update={"algorithm": Algorithm.ZSDPD.value}), out / Algorithm.ZSDPD.value)

    per_threshold: dict[str, Any] = {}
    loosest_common: Optional[float] = None
    for t in config.thresholds:
        row = paired_bits(compressed, baseline, t)
        per_threshold[repr(t)] = row
        # thresholds 已按从松到紧排序
        if row["ratio"] is not None and loosest_common is None:
            loosest_common = t

    c_final = compressed.aggregate()["final_p_mean"]
    b_final = baseline.aggregate()["final_p_mean"]
    result = {
        "compressed": compressed_algo,
        "baseline": Algorithm.ZSDPD.value,
        "final_p": {"compressed": c_final, "baseline": b_final,
                    "ratio": c_final / b_final if c_final is not None and b_final else None},
        "bits_to_threshold": per_threshold,
        "loosest_common_threshold": loosest_common,
        "loosest_common_ratio": per_threshold[repr(loosest_common)]["ratio"] if loosest_common is not None else None,
        "summaries": {"compressed": compressed.summary_path, "baseline": baseline.summary_path},
    }
    save_content(str(out / "comparison.json"), result)
    return result
