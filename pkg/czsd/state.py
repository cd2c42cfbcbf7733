"""
算法运行状态
所有 agent 的向量按行堆叠为 n×p 矩阵；AgentState 是单个 agent 的只读视图
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from compress.compressor import FLOAT_BITS, CompressorSpec, compress_rows, identity_compressor
from czsd.schedule import Schedule
from graph.topology import Topology
from problems.base import ProblemInstance
from utils.errors import DimensionMismatchError, DisconnectedError, InvalidParamsError
from utils.utils import agent_streams, get_logger

logger = get_logger("czsd")


class Algorithm(Enum):
    """算法"""
    CZSD = "czsd"                      # 压缩通信
    ZSDPD = "zsdpd"                    # 精确通信基线
    CZSD_IDENTITY = "czsd_identity"    # 恒等压缩器下的 CZSD


class BitConvention(Enum):
    """比特计数约定"""
    BROADCAST = "broadcast"    # 每个 agent 每轮广播一次
    PER_EDGE = "per_edge"      # 每条有向邻居链路各计一次


@dataclass(frozen=True, eq=False)
class AgentState:
    """单个 agent 的 (x, v, y, z, q)"""
    x: np.ndarray
    v: np.ndarray
    y: np.ndarray
    z: np.ndarray
    q: np.ndarray


@dataclass(eq=False)
class RunState:
    """一次运行的完整状态，两步之间由调用方独占"""
    topology: Topology
    problem: ProblemInstance
    compressor: CompressorSpec
    schedule: Schedule
    algorithm: Algorithm
    seed: int
    x: np.ndarray
    v: np.ndarray
    y: np.ndarray
    z: np.ndarray
    q: np.ndarray
    rngs: list[np.random.Generator] = field(repr=False)
    bit_convention: BitConvention = BitConvention.BROADCAST
    k: int = 0
    bits: int = 0
    last_gz: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.topology.n

    @property
    def p(self) -> int:
        return self.problem.p

    @property
    def omega(self) -> float:
        return self.schedule.omega

    @property
    def x_bar(self) -> np.ndarray:
        return self.x.mean(axis=0)

    def agent(self, i: int) -> AgentState:
        return AgentState(
            x=self.x[i].copy(), v=self.v[i].copy(), y=self.y[i].copy(),
            z=self.z[i].copy(), q=self.q[i].copy(),
        )

    def messages_per_round(self) -> int:
        if self.bit_convention is BitConvention.PER_EDGE:
            return self.topology.neighbor_messages
        return self.n

    def bits_per_round(self) -> int:
        """本轮通信比特数"""
        if self.algorithm is Algorithm.ZSDPD:
            per_vector = FLOAT_BITS * self.p
        else:
            per_vector = self.compressor.bits_per_vector()
        return self.messages_per_round() * per_vector


def init(
    topology: Topology,
    problem: ProblemInstance,
    compressor: CompressorSpec,
    schedule: Schedule,
    x0: np.ndarray,
    seed: int,
    algorithm: Algorithm | str = Algorithm.CZSD,
    bit_convention: BitConvention | str = BitConvention.BROADCAST,
) -> RunState:
    """
    初始化：v = y = z = 0，q_0 = C(x_0)，每个 agent 一个独立随机子流
    Args:
        topology: 连通拓扑
        problem: 问题实例
        compressor: 压缩器（czsd_identity 时强制为恒等）
        schedule: 参数调度
        x0: n×p 初始点
        seed: 运行种子
        algorithm: czsd / zsdpd / czsd_identity
        bit_convention: broadcast / per_edge
    """
    algorithm = Algorithm(algorithm) if not isinstance(algorithm, Algorithm) else algorithm
    bit_convention = BitConvention(bit_convention) if not isinstance(bit_convention, BitConvention) else bit_convention

    if not topology.connected:
        raise DisconnectedError(f"topology with n={topology.n} is not connected (lambda_2={topology.fiedler:.3e})")
    n, p = topology.n, problem.p
    x0 = np.array(x0, dtype=float)
    if problem.n != n:
        raise DimensionMismatchError(f"problem has n={problem.n} agents but topology has n={n}")
    if x0.shape != (n, p):
        raise DimensionMismatchError(f"x0 must have shape ({n}, {p}), got {x0.shape}")
    if compressor.p != p:
        raise DimensionMismatchError(f"compressor dimension {compressor.p} differs from problem dimension {p}")
    if schedule.n != n or schedule.p != p:
        raise DimensionMismatchError(f"schedule built for (n={schedule.n}, p={schedule.p}), run is (n={n}, p={p})")
    if not np.all(np.isfinite(x0)):
        raise InvalidParamsError("x0 contains non-finite entries")

    if algorithm is Algorithm.CZSD_IDENTITY:
        compressor = identity_compressor(p)
    if algorithm is not Algorithm.ZSDPD and schedule.omega * compressor.r > 1.0:
        logger.warning(
            f"omega * r = {schedule.omega * compressor.r:.4g} > 1 (omega={schedule.omega}, r={compressor.r:.4g}); "
            "outside the admissible range"
        )

    rngs = agent_streams(seed, n)
    zeros = np.zeros((n, p))
    if algorithm is Algorithm.ZSDPD:
        q0 = zeros.copy()
    else:
        q0 = compress_rows(compressor, x0, rngs)

    return RunState(
        topology=topology,
        problem=problem,
        compressor=compressor,
        schedule=schedule,
        algorithm=algorithm,
        seed=seed,
        x=x0,
        v=zeros.copy(),
        y=zeros.copy(),
        z=zeros.copy(),
        q=q0,
        rngs=rngs,
        bit_convention=bit_convention,
    )
