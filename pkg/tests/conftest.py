from typing import Any, Optional

import numpy as np
from compress import CompressorSpec, CompressorKind
from czsd import init, make_schedule
from graph import Topology, ring_graph
from problems import ProblemConstants, ProblemInstance, ProblemKind, pl_quadratic_make


class NoGradientProblem(ProblemInstance):
    """只能求值、没有闭式梯度的问题（用于错误路径）"""

    kind = ProblemKind.DETERMINISTIC_QUADRATIC

    def __init__(self, n: int = 3, p: int = 2):
        self.n, self.p = n, p
        self.constants = ProblemConstants()
        self.f_star = None

    @property
    def has_analytic_gradient(self) -> bool:
        return False

    def draw(self, i: int, rng: np.random.Generator) -> Any:
        return None

    def evaluate(self, i: int, x: np.ndarray, xi: Any) -> float:
        return float(np.sum(np.abs(x)))


def dithered(p: int, bits: int = 2) -> CompressorSpec:
    return CompressorSpec(CompressorKind.DITHERED, p, bits=bits)


def make_state(
    topology: Optional[Topology] = None,
    problem: Optional[ProblemInstance] = None,
    compressor: Optional[CompressorSpec] = None,
    regime: str = "table1",
    params: Optional[dict] = None,
    seed: int = 0,
    algorithm: str = "czsd",
    x0: Optional[np.ndarray] = None,
    bit_convention: str = "broadcast",
):
    """小规模运行状态，缺省为 4 节点环上的零异质二次型"""
    topology = topology if topology is not None else ring_graph(4)
    problem = problem if problem is not None else pl_quadratic_make(topology.n, 3)
    compressor = compressor if compressor is not None else dithered(problem.p)
    schedule = make_schedule(regime, params, topology.n, problem.p)
    if x0 is None:
        x0 = np.random.default_rng(1234 + seed).standard_normal((topology.n, problem.p))
    return init(topology, problem, compressor, schedule, x0, seed, algorithm=algorithm, bit_convention=bit_convention)


class ConstantProblem(ProblemInstance):
    """处处为常数的代价，零阶估计恒为 0"""

    kind = ProblemKind.DETERMINISTIC_QUADRATIC

    def __init__(self, n: int = 4, p: int = 3, value: float = 1.5):
        self.n, self.p = n, p
        self.value = value
        self.constants = ProblemConstants(ell=0.0, nu=None, sigma1=0.0, sigma2=0.0)
        self.f_star = value

    @property
    def deterministic(self) -> bool:
        return True

    def draw(self, i: int, rng: np.random.Generator) -> Any:
        return None

    def evaluate(self, i: int, x: np.ndarray, xi: Any) -> float:
        return self.value

    def gradient(self, i: int, x: np.ndarray, xi: Any) -> np.ndarray:
        return np.zeros(self.p)
