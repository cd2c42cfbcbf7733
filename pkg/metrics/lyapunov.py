"""
Lyapunov 分量诊断
e1 共识误差, e2 对偶项, e3 交叉项, e4 最优性, e5 压缩误差
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from czsd.state import Algorithm, RunState
from graph.topology import build_fm
from utils.errors import RequiresAnalyticGradientError
from utils.utils import iteration_stream

LYAPUNOV_STREAM = 1


@dataclass(frozen=True)
class LyapunovComponents:
    """五个 Lyapunov 分量；e3 可为负，e4 在 f* 未知时为 None，基线算法无 e5"""
    e1: float
    e2: float
    e3: float
    e4: Optional[float]
    e5: Optional[float]

    def as_tuple(self) -> tuple[float, float, float, Optional[float], Optional[float]]:
        return self.e1, self.e2, self.e3, self.e4, self.e5


def lyapunov_components(
    state: RunState,
    fm: Optional[np.ndarray] = None,
    f_star: Optional[float] = None,
    batch: int = 64,
    rng: Optional[np.random.Generator] = None,
) -> LyapunovComponents:
    """
    计算当前迭代 k = state.k 的 e1..e5
    Args:
        state: 运行状态
        fm: F_M 矩阵，默认 build_fm(topology)
        f_star: 最优值（或代理值），默认取 problem.f_star
        batch: 随机问题中 g0 与 f(x̄) 的评估批次
        rng: 评估随机流，默认按 (seed, k) 派生的固定流
    Returns:
        LyapunovComponents
    """
    problem = state.problem
    if not problem.has_analytic_gradient:
        raise RequiresAnalyticGradientError(f"{problem.kind.value} has no analytic gradient for g0")

    k = state.k
    topology = state.topology
    fm = build_fm(topology) if fm is None else fm
    E = topology.projector_e
    rng = iteration_stream(state.seed, k, LYAPUNOV_STREAM) if rng is None else rng
    _, beta, gamma, _ = state.schedule.at(k)

    n = state.n
    x = state.x
    x_bar = x.mean(axis=0)
    deviation = x - x_bar

    # g0 = col(∇f_i(x̄))
    g0 = np.stack([problem.mean_gradient(i, x_bar, rng, batch) for i in range(n)])
    w = state.v + g0 / gamma

    e1 = 0.5 * float(np.sum(deviation * deviation))
    e2 = 0.5 * (beta + gamma) / gamma * float(np.sum(w * (fm @ w)))
    e3 = float(np.sum(x * (E @ (fm @ w))))

    f_star = problem.f_star if f_star is None else f_star
    e4 = None
    if f_star is not None:
        total = sum(problem.mean_value(i, x_bar, rng, batch) for i in range(n))
        e4 = float(total - n * f_star)

    e5 = None
    if state.algorithm is not Algorithm.ZSDPD:
        residual = x - state.y
        e5 = float(np.sum(residual * residual))

    return LyapunovComponents(e1=e1, e2=e2, e3=e3, e4=e4, e5=e5)
