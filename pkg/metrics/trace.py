"""
收敛与通信度量
P(T) = min_k { E_xi ||∇F(x̄_k, xi)||^2 + (1/n) sum_i ||x_i,k - x̄_k||^2 }
"""

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from czsd.state import RunState
from metrics.lyapunov import LyapunovComponents, lyapunov_components
from utils.errors import EmptyStreamError
from utils.utils import format_float, iteration_stream, parse_float

TRACE_COLUMNS = (
    "k", "consensus", "grad_sq", "p_running", "optimality", "bits",
    "e1", "e2", "e3", "e4", "e5", "wall_ms",
)

MEASURE_STREAM = 0


# ============== 数据结构 ==============

@dataclass(frozen=True)
class TraceRecord:
    """一次测量的度量行"""
    k: int
    consensus: float
    grad_sq: float
    p_running: float
    optimality: float
    bits: int
    lyapunov: Optional[tuple] = None
    wall_ms: Optional[float] = None
    mean_grad_norm_sq: Optional[float] = field(default=None, compare=False)

    @property
    def p_value(self) -> float:
        """本次测量的 grad_sq + consensus"""
        return self.grad_sq + self.consensus

    def to_row(self) -> list[str]:
        e_cols = list(self.lyapunov) if self.lyapunov is not None else [None] * 5
        values = [self.k, self.consensus, self.grad_sq, self.p_running, self.optimality, self.bits,
                  *e_cols, self.wall_ms]
        return [format_float(v) for v in values]

    @classmethod
    def from_row(cls, row: dict[str, str]) -> "TraceRecord":
        e_cols = tuple(parse_float(row.get(f"e{j}", "")) for j in range(1, 6))
        return cls(
            k=int(row["k"]),
            consensus=float(row["consensus"]),
            grad_sq=float(row["grad_sq"]),
            p_running=float(row["p_running"]),
            optimality=float(row["optimality"]),
            bits=int(row["bits"]),
            lyapunov=None if all(e is None for e in e_cols) else e_cols,
            wall_ms=parse_float(row.get("wall_ms", "")),
        )


@dataclass(frozen=True)
class ConsensusError:
    """共识误差：归一化形式 (1/n) sum ||x_i - x̄||^2 与 e1 = 1/2 sum ||x_i - x̄||^2"""
    normalized: float
    e1: float


# ============== 度量 ==============

def consensus_error(x: np.ndarray) -> ConsensusError:
    """
    Args:
        x: n×p 堆叠状态（n ≥ 1）
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    deviation = x - x.mean(axis=0)
    total = float(np.sum(deviation * deviation))
    return ConsensusError(normalized=total / x.shape[0], e1=0.5 * total)


class RunningMin:
    """P(T) 的运行最小值"""

    def __init__(self):
        self._value: Optional[float] = None
        self.count = 0

    def update(self, value: float) -> float:
        self.count += 1
        if self._value is None or value < self._value:
            self._value = float(value)
        return self._value

    @property
    def value(self) -> float:
        if self._value is None:
            raise EmptyStreamError("P(T) is undefined on an empty record stream")
        return self._value


def p_metric_update(values: Iterable[float]) -> list[float]:
    """
    对 (grad_sq + consensus) 序列求运行最小值
    示例: [3, 1, 2] -> [3, 1, 1]
    """
    tracker = RunningMin()
    out = [tracker.update(v) for v in values]
    if not out:
        raise EmptyStreamError("P(T) is undefined on an empty record stream")
    return out


class Measurer:
    """
    跟踪一次运行的度量状态（P(T) 运行最小值、f* 代理值）
    f* 未知时以运行中见到的最小 f(x̄) 作为代理
    """

    def __init__(self, state: RunState, eval_batch: int = 64, lyapunov: bool = False):
        self.eval_batch = eval_batch
        self.lyapunov = lyapunov
        self.p_metric = RunningMin()
        self.f_star_surrogate: Optional[float] = None
        self.f_star_exact = state.problem.f_star_exact
        self._fm = state.topology.fm if lyapunov else None

    def measure(self, state: RunState, wall_ms: Optional[float] = None) -> TraceRecord:
        """在 state.k 处测量一行"""
        problem = state.problem
        rng = iteration_stream(state.seed, state.k, MEASURE_STREAM)
        x_bar = state.x_bar

        consensus = consensus_error(state.x).normalized
        grad_sq = problem.stochastic_gradient_sq(x_bar, rng, self.eval_batch)
        p_running = self.p_metric.update(grad_sq + consensus)

        f_value = problem.global_value(x_bar, rng, self.eval_batch)
        if self.f_star_exact:
            f_star = problem.f_star
        else:
            if self.f_star_surrogate is None or f_value < self.f_star_surrogate:
                self.f_star_surrogate = f_value
            f_star = self.f_star_surrogate
        optimality = f_value - f_star

        mean_grad = None
        if problem.has_analytic_gradient:
            g = problem.global_gradient(x_bar, rng, self.eval_batch)
            mean_grad = float(g @ g)

        components: Optional[LyapunovComponents] = None
        if self.lyapunov:
            components = lyapunov_components(state, fm=self._fm, f_star=f_star, batch=self.eval_batch)

        return TraceRecord(
            k=state.k,
            consensus=consensus,
            grad_sq=grad_sq,
            p_running=p_running,
            optimality=optimality,
            bits=state.bits,
            lyapunov=components.as_tuple() if components is not None else None,
            wall_ms=wall_ms,
            mean_grad_norm_sq=mean_grad,
        )
