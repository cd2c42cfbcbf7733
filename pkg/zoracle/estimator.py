"""
零阶梯度估计
两点随机梯度估计器，以及用于验证它的平滑函数蒙特卡洛估计
"""

import math
from dataclasses import dataclass
from typing import Any, Callable, Optional

import numpy as np

from utils.errors import InvalidParamsError, NonFiniteEvaluationError
from utils.utils import Verdict

MU_FLOOR = 1e-12

# F(x, xi) -> float；两点估计在同一个 xi 上求值
StochasticOracle = Callable[[np.ndarray, Any], float]
DeterministicFunction = Callable[[np.ndarray], float]
XiSampler = Callable[[np.random.Generator], Any]


# ============== 数据结构 ==============

@dataclass(frozen=True, eq=False)
class ZoSample:
    """一次两点估计的全部输入输出"""
    direction: np.ndarray
    mu: float
    xi: Any
    estimate: np.ndarray
    evaluations_used: int = 2


@dataclass(frozen=True)
class SmoothedEstimate:
    """平滑函数值的蒙特卡洛估计"""
    value: float
    std_error: float
    samples: int


@dataclass(frozen=True, eq=False)
class SmoothedGradient:
    """平滑函数梯度的有限差分估计（公共随机数）"""
    gradient: np.ndarray
    std_error: np.ndarray
    samples: int


@dataclass(frozen=True)
class VarianceReport:
    """二阶矩界 E||g||^2 <= 2p||grad||^2 + p^2 mu^2 l^2 / 2 的经验检验"""
    p: int
    mu: float
    samples: int
    empirical: float
    std_error: float
    bound: float
    tolerance: float     # bound * (1 + 3/sqrt(samples))
    verdict: Verdict

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS


# ============== 采样 ==============

def sample_sphere(p: int, rng: np.random.Generator) -> np.ndarray:
    """
    单位球面 S^{p-1} ⊂ R^p 上的均匀方向
    Args:
        p: 维度
        rng: 随机流
    """
    if p < 1:
        raise InvalidParamsError(f"sphere dimension must be >= 1, got {p}")
    while True:
        v = rng.standard_normal(p)
        norm = float(np.linalg.norm(v))
        if norm > 0.0:
            return v / norm


def sample_ball(p: int, rng: np.random.Generator) -> np.ndarray:
    """单位球 B^p 内的均匀点：球面方向 × U^{1/p} 半径"""
    direction = sample_sphere(p, rng)
    return direction * rng.random() ** (1.0 / p)


# ============== 估计器 ==============

def _check_mu(mu: float):
    if not mu >= MU_FLOOR:
        raise InvalidParamsError(f"exploration parameter mu must be >= {MU_FLOOR}, got {mu}")


def _finite(value: float, where: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise NonFiniteEvaluationError(f"oracle returned {value} at {where}")
    return value


def zo_gradient(
    F: StochasticOracle,
    x: np.ndarray,
    mu: float,
    xi: Any,
    zeta: np.ndarray,
) -> np.ndarray:
    """
    两点估计 g = p (F(x + mu zeta, xi) - F(x, xi)) / mu * zeta
    Args:
        F: 随机函数预言机
        x: 当前点
        mu: 探索参数（≥ 1e-12）
        xi: 数据样本，两次求值共用
        zeta: 单位方向
    Returns:
        p 维梯度估计，恰好两次函数调用
    """
    _check_mu(mu)
    x = np.asarray(x, dtype=float)
    p = x.shape[0]
    base = _finite(F(x, xi), "x")
    shifted = _finite(F(x + mu * zeta, xi), "x + mu*zeta")
    return (p * (shifted - base) / mu) * zeta


def zo_sample(
    F: StochasticOracle,
    x: np.ndarray,
    mu: float,
    xi: Any,
    rng: np.random.Generator,
) -> ZoSample:
    """抽取方向并计算估计，返回完整记录"""
    zeta = sample_sphere(np.asarray(x).shape[0], rng)
    estimate = zo_gradient(F, x, mu, xi, zeta)
    return ZoSample(direction=zeta, mu=mu, xi=xi, estimate=estimate)


def smoothed_value(
    f: DeterministicFunction,
    x: np.ndarray,
    mu: float,
    samples: int,
    rng: np.random.Generator,
) -> SmoothedEstimate:
    """
    f̂(x, mu) = E_{u ~ U(B^p)} f(x + mu u) 的蒙特卡洛估计
    Args:
        f: 确定性函数
        x: 评估点
        mu: 平滑半径
        samples: 样本数（≥ 1）
        rng: 随机流
    """
    if samples < 1:
        raise InvalidParamsError(f"samples must be >= 1, got {samples}")
    _check_mu(mu)
    x = np.asarray(x, dtype=float)
    p = x.shape[0]
    values = np.empty(samples)
    for s in range(samples):
        values[s] = _finite(f(x + mu * sample_ball(p, rng)), "smoothing sample")
    std_error = float(values.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return SmoothedEstimate(value=float(values.mean()), std_error=std_error, samples=samples)


def smoothed_gradient(
    f: DeterministicFunction,
    x: np.ndarray,
    mu: float,
    samples: int,
    seed: int,
    step: float = 1e-4,
) -> SmoothedGradient:
    """
    ∇f̂(x, mu) 的中心差分估计；每个坐标的 ± 两侧共用同一组球内样本
    Args:
        f: 确定性函数
        x: 评估点
        mu: 平滑半径
        samples: 每个坐标的球内样本数
        seed: 公共随机数种子
        step: 差分步长
    """
    if samples < 2:
        raise InvalidParamsError(f"smoothed_gradient needs samples >= 2, got {samples}")
    _check_mu(mu)
    x = np.asarray(x, dtype=float)
    p = x.shape[0]
    rng = np.random.default_rng(seed)
    offsets = np.stack([mu * sample_ball(p, rng) for _ in range(samples)])

    gradient = np.empty(p)
    std_error = np.empty(p)
    for l in range(p):
        e = np.zeros(p)
        e[l] = step
        diffs = np.array([
            _finite(f(x + e + u), "x + h e_l") - _finite(f(x - e + u), "x - h e_l")
            for u in offsets
        ]) / (2.0 * step)
        gradient[l] = diffs.mean()
        std_error[l] = diffs.std(ddof=1) / math.sqrt(samples)
    return SmoothedGradient(gradient=gradient, std_error=std_error, samples=samples)


def variance_report(
    F: StochasticOracle,
    x: np.ndarray,
    mu: float,
    grad_norm_sq: float,
    ell: float,
    samples: int,
    rng: np.random.Generator,
    xi_sampler: Optional[XiSampler] = None,
) -> VarianceReport:
    """
    检验 E||g^z||^2 <= 2p ||∇F(x, xi)||^2 + (1/2) p^2 mu^2 l^2
    Args:
        F: 随机函数预言机
        x: 评估点
        mu: 探索参数
        grad_norm_sq: ||∇F(x, xi)||^2（或其期望）
        ell: F(·, xi) 的光滑常数
        samples: 样本数
        rng: 随机流
        xi_sampler: 每次抽取 xi；为 None 时 xi 取 None（确定性函数）
    """
    if samples < 2:
        raise InvalidParamsError(f"variance_report needs samples >= 2, got {samples}")
    x = np.asarray(x, dtype=float)
    p = x.shape[0]
    norms = np.empty(samples)
    for s in range(samples):
        xi = xi_sampler(rng) if xi_sampler is not None else None
        g = zo_gradient(F, x, mu, xi, sample_sphere(p, rng))
        norms[s] = float(g @ g)

    empirical = float(norms.mean())
    bound = 2.0 * p * grad_norm_sq + 0.5 * p * p * mu * mu * ell * ell
    tolerance = bound * (1.0 + 3.0 / math.sqrt(samples))
    return VarianceReport(
        p=p,
        mu=mu,
        samples=samples,
        empirical=empirical,
        std_error=float(norms.std(ddof=1) / math.sqrt(samples)),
        bound=bound,
        tolerance=tolerance,
        verdict=Verdict.of(empirical <= tolerance),
    )
