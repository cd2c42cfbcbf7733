"""
基准问题接口
每个 agent i 持有随机局部代价 F_i(x, xi_i)，全局目标 f(x) = (1/n) sum_i E[F_i(x, xi_i)]
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, asdict
from enum import Enum
from typing import Any, Optional

import numpy as np

from utils.errors import UnsupportedKindError


class ProblemKind(Enum):
    """问题类型"""
    LOGISTIC_NONCONVEX = "logistic_nonconvex"
    PL_QUADRATIC = "pl_quadratic"
    DETERMINISTIC_QUADRATIC = "deterministic_quadratic"


@dataclass(frozen=True)
class ProblemConstants:
    """
    已知的问题常数；None 表示只能经验估计
    ell: 光滑常数; nu: P-Ł 常数; sigma1 / sigma2: 方差常数; eta1 / eta2: 梯度界常数
    """
    ell: Optional[float] = None
    nu: Optional[float] = None
    sigma1: Optional[float] = None
    sigma2: Optional[float] = None
    eta1: Optional[float] = None
    eta2: Optional[float] = None

    def describe(self) -> dict[str, Any]:
        return {k: ("empirical" if v is None else v) for k, v in asdict(self).items()}


class ProblemInstance(ABC):
    """随机局部代价的统一接口"""

    kind: ProblemKind
    n: int
    p: int
    constants: ProblemConstants
    # 全局最优值；None 表示未知（度量使用运行中的最优值代替）
    f_star: Optional[float] = None

    @property
    def f_star_exact(self) -> bool:
        return self.f_star is not None

    @property
    def has_analytic_gradient(self) -> bool:
        return True

    @property
    def deterministic(self) -> bool:
        """evaluate 是否与 xi 无关"""
        return False

    @abstractmethod
    def draw(self, i: int, rng: np.random.Generator) -> Any:
        """为 agent i 抽取一个数据样本 xi"""

    @abstractmethod
    def evaluate(self, i: int, x: np.ndarray, xi: Any) -> float:
        """F_i(x, xi)"""

    def gradient(self, i: int, x: np.ndarray, xi: Any) -> np.ndarray:
        """∇_x F_i(x, xi)（固定 xi）"""
        raise UnsupportedKindError(f"{self.kind.value} has no closed-form gradient")

    def oracle(self, i: int):
        """agent i 的两点估计预言机 F(x, xi)"""
        return lambda x, xi: self.evaluate(i, x, xi)

    # ---------- 期望量 ----------

    def mean_value(self, i: int, x: np.ndarray, rng: np.random.Generator, batch: int) -> float:
        """f_i(x) = E F_i(x, xi)，默认用 batch 个新样本估计"""
        return float(np.mean([self.evaluate(i, x, self.draw(i, rng)) for _ in range(batch)]))

    def mean_gradient(self, i: int, x: np.ndarray, rng: np.random.Generator, batch: int) -> np.ndarray:
        """∇f_i(x)，默认用 batch 个新样本估计"""
        return np.mean([self.gradient(i, x, self.draw(i, rng)) for _ in range(batch)], axis=0)

    def global_value(self, x: np.ndarray, rng: np.random.Generator, batch: int) -> float:
        """f(x) = (1/n) sum_i f_i(x)"""
        return float(np.mean([self.mean_value(i, x, rng, batch) for i in range(self.n)]))

    def global_gradient(self, x: np.ndarray, rng: np.random.Generator, batch: int) -> np.ndarray:
        """∇f(x)"""
        return np.mean([self.mean_gradient(i, x, rng, batch) for i in range(self.n)], axis=0)

    def stochastic_gradient_sq(self, x: np.ndarray, rng: np.random.Generator, batch: int) -> float:
        """
        E_xi ||∇F(x, xi)||^2，其中 ∇F(x, xi) = (1/n) sum_i ∇F_i(x, xi_i)
        每次抽取为所有 agent 各取一个新样本，共 batch 次
        """
        total = 0.0
        for _ in range(batch):
            g = np.mean([self.gradient(i, x, self.draw(i, rng)) for i in range(self.n)], axis=0)
            total += float(g @ g)
        return total / batch

    def describe(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "n": self.n,
            "p": self.p,
            "f_star": self.f_star if self.f_star is not None else "surrogate",
            "constants": self.constants.describe(),
        }


def analytic_gradient(instance: ProblemInstance, i: int, x: np.ndarray, xi: Any) -> np.ndarray:
    """
    固定样本下的精确梯度 ∇_x F_i(x, xi)
    Args:
        instance: 问题实例
        i: agent 下标
        x: 评估点
        xi: 冻结的数据样本
    """
    if not instance.has_analytic_gradient:
        raise UnsupportedKindError(f"{instance.kind.value} does not support closed-form differentiation")
    return instance.gradient(i, np.asarray(x, dtype=float), xi)
