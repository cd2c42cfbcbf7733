"""
非凸分布式二分类任务
F_i(x, xi) = (n/m_i) sum_j log(1 + exp(-t_ij x^T s_ij)) + sum_l theta*tau*[x]_l^2 / (1 + tau*[x]_l^2)
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from problems.base import ProblemConstants, ProblemInstance, ProblemKind
from utils.errors import InvalidParamsError


def _sigmoid(u: np.ndarray) -> np.ndarray:
    return np.exp(-np.logaddexp(0.0, -u))


@dataclass(frozen=True, eq=False)
class LogisticBatch:
    """一次数据抽取：m 个高斯特征与 ±1 标签"""
    features: np.ndarray   # m × p
    labels: np.ndarray     # m


class LogisticProblem(ProblemInstance):
    """
    带非凸正则的逻辑回归；特征每次调用重新生成，
    标签由实例级隐藏参数 x* 按 P(t=1) = sigmoid(x*^T s) 生成
    """

    kind = ProblemKind.LOGISTIC_NONCONVEX

    def __init__(
        self,
        n: int = 20,
        p: int = 50,
        m: int = 200,
        theta: float = 0.001,
        tau: float = 1.0,
        seed: Optional[int] = 0,
    ):
        if n < 1 or p < 1 or m < 1:
            raise InvalidParamsError(f"logistic problem needs n, p, m >= 1, got n={n}, p={p}, m={m}")
        if theta < 0 or tau <= 0:
            raise InvalidParamsError(f"need theta >= 0 and tau > 0, got theta={theta}, tau={tau}")
        self.n, self.p, self.m = n, p, m
        self.theta, self.tau = theta, tau
        self.seed = seed
        self.hidden = np.random.default_rng(seed).standard_normal(p)
        self.hidden.setflags(write=False)
        self.constants = ProblemConstants()
        self.f_star = None

    def draw(self, i: int, rng: np.random.Generator) -> LogisticBatch:
        features = rng.standard_normal((self.m, self.p))
        positive = rng.random(self.m) < _sigmoid(features @ self.hidden)
        return LogisticBatch(features=features, labels=np.where(positive, 1.0, -1.0))

    def regularizer(self, x: np.ndarray) -> float:
        sq = self.tau * x * x
        return float(self.theta * np.sum(sq / (1.0 + sq)))

    def evaluate(self, i: int, x: np.ndarray, xi: LogisticBatch) -> float:
        margins = xi.labels * (xi.features @ x)
        data = (self.n / self.m) * float(np.sum(np.logaddexp(0.0, -margins)))
        return data + self.regularizer(x)

    def gradient(self, i: int, x: np.ndarray, xi: LogisticBatch) -> np.ndarray:
        margins = xi.labels * (xi.features @ x)
        # d/dx log(1 + e^{-t x^T s}) = -t s / (1 + e^{t x^T s})
        weights = -xi.labels * np.exp(-np.logaddexp(0.0, margins))
        data = (self.n / self.m) * (xi.features.T @ weights)
        reg = 2.0 * self.theta * self.tau * x / (1.0 + self.tau * x * x) ** 2
        return data + reg

    def describe(self):
        out = super().describe()
        out.update({"m": self.m, "theta": self.theta, "tau": self.tau, "seed": self.seed})
        return out


def logistic_eval(
    instance: LogisticProblem,
    i: int,
    x: np.ndarray,
    rng: np.random.Generator,
    xi: Optional[LogisticBatch] = None,
) -> float:
    """
    在新抽取（或给定）的样本上计算 F_i(x, xi)
    Args:
        instance: 逻辑回归实例
        i: agent 下标
        x: 评估点
        rng: agent 随机流
        xi: 已有样本；None 时从 rng 抽取
    """
    if xi is None:
        xi = instance.draw(i, rng)
    return instance.evaluate(i, np.asarray(x, dtype=float), xi)
