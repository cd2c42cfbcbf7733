"""
二次型基准：f_i(x) = 1/2 sum_l d_il ([x]_l - c_il)^2，求值与样本无关
"""

from typing import Any, Optional, Union

import numpy as np

from problems.base import ProblemConstants, ProblemInstance, ProblemKind
from utils.errors import InvalidParamsError

HETEROGENEITY = ("zero", "scaled")


class QuadraticProblem(ProblemInstance):
    """对角二次型，f* 与 x* 有闭式解"""

    def __init__(
        self,
        curvatures: np.ndarray,
        centers: np.ndarray,
        kind: ProblemKind = ProblemKind.PL_QUADRATIC,
        sigma2: Optional[float] = 0.0,
    ):
        curvatures = np.array(curvatures, dtype=float)
        centers = np.array(centers, dtype=float)
        if curvatures.ndim != 2 or curvatures.shape != centers.shape:
            raise InvalidParamsError(
                f"curvatures and centers must be matching n×p arrays, got {curvatures.shape} and {centers.shape}"
            )
        if np.any(curvatures <= 0):
            raise InvalidParamsError("curvatures must be positive")
        curvatures.setflags(write=False)
        centers.setflags(write=False)

        self.kind = kind
        self.n, self.p = curvatures.shape
        self.curvatures = curvatures
        self.centers = centers

        mean_curv = curvatures.mean(axis=0)
        self.minimizer = (curvatures * centers).mean(axis=0) / mean_curv
        self.f_star = self._global(self.minimizer)
        self.constants = ProblemConstants(
            ell=float(curvatures.max()),
            nu=float(mean_curv.min()),
            sigma1=0.0,
            sigma2=sigma2,
        )

    @property
    def deterministic(self) -> bool:
        return True

    def _global(self, x: np.ndarray) -> float:
        diff = x[None, :] - self.centers
        return float(0.5 * np.mean(np.sum(self.curvatures * diff * diff, axis=1)))

    def draw(self, i: int, rng: np.random.Generator) -> Any:
        return None

    def evaluate(self, i: int, x: np.ndarray, xi: Any) -> float:
        diff = x - self.centers[i]
        return float(0.5 * np.sum(self.curvatures[i] * diff * diff))

    def gradient(self, i: int, x: np.ndarray, xi: Any) -> np.ndarray:
        return self.curvatures[i] * (x - self.centers[i])

    # 无噪声：期望量即精确值
    def mean_value(self, i, x, rng=None, batch=1) -> float:
        return self.evaluate(i, x, None)

    def mean_gradient(self, i, x, rng=None, batch=1) -> np.ndarray:
        return self.gradient(i, x, None)

    def global_value(self, x, rng=None, batch=1) -> float:
        return self._global(np.asarray(x, dtype=float))

    def global_gradient(self, x, rng=None, batch=1) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (self.curvatures * (x[None, :] - self.centers)).mean(axis=0)

    def stochastic_gradient_sq(self, x, rng=None, batch=1) -> float:
        g = self.global_gradient(x)
        return float(g @ g)


def pl_quadratic_make(
    n: int,
    p: int,
    heterogeneity: str = "zero",
    center: Optional[Union[np.ndarray, list]] = None,
    seed: Optional[int] = 0,
    spread: float = 0.1,
) -> QuadraticProblem:
    """
    满足 P-Ł 条件的二次型
    Args:
        n: agent 数
        p: 维度
        heterogeneity: "zero" 时所有 f_i = 1/2||x - c||^2（nu = l = 1, f* = 0）；
                       "scaled" 时每个 agent 有 [0.5, 1.5] 内的对角曲率与轻微扰动的中心
        center: 公共中心 c，默认 0
        seed: scaled 变体的随机种子
        spread: scaled 变体中心扰动的标准差
    """
    if n < 1 or p < 1:
        raise InvalidParamsError(f"pl_quadratic needs n, p >= 1, got n={n}, p={p}")
    c = np.zeros(p) if center is None else np.asarray(center, dtype=float)
    if c.shape != (p,):
        raise InvalidParamsError(f"center must have shape ({p},), got {c.shape}")

    if heterogeneity == "zero":
        return QuadraticProblem(np.ones((n, p)), np.tile(c, (n, 1)), ProblemKind.PL_QUADRATIC, sigma2=0.0)
    if heterogeneity == "scaled":
        rng = np.random.default_rng(seed)
        curvatures = rng.uniform(0.5, 1.5, size=(n, p))
        centers = c[None, :] + spread * rng.standard_normal((n, p))
        return QuadraticProblem(curvatures, centers, ProblemKind.PL_QUADRATIC, sigma2=None)
    raise InvalidParamsError(f"heterogeneity must be one of {HETEROGENEITY}, got {heterogeneity!r}")


def deterministic_quadratic_make(
    n: int,
    p: int,
    curvature: Optional[Union[np.ndarray, list]] = None,
    center: Optional[Union[np.ndarray, list]] = None,
) -> QuadraticProblem:
    """
    所有 agent 共享同一个对角二次型、无噪声求值（sigma1 = sigma2 = 0）
    Args:
        n: agent 数
        p: 维度
        curvature: 对角曲率，默认 linspace(0.5, 2, p)
        center: 中心，默认 0
    """
    if n < 1 or p < 1:
        raise InvalidParamsError(f"deterministic_quadratic needs n, p >= 1, got n={n}, p={p}")
    d = np.linspace(0.5, 2.0, p) if curvature is None else np.asarray(curvature, dtype=float)
    c = np.zeros(p) if center is None else np.asarray(center, dtype=float)
    if d.shape != (p,) or c.shape != (p,):
        raise InvalidParamsError("curvature and center must have shape (p,)")
    return QuadraticProblem(
        np.tile(d, (n, 1)), np.tile(c, (n, 1)), ProblemKind.DETERMINISTIC_QUADRATIC, sigma2=0.0
    )
