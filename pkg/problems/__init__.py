from typing import Any, Mapping

from problems.base import ProblemKind, ProblemConstants, ProblemInstance, analytic_gradient
from problems.logistic import LogisticBatch, LogisticProblem, logistic_eval
from problems.quadratic import QuadraticProblem, pl_quadratic_make, deterministic_quadratic_make
from utils.errors import InvalidParamsError


def make_problem(config: Mapping[str, Any]) -> ProblemInstance:
    """
    由配置字典构建问题实例
    示例:
        {"problem": "logistic", "n": 20, "p": 50, "m": 200, "theta": 0.001, "tau": 1.0}
        {"problem": "pl_quadratic", "n": 8, "p": 10, "heterogeneity": "zero"}
        {"problem": "deterministic_quadratic", "n": 4, "p": 3}
    """
    name = str(config.get("problem", "logistic")).lower()
    n = int(config.get("n", 20))
    p = int(config.get("p", 50))
    seed = config.get("seed", 0)

    if name in ("logistic", "logistic_nonconvex"):
        return LogisticProblem(
            n=n,
            p=p,
            m=int(config.get("m", 200)),
            theta=float(config.get("theta", 0.001)),
            tau=float(config.get("tau", 1.0)),
            seed=seed,
        )
    if name == "pl_quadratic":
        return pl_quadratic_make(
            n,
            p,
            heterogeneity=str(config.get("heterogeneity", "zero")),
            center=config.get("center"),
            seed=seed,
            spread=float(config.get("spread", 0.1)),
        )
    if name == "deterministic_quadratic":
        return deterministic_quadratic_make(n, p, curvature=config.get("curvature"), center=config.get("center"))
    raise InvalidParamsError(f"unknown problem: {name}")


__all__ = [
    "ProblemKind",
    "ProblemConstants",
    "ProblemInstance",
    "analytic_gradient",
    "LogisticBatch",
    "LogisticProblem",
    "logistic_eval",
    "QuadraticProblem",
    "pl_quadratic_make",
    "deterministic_quadratic_make",
    "make_problem",
]
