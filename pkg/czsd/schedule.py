"""
参数调度
三种收敛设定（固定步长 / 时变 / 几何探索）、table1 经验参数以及自定义同形律
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping, Optional

from utils.errors import InvalidParamsError
from utils.utils import get_logger
from zoracle.estimator import MU_FLOOR

logger = get_logger("czsd")


class ScheduleRegime(Enum):
    """调度设定"""
    THEOREM1_FIXED = "theorem1_fixed"
    THEOREM2_TIMEVARYING = "theorem2_timevarying"
    THEOREM3_GEOMETRIC = "theorem3_geometric"
    TABLE1 = "table1"
    CUSTOM = "custom"


# 每种设定的默认参数
DEFAULTS: dict[ScheduleRegime, dict[str, float]] = {
    ScheduleRegime.THEOREM1_FIXED: {"eps1": 1.0, "eps2": 0.1, "T": 1000, "kappa_mu": 1.0, "omega": 0.1},
    ScheduleRegime.THEOREM2_TIMEVARYING: {"eps1": 1.0, "eps2": 0.1, "eps3": 0.1, "m": 10, "kappa_mu": 1.0, "omega": 0.1},
    ScheduleRegime.THEOREM3_GEOMETRIC: {"eps1": 1.0, "eps2": 0.1, "gamma": 1.0, "kappa_mu": 1.0, "eps_tilde": 0.99, "omega": 0.1},
    ScheduleRegime.TABLE1: {"a": 0.1, "b": 3.0, "g": 0.1, "c": 1.0, "mu0": 1.0, "rho": 0.99, "omega": 0.1},
    ScheduleRegime.CUSTOM: {"a": 0.1, "b": 3.0, "g": 0.1, "c": 1.0, "mu0": 1.0, "rho": 0.99, "omega": 0.1},
}


@dataclass(frozen=True)
class Schedule:
    """按迭代序号给出 alpha_k, beta_k, gamma_k, mu_k 与 omega"""
    regime: ScheduleRegime
    n: int
    p: int
    params: Mapping[str, float] = field(default_factory=dict)

    @property
    def omega(self) -> float:
        return float(self.params["omega"])

    def gamma(self, k: int) -> float:
        P = self.params
        if self.regime is ScheduleRegime.THEOREM1_FIXED:
            return P["eps2"] / self.alpha(k)
        if self.regime is ScheduleRegime.THEOREM2_TIMEVARYING:
            return P["eps3"] * (k + P["m"])
        if self.regime is ScheduleRegime.THEOREM3_GEOMETRIC:
            return P["gamma"]
        return P["g"] * (k + P["c"])

    def alpha(self, k: int) -> float:
        P = self.params
        if self.regime is ScheduleRegime.THEOREM1_FIXED:
            return math.sqrt(self.n) / math.sqrt(self.p * P["T"])
        if self.regime in (ScheduleRegime.THEOREM2_TIMEVARYING, ScheduleRegime.THEOREM3_GEOMETRIC):
            return P["eps2"] / self.gamma(k)
        return P["a"] / (k + P["c"])

    def beta(self, k: int) -> float:
        P = self.params
        if self.regime in (ScheduleRegime.TABLE1, ScheduleRegime.CUSTOM):
            return P["b"] * (k + P["c"])
        return P["eps1"] * self.gamma(k)

    def mu(self, k: int) -> float:
        """探索参数，下限截断到 1e-12"""
        P = self.params
        if self.regime in (ScheduleRegime.THEOREM1_FIXED, ScheduleRegime.THEOREM2_TIMEVARYING):
            value = P["kappa_mu"] * math.sqrt(self.p * self.alpha(k)) / math.sqrt(self.n + self.p)
        elif self.regime is ScheduleRegime.THEOREM3_GEOMETRIC:
            value = P["kappa_mu"] * P["eps_tilde"] ** k
        else:
            value = P["mu0"] * P["rho"] ** k
        return max(value, MU_FLOOR)

    def at(self, k: int) -> tuple[float, float, float, float]:
        """(alpha_k, beta_k, gamma_k, mu_k)"""
        return self.alpha(k), self.beta(k), self.gamma(k), self.mu(k)

    def describe(self) -> dict[str, Any]:
        return {"regime": self.regime.value, **{k: v for k, v in self.params.items()}}


def _positive(params: Mapping[str, float], *names: str):
    for name in names:
        if not params[name] > 0:
            raise InvalidParamsError(f"schedule parameter {name} must be positive, got {params[name]}")


def make_schedule(
    regime: str | ScheduleRegime,
    params: Optional[Mapping[str, Any]] = None,
    n: int = 1,
    p: int = 1,
) -> Schedule:
    """
    构建调度
    Args:
        regime: 设定名称（theorem1_fixed / theorem2_timevarying / theorem3_geometric / table1 / custom）
        params: 设定参数，缺省项取 DEFAULTS；table1 的参数不可覆盖（除 omega 外保持原表）
        n: agent 数
        p: 维度
    Returns:
        Schedule
    """
    try:
        regime = regime if isinstance(regime, ScheduleRegime) else ScheduleRegime(str(regime).lower())
    except ValueError:
        raise InvalidParamsError(f"unknown schedule regime: {regime}") from None
    if n < 1 or p < 1:
        raise InvalidParamsError(f"schedule needs n, p >= 1, got n={n}, p={p}")

    merged = dict(DEFAULTS[regime])
    overrides = dict(params or {})
    if regime is ScheduleRegime.TABLE1:
        ignored = sorted(set(overrides) - {"omega"})
        if ignored:
            logger.warning(f"table1 keeps its fixed coefficients, ignoring {ignored}")
        overrides = {k: v for k, v in overrides.items() if k == "omega"}
    unknown = set(overrides) - set(merged)
    if unknown:
        raise InvalidParamsError(f"unknown parameters for {regime.value}: {sorted(unknown)}")
    merged.update({k: float(v) for k, v in overrides.items()})

    _positive(merged, "omega")
    if regime is ScheduleRegime.THEOREM1_FIXED:
        _positive(merged, "eps1", "eps2", "kappa_mu")
        if merged["T"] < 1:
            raise InvalidParamsError(f"T must be >= 1, got {merged['T']}")
    elif regime is ScheduleRegime.THEOREM2_TIMEVARYING:
        _positive(merged, "eps1", "eps2", "eps3", "kappa_mu")
        if merged["m"] < 1:
            raise InvalidParamsError(f"m must be >= 1, got {merged['m']}")
    elif regime is ScheduleRegime.THEOREM3_GEOMETRIC:
        _positive(merged, "eps1", "eps2", "gamma", "kappa_mu")
        if not 0.0 < merged["eps_tilde"] < 1.0:
            raise InvalidParamsError(f"eps_tilde must be in (0, 1), got {merged['eps_tilde']}")
    else:
        _positive(merged, "a", "b", "g", "c", "mu0")
        if not 0.0 < merged["rho"] <= 1.0:
            raise InvalidParamsError(f"rho must be in (0, 1], got {merged['rho']}")

    return Schedule(regime=regime, n=n, p=p, params=merged)
