"""
压缩契约的蒙特卡洛验证
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from compress.compressor import CompressorSpec, compress
from utils.errors import InvalidParamsError
from utils.utils import Verdict

MIN_SAMPLES = 1000


@dataclass(frozen=True)
class CertifyReport:
    """经验压缩比报告"""
    compressor: dict
    p: int
    samples: int
    r: float
    delta: float
    mean_ratio: float
    max_ratio: float
    bound: float          # (1 - delta) * (1 + slack)
    slack: float
    verdict: Verdict

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS


def certify(
    spec: CompressorSpec,
    samples: int,
    rng: np.random.Generator,
    slack: Optional[float] = None,
) -> CertifyReport:
    """
    抽取标准正态向量 x，统计 ||C(x)/r - x||^2 / ||x||^2
    Args:
        spec: 待验证的压缩器（维度取 spec.p）
        samples: 抽样次数（≥ 1000）
        rng: 随机流
        slack: 蒙特卡洛松弛；默认 3/sqrt(samples)
    Returns:
        CertifyReport，平均比值 ≤ (1-delta)(1+slack) 时 PASS
    """
    if samples < MIN_SAMPLES:
        raise InvalidParamsError(f"certify needs at least {MIN_SAMPLES} samples, got {samples}")
    slack = 3.0 / math.sqrt(samples) if slack is None else float(slack)

    r = spec.r
    ratios = np.empty(samples)
    for s in range(samples):
        x = rng.standard_normal(spec.p)
        norm_sq = float(x @ x)
        if norm_sq == 0.0:
            ratios[s] = 0.0
            continue
        residual = compress(spec, x, rng) / r - x
        ratios[s] = float(residual @ residual) / norm_sq

    mean_ratio = float(ratios.mean())
    bound = (1.0 - spec.delta) * (1.0 + slack)
    return CertifyReport(
        compressor=spec.describe(),
        p=spec.p,
        samples=samples,
        r=r,
        delta=spec.delta,
        mean_ratio=mean_ratio,
        max_ratio=float(ratios.max()),
        bound=bound,
        slack=slack,
        verdict=Verdict.of(mean_ratio <= bound),
    )
