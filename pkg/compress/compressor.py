"""
压缩算子模块
每个压缩器都带有广义压缩契约 E||C(x)/r - x||^2 <= (1-delta)||x||^2 的 (r, delta) 证书与精确比特开销
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Mapping, Optional

import numpy as np

from utils.errors import InvalidParamsError, NonFiniteInputError

FLOAT_BITS = 64


class CompressorKind(Enum):
    """压缩器类型"""
    IDENTITY = "identity"     # 全精度
    DITHERED = "dithered"     # 无偏抖动量化
    TOPK = "topk"             # 保留最大幅值分量
    SCALED = "scaled"         # 对内层压缩器整体缩放


@dataclass(frozen=True)
class CompressorSpec:
    """压缩器及其契约证书（绑定维度 p）"""
    kind: CompressorKind
    p: int
    bits: int = 2                             # dithered: 量化位数 k
    fraction: float = 1.0                     # topk: 保留比例
    scale: float = 1.0                        # scaled: 缩放因子
    inner: Optional["CompressorSpec"] = None  # scaled: 内层压缩器

    def __post_init__(self):
        if self.p < 1:
            raise InvalidParamsError(f"dimension p must be >= 1, got {self.p}")
        if self.kind is CompressorKind.DITHERED and self.bits < 1:
            raise InvalidParamsError(f"quantizer bits must be >= 1, got {self.bits}")
        if self.kind is CompressorKind.TOPK and not 0.0 < self.fraction <= 1.0:
            raise InvalidParamsError(f"top-k fraction must be in (0, 1], got {self.fraction}")
        if self.kind is CompressorKind.SCALED:
            if self.inner is None:
                raise InvalidParamsError("scaled compressor needs an inner compressor")
            if self.inner.p != self.p:
                raise InvalidParamsError("scaled compressor dimension differs from inner")
            if not self.scale > 0:
                raise InvalidParamsError(f"scale must be positive, got {self.scale}")

    # ---------- 证书 ----------

    @property
    def r(self) -> float:
        if self.kind is CompressorKind.DITHERED:
            return 1.0 + self.p / 4.0 ** self.bits
        if self.kind is CompressorKind.SCALED:
            return self.scale * self.inner.r
        return 1.0

    @property
    def delta(self) -> float:
        if self.kind is CompressorKind.DITHERED:
            return 1.0 / (1.0 + self.p / 4.0 ** self.bits)
        if self.kind is CompressorKind.TOPK:
            return self.fraction
        if self.kind is CompressorKind.SCALED:
            return self.inner.delta
        return 1.0

    @property
    def delta0(self) -> float:
        """delta_0 = 2 r^2 (1 - delta) + 2 (1 - r)^2"""
        r, delta = self.r, self.delta
        return 2.0 * r * r * (1.0 - delta) + 2.0 * (1.0 - r) ** 2

    @property
    def kept(self) -> int:
        """top-k 保留的分量数 ceil(fraction * p)"""
        if self.kind is CompressorKind.SCALED:
            return self.inner.kept
        if self.kind is not CompressorKind.TOPK:
            return self.p
        return max(1, math.ceil(self.fraction * self.p - 1e-9))

    def bits_per_vector(self, p: Optional[int] = None) -> int:
        """单个向量的传输比特数"""
        p = self.p if p is None else p
        if self.kind is CompressorKind.DITHERED:
            return quantizer_bits(p, self.bits)
        if self.kind is CompressorKind.TOPK:
            kept = max(1, math.ceil(self.fraction * p - 1e-9))
            return kept * (FLOAT_BITS + math.ceil(math.log2(p)))
        if self.kind is CompressorKind.SCALED:
            return self.inner.bits_per_vector(p)
        return FLOAT_BITS * p

    def describe(self) -> dict[str, Any]:
        """导出为配置字典"""
        out: dict[str, Any] = {"kind": self.kind.value}
        if self.kind is CompressorKind.DITHERED:
            out["bits"] = self.bits
        elif self.kind is CompressorKind.TOPK:
            out["fraction"] = self.fraction
        elif self.kind is CompressorKind.SCALED:
            out["scale"] = self.scale
            out["inner"] = self.inner.describe()
        return out


def quantizer_bits(p: int, k: int) -> int:
    """
    抖动量化器的单向量比特数 (k+1)p + 64
    Args:
        p: 维度
        k: 量化位数
    """
    if p < 1 or k < 1:
        raise InvalidParamsError(f"quantizer_bits needs p >= 1 and k >= 1, got p={p}, k={k}")
    return (k + 1) * p + FLOAT_BITS


# ============== 工厂 ==============

_KIND_ALIASES = {
    "identity": CompressorKind.IDENTITY,
    "none": CompressorKind.IDENTITY,
    "dithered": CompressorKind.DITHERED,
    "quantizer": CompressorKind.DITHERED,
    "topk": CompressorKind.TOPK,
    "top_k": CompressorKind.TOPK,
    "scaled": CompressorKind.SCALED,
}


def make_compressor(config: Mapping[str, Any], p: int) -> CompressorSpec:
    """
    由配置字典构建压缩器
    示例:
        {"kind": "dithered", "bits": 2}
        {"kind": "topk", "fraction": 0.1}
        {"kind": "scaled", "scale": 0.5, "inner": {"kind": "identity"}}
    """
    name = str(config.get("kind", "identity")).lower()
    kind = _KIND_ALIASES.get(name)
    if kind is None:
        raise InvalidParamsError(f"unknown compressor kind: {name}")
    if kind is CompressorKind.DITHERED:
        return CompressorSpec(kind, p, bits=int(config.get("bits", 2)))
    if kind is CompressorKind.TOPK:
        return CompressorSpec(kind, p, fraction=float(config.get("fraction", 0.1)))
    if kind is CompressorKind.SCALED:
        inner = make_compressor(config.get("inner", {"kind": "identity"}), p)
        return CompressorSpec(kind, p, scale=float(config.get("scale", 1.0)), inner=inner)
    return CompressorSpec(kind, p)


def identity_compressor(p: int) -> CompressorSpec:
    return CompressorSpec(CompressorKind.IDENTITY, p)


# ============== 压缩 ==============

def compress(spec: CompressorSpec, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """
    计算 C(x)
    Args:
        spec: 压缩器
        x: p 维向量
        rng: 调用方持有的随机流（抖动 / 随机化压缩器使用）
    Returns:
        压缩后的 p 维向量（新数组）
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.p,):
        raise InvalidParamsError(f"compress expects shape ({spec.p},), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteInputError("compressor input contains NaN or Inf")
    return _apply(spec, x, rng)


def _apply(spec: CompressorSpec, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    if spec.kind is CompressorKind.IDENTITY:
        return x.copy()

    if spec.kind is CompressorKind.DITHERED:
        # 每次调用都消耗 p 个抖动，保证随机流推进与输入无关
        dither = rng.random(spec.p)
        norm = float(np.max(np.abs(x)))
        if norm == 0.0:
            return np.zeros_like(x)
        levels = 2.0 ** (spec.bits - 1)
        return (norm / levels) * np.sign(x) * np.floor(levels * np.abs(x) / norm + dither)

    if spec.kind is CompressorKind.TOPK:
        # 稳定排序：幅值相同时低下标优先
        order = np.argsort(-np.abs(x), kind="stable")
        out = np.zeros_like(x)
        keep = order[: spec.kept]
        out[keep] = x[keep]
        return out

    return spec.scale * _apply(spec.inner, x, rng)


def compress_rows(
    spec: CompressorSpec,
    X: np.ndarray,
    rngs: list[np.random.Generator],
) -> np.ndarray:
    """逐 agent 压缩 n×p 矩阵的每一行，第 i 行使用 rngs[i]"""
    return np.stack([compress(spec, X[i], rngs[i]) for i in range(X.shape[0])])
