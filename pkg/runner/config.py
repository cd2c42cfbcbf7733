"""
运行配置
TOML（tomllib）或 JSON 文件，解析为 pydantic 模型
"""

import json
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib
from pathlib import Path
from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from utils.errors import ConfigError


class ProblemConfig(BaseModel):
    """问题配置，如 {"problem": "logistic", "n": 20, "p": 50, "m": 200, "theta": 0.001, "tau": 1.0}"""
    model_config = ConfigDict(extra="forbid")

    problem: Literal["logistic", "pl_quadratic", "deterministic_quadratic"] = "logistic"
    n: int = Field(default=20, ge=1)
    p: int = Field(default=50, ge=1)
    m: int = Field(default=200, ge=1)
    theta: float = Field(default=0.001, ge=0.0)
    tau: float = Field(default=1.0, gt=0.0)
    heterogeneity: Literal["zero", "scaled"] = "zero"
    spread: float = Field(default=0.1, ge=0.0)
    center: Optional[list[float]] = None
    curvature: Optional[list[float]] = None
    seed: int = Field(default=0, ge=0)


class TopologyConfig(BaseModel):
    """拓扑配置：几何图 / 边表文件 / 稠密矩阵 / 规则图"""
    model_config = ConfigDict(extra="forbid")

    kind: Literal["geometric", "edge_list", "dense", "path", "ring", "complete"] = "ring"
    angular_threshold: float = Field(default=60.0, gt=0.0, le=180.0)
    seed: int = Field(default=0, ge=0)
    max_retries: int = Field(default=100, ge=0)
    path: Optional[str] = None
    matrix: Optional[list[list[float]]] = None

    @model_validator(mode="after")
    def _check_source(self):
        if self.kind == "edge_list" and not self.path:
            raise ValueError("topology.kind = 'edge_list' requires topology.path")
        if self.kind == "dense" and self.matrix is None:
            raise ValueError("topology.kind = 'dense' requires topology.matrix")
        return self


class CompressorConfig(BaseModel):
    """压缩器配置，如 {"kind": "dithered", "bits": 2}"""
    model_config = ConfigDict(extra="forbid")

    kind: Literal["identity", "dithered", "topk", "scaled"] = "dithered"
    bits: int = Field(default=2, ge=1)
    fraction: float = Field(default=0.1, gt=0.0, le=1.0)
    scale: float = Field(default=1.0, gt=0.0)
    inner: Optional["CompressorConfig"] = None


CompressorConfig.model_rebuild()


class ScheduleConfig(BaseModel):
    """调度配置：regime 与该设定的参数"""
    model_config = ConfigDict(extra="forbid")

    regime: Literal["theorem1_fixed", "theorem2_timevarying", "theorem3_geometric", "table1", "custom"] = "table1"
    params: dict[str, float] = Field(default_factory=dict)


class RunConfig(BaseModel):
    """一次实验的完整配置"""
    model_config = ConfigDict(extra="forbid")

    problem: ProblemConfig = Field(default_factory=ProblemConfig)
    topology: TopologyConfig = Field(default_factory=TopologyConfig)
    algorithm: Literal["czsd", "zsdpd", "czsd_identity"] = "czsd"
    compressor: CompressorConfig = Field(default_factory=CompressorConfig)
    schedule: ScheduleConfig = Field(default_factory=ScheduleConfig)
    iterations: int = Field(default=5000, ge=1)
    seeds: list[int] = Field(default_factory=lambda: list(range(10)))
    cadence: int = Field(default=10, ge=1)
    eval_batch: int = Field(default=64, ge=1)
    x0: Literal["zeros", "normal"] = "zeros"
    x0_scale: float = Field(default=1.0, ge=0.0)
    lyapunov: bool = False
    bit_convention: Literal["broadcast", "per_edge"] = "broadcast"
    thresholds: list[float] = Field(default_factory=lambda: [1e-1, 1e-2, 1e-3])
    timing: bool = True
    workers: int = Field(default=1, ge=1)
    out: str = "runs"

    @field_validator("seeds")
    @classmethod
    def _seeds_nonempty(cls, value: list[int]) -> list[int]:
        if not value:
            raise ValueError("seeds must be non-empty")
        negative = [s for s in value if s < 0]
        if negative:
            raise ValueError(f"seeds must be non-negative, got {negative}")
        return value

    @field_validator("thresholds")
    @classmethod
    def _thresholds_positive(cls, value: list[float]) -> list[float]:
        if any(t <= 0 for t in value):
            raise ValueError("thresholds must be positive")
        return sorted(value, reverse=True)


def parse_config(data: dict[str, Any]) -> RunConfig:
    """
    字典 -> RunConfig
    Args:
        data: 原始配置字典
    Returns:
        RunConfig；校验失败抛 ConfigError
    """
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid run config:\n{e}") from e


def serialize_config(config: RunConfig) -> dict[str, Any]:
    """RunConfig -> 可 JSON 化的字典（parse_config 的逆）"""
    return config.model_dump(mode="json")


def load_config(path: Union[str, Path]) -> RunConfig:
    """
    读取配置文件：.toml 使用 tomllib，.json 使用 json
    Args:
        path: 配置文件路径
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        if path.suffix.lower() == ".json":
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        else:
            with open(path, "rb") as f:
                data = tomllib.load(f)
    except (OSError, json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
        raise ConfigError(f"failed to read config {path}: {e}") from e
    return parse_config(data)


def apply_overrides(
    config: RunConfig,
    seeds: Optional[list[int]] = None,
    out: Optional[str] = None,
    algorithm: Optional[str] = None,
    iterations: Optional[int] = None,
) -> RunConfig:
    """命令行覆盖配置字段，返回新的 RunConfig"""
    data = serialize_config(config)
    if seeds:
        data["seeds"] = list(seeds)
    if out:
        data["out"] = out
    if algorithm:
        data["algorithm"] = algorithm
    if iterations is not None:
        data["iterations"] = iterations
    return parse_config(data)
