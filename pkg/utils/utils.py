import logging
import math
import os
from enum import Enum
from typing import Optional

import numpy as np
from rich.console import Console
from rich.logging import RichHandler

LOG_LEVEL_ENV = "CZSD_LOG_LEVEL"


class Verdict(Enum):
    """验证结论"""
    PASS = "PASS"
    FAIL = "FAIL"

    @classmethod
    def of(cls, ok: bool) -> "Verdict":
        return cls.PASS if ok else cls.FAIL


_console: Optional[Console] = None
_log_configured = False


def get_console() -> Console:
    """
    获取共享的 Rich Console
    Returns:
        console: 全局 Console 实例（输出到 stderr，保持 stdout 干净）
    """
    global _console
    if _console is None:
        _console = Console(stderr=True)
    return _console


def configure_logging(level: Optional[str] = None):
    """
    配置根 logger，使用 RichHandler 输出
    Args:
        level: 日志级别名称；为 None 时读取环境变量 CZSD_LOG_LEVEL，默认 WARNING
    """
    global _log_configured
    level_name = (level or os.environ.get(LOG_LEVEL_ENV, "WARNING")).upper()
    numeric = getattr(logging, level_name, None)
    if not isinstance(numeric, int):
        numeric = logging.WARNING

    root = logging.getLogger("czsd")
    if not _log_configured:
        handler = RichHandler(console=get_console(), show_path=False, rich_tracebacks=True)
        handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
        root.addHandler(handler)
        root.propagate = False
        _log_configured = True
    root.setLevel(numeric)


def get_logger(name: str) -> logging.Logger:
    """
    获取模块 logger
    Args:
        name: 子模块名，如 "graph"
    Returns:
        logger: czsd.<name> logger
    """
    if not _log_configured:
        configure_logging()
    return logging.getLogger(f"czsd.{name}")


# ============== 随机流 ==============

def agent_streams(seed: int, n: int) -> list[np.random.Generator]:
    """
    为每个 agent 派生互不相交的随机子流
    Args:
        seed: 主种子
        n: agent 数
    Returns:
        generators: 长度为 n 的 Generator 列表
    """
    children = np.random.SeedSequence(seed).spawn(n)
    return [np.random.default_rng(child) for child in children]


def iteration_stream(seed: int, k: int, purpose: int = 0) -> np.random.Generator:
    """
    按 (seed, k) 派生固定的测量随机流，保证每轮评估批次可复现且不干扰算法流
    Args:
        seed: 主种子
        k: 迭代序号
        purpose: 用途编号（0 = 度量, 1 = Lyapunov）
    """
    # spawn_key 与 agent_streams 的子流 (0..n-1,) 不重叠
    return np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(2**31 - 1, purpose, k))
    )


# ============== 格式化 ==============

def format_float(value: Optional[float]) -> str:
    """
    CSV 用的浮点格式：最短可回读表示；None 输出空串
    """
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    return repr(value)


def parse_float(text: str) -> Optional[float]:
    """format_float 的逆操作"""
    text = text.strip()
    if not text:
        return None
    return float(text)
