"""
通信拓扑模块
构建无向加权图的 Laplacian、谱常数，以及诊断所需的矩阵 E 与 F_M
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Optional, Union

import numpy as np

from utils.errors import (
    ConnectivityFailureError,
    DisconnectedError,
    InvalidParamsError,
    LambdaOutOfRangeError,
    NegativeWeightError,
    NonSymmetricError,
)
from utils.utils import get_logger

logger = get_logger("graph")

SYMMETRY_TOL = 1e-10
CONNECTIVITY_TOL = 1e-8
GEOMETRIC_RETRIES = 100


def _frozen(matrix: np.ndarray) -> np.ndarray:
    matrix = np.array(matrix, dtype=float, copy=True)
    matrix.setflags(write=False)
    return matrix


# ============== 数据结构 ==============

@dataclass(frozen=True, eq=False)
class Topology:
    """不可变的通信拓扑及其谱信息"""
    n: int
    adjacency: np.ndarray
    laplacian: np.ndarray
    eigenvalues: np.ndarray      # 升序, eigenvalues[0] ≈ 0
    eigenvectors: np.ndarray     # 列向量与 eigenvalues 对应
    spectral_radius: float       # rho(L) = lambda_n
    fiedler: float               # rho_2(L) = lambda_2
    connected: bool
    resamples: int = 0
    positions: Optional[np.ndarray] = field(default=None, repr=False)

    @cached_property
    def projector_e(self) -> np.ndarray:
        """E = I - (1/n) 1 1^T"""
        return _frozen(np.eye(self.n) - np.full((self.n, self.n), 1.0 / self.n))

    @cached_property
    def fm(self) -> np.ndarray:
        """默认 lambda_{n+1} 下的 F_M（按需构建）"""
        return build_fm(self)

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(np.triu(self.adjacency, k=1)))

    @property
    def neighbor_messages(self) -> int:
        """逐边约定下每轮的消息数：sum_i |N_i|"""
        return int(np.count_nonzero(self.adjacency))

    def neighbors(self, i: int) -> list[int]:
        return [int(j) for j in np.flatnonzero(self.adjacency[i])]


# ============== 构建 ==============

def build_topology(
    adjacency: Union[np.ndarray, list],
    tol: float = SYMMETRY_TOL,
    resamples: int = 0,
    positions: Optional[np.ndarray] = None,
) -> Topology:
    """
    由对称邻接矩阵构建拓扑
    Args:
        adjacency: n×n 非负权重矩阵，对角为 0
        tol: 对称性 / 对角线容差（相对于最大权重）
        resamples: 生成该图时的重采样次数（仅记录）
        positions: 节点坐标（几何图，可选）
    Returns:
        Topology；不连通时 connected=False，不抛错
    """
    A = np.asarray(adjacency, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise InvalidParamsError(f"adjacency must be a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidParamsError("adjacency contains non-finite entries")

    scale = max(1.0, float(np.max(np.abs(A))))
    asym = float(np.max(np.abs(A - A.T)))
    if asym > tol * scale:
        raise NonSymmetricError(f"adjacency asymmetric: max |A - A^T| = {asym:.3e}")
    if np.any(A < 0):
        raise NegativeWeightError(f"adjacency has negative weight {float(A.min()):.3e}")
    if float(np.max(np.abs(np.diag(A)))) > tol * scale:
        raise InvalidParamsError("adjacency diagonal must be zero")

    # 对称化并清零对角，消除容差内的扰动
    A = 0.5 * (A + A.T)
    np.fill_diagonal(A, 0.0)

    n = A.shape[0]
    L = np.diag(A.sum(axis=1)) - A
    eigenvalues, eigenvectors = np.linalg.eigh(L)
    order = np.argsort(eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    eigenvectors = eigenvectors[:, order]

    spectral_radius = float(max(eigenvalues[-1], 0.0))
    fiedler = float(eigenvalues[1]) if n > 1 else 0.0
    connected = n == 1 or fiedler > CONNECTIVITY_TOL * max(1.0, spectral_radius)

    return Topology(
        n=n,
        adjacency=_frozen(A),
        laplacian=_frozen(L),
        eigenvalues=_frozen(eigenvalues),
        eigenvectors=_frozen(eigenvectors),
        spectral_radius=spectral_radius,
        fiedler=fiedler,
        connected=bool(connected),
        resamples=resamples,
        positions=None if positions is None else _frozen(positions),
    )


def random_geometric_sphere(
    n: int,
    angular_threshold: float,
    rng_seed: Optional[int] = None,
    max_retries: int = GEOMETRIC_RETRIES,
) -> Topology:
    """
    单位球面上的随机几何图：两点夹角不超过阈值时连边（权重 1），不连通则重采样
    Args:
        n: agent 数（≥ 2）
        angular_threshold: 角度阈值（度），范围 (0, 180)
        rng_seed: 随机种子
        max_retries: 重采样预算
    Returns:
        连通的 Topology，resamples 记录额外采样次数
    """
    if n < 2:
        raise InvalidParamsError(f"random_geometric_sphere needs n >= 2, got {n}")
    if not 0.0 < angular_threshold <= 180.0:
        raise InvalidParamsError(f"angular_threshold must be in (0, 180], got {angular_threshold}")

    rng = np.random.default_rng(rng_seed)
    threshold = math.radians(angular_threshold)

    for attempt in range(max_retries + 1):
        points = rng.standard_normal((n, 3))
        norms = np.linalg.norm(points, axis=1, keepdims=True)
        points = points / np.where(norms > 0, norms, 1.0)
        angles = np.arccos(np.clip(points @ points.T, -1.0, 1.0))
        A = (angles <= threshold).astype(float)
        np.fill_diagonal(A, 0.0)
        topology = build_topology(A, resamples=attempt, positions=points)
        if topology.connected:
            if attempt:
                logger.info(f"geometric graph connected after {attempt} resample(s) (n={n}, threshold={angular_threshold}°)")
            return topology

    raise ConnectivityFailureError(
        f"no connected graph after {max_retries} resamples (n={n}, threshold={angular_threshold}°); "
        "the threshold is too small for this agent count"
    )


def path_graph(n: int) -> Topology:
    """单位权重路径图"""
    A = np.zeros((n, n))
    for i in range(n - 1):
        A[i, i + 1] = A[i + 1, i] = 1.0
    return build_topology(A)


def ring_graph(n: int) -> Topology:
    """单位权重环图（n ≤ 2 时退化为路径图）"""
    if n <= 2:
        return path_graph(n)
    A = np.zeros((n, n))
    for i in range(n):
        j = (i + 1) % n
        A[i, j] = A[j, i] = 1.0
    return build_topology(A)


def complete_graph(n: int) -> Topology:
    """单位权重完全图"""
    A = np.ones((n, n)) - np.eye(n)
    return build_topology(A)


# ============== F_M ==============

def build_fm(topology: Topology, lambda_choice: Optional[float] = None) -> np.ndarray:
    """
    构建 F_M = [q Q] diag(lambda_{n+1}^{-1}, Lambda_1^{-1}) [q Q]^T
    Args:
        topology: 连通拓扑
        lambda_choice: lambda_{n+1}，须在 [lambda_2, lambda_n] 内；默认 lambda_2（n=1 时为 1）
    Returns:
        n×n 对称正定矩阵，满足 F_M L = L F_M = E
    """
    if not topology.connected:
        raise DisconnectedError("F_M requires a connected topology")

    n = topology.n
    if n == 1:
        lam = 1.0 if lambda_choice is None else float(lambda_choice)
        if lam <= 0:
            raise LambdaOutOfRangeError(f"lambda_(n+1) must be positive, got {lam}")
        return _frozen(np.array([[1.0 / lam]]))

    lam_lo, lam_hi = topology.fiedler, topology.spectral_radius
    lam = lam_lo if lambda_choice is None else float(lambda_choice)
    slack = 1e-12 * max(1.0, lam_hi)
    if not lam_lo - slack <= lam <= lam_hi + slack:
        raise LambdaOutOfRangeError(
            f"lambda_(n+1)={lam} outside [{lam_lo:.6g}, {lam_hi:.6g}]"
        )

    q = np.full((n, 1), 1.0 / math.sqrt(n))
    Q = topology.eigenvectors[:, 1:]
    inv = 1.0 / topology.eigenvalues[1:]
    fm = (q @ q.T) / lam + (Q * inv) @ Q.T
    return _frozen(0.5 * (fm + fm.T))


# ============== 边表 I/O ==============

def read_edge_list(path: Union[str, Path], n: Optional[int] = None) -> Topology:
    """
    读取边表文件：每行 `i j weight`（0 起始），# 开头为注释
    Args:
        path: 文件路径
        n: 节点数；默认取最大下标 + 1
    """
    edges: list[tuple[int, int, float]] = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise InvalidParamsError(f"{path}:{lineno}: expected 'i j [weight]', got {raw.strip()!r}")
            i, j = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) == 3 else 1.0
            edges.append((i, j, w))

    size = n if n is not None else (max((max(i, j) for i, j, _ in edges), default=-1) + 1)
    if size <= 0:
        raise InvalidParamsError(f"{path}: empty edge list and no node count given")
    return build_topology(edges_to_adjacency(edges, size))


def edges_to_adjacency(edges: list[tuple[int, int, float]], n: int) -> np.ndarray:
    """边表转对称邻接矩阵"""
    A = np.zeros((n, n))
    for i, j, w in edges:
        if not (0 <= i < n and 0 <= j < n):
            raise InvalidParamsError(f"edge ({i}, {j}) out of range for n={n}")
        if i == j:
            raise InvalidParamsError(f"self-loop on node {i}")
        A[i, j] = A[j, i] = w
    return A


def write_edge_list(topology: Topology, path: Union[str, Path]):
    """写出上三角边表"""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"# n={topology.n}\n")
        rows, cols = np.nonzero(np.triu(topology.adjacency, k=1))
        for i, j in zip(rows, cols):
            f.write(f"{int(i)} {int(j)} {float(topology.adjacency[i, j])!r}\n")
