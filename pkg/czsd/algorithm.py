"""
CZSD 单轮迭代与精确通信基线 ZSD-PD
"""

import numpy as np

from compress.compressor import compress_rows
from czsd.state import Algorithm, RunState
from utils.errors import NonFiniteStateError
from zoracle.estimator import sample_sphere, zo_gradient

DIVERGENCE_LIMIT = 1e12


def _zo_gradients(state: RunState, mu: float) -> np.ndarray:
    """每个 agent 在自己的随机流上抽取 xi、zeta 并计算两点估计"""
    problem = state.problem
    gz = np.empty_like(state.x)
    for i, rng in enumerate(state.rngs):
        xi = problem.draw(i, rng)
        zeta = sample_sphere(state.p, rng)
        gz[i] = zo_gradient(problem.oracle(i), state.x[i], mu, xi, zeta)
    return gz


def _guard(state: RunState, *arrays: np.ndarray):
    for arr in arrays:
        if not np.all(np.isfinite(arr)) or float(np.max(np.abs(arr))) > DIVERGENCE_LIMIT:
            raise NonFiniteStateError(
                f"{state.algorithm.value} diverged at k={state.k} (|entry| > {DIVERGENCE_LIMIT:g} or non-finite)",
                k=state.k,
            )


def czsd_step(state: RunState) -> RunState:
    """
    执行一轮同步迭代（原地更新并返回 state）
    顺序：通信 -> 零阶梯度 -> 辅助变量 -> 原始/对偶变量 -> 压缩
    原始/对偶更新读取本轮更新前的 z
    """
    k = state.k
    alpha, beta, gamma, mu = state.schedule.at(k)
    omega = state.omega
    L = state.topology.laplacian

    # 通信：sum_j L_ij q_j
    lq = L @ state.q

    gz = _zo_gradients(state, mu)

    coupling = state.z + lq
    x_next = state.x - alpha * beta * coupling - alpha * (gamma * state.v + gz)
    v_next = state.v + alpha * gamma * coupling
    y_next = state.y + omega * state.q
    z_next = state.z + omega * lq
    _guard(state, x_next, v_next)

    q_next = compress_rows(state.compressor, x_next - y_next, state.rngs)

    state.x, state.v, state.y, state.z, state.q = x_next, v_next, y_next, z_next, q_next
    state.last_gz = gz
    state.bits += state.bits_per_round()
    state.k = k + 1
    return state


def zsdpd_step(state: RunState) -> RunState:
    """
    精确通信基线：
    x <- x - alpha (beta L x + gamma v + g), v <- v + alpha gamma L x
    """
    k = state.k
    alpha, beta, gamma, mu = state.schedule.at(k)
    L = state.topology.laplacian

    lx = L @ state.x
    gz = _zo_gradients(state, mu)

    x_next = state.x - alpha * (beta * lx + gamma * state.v + gz)
    v_next = state.v + alpha * gamma * lx
    _guard(state, x_next, v_next)

    state.x, state.v = x_next, v_next
    state.last_gz = gz
    state.bits += state.bits_per_round()
    state.k = k + 1
    return state


def step(state: RunState) -> RunState:
    """按 state.algorithm 分派"""
    if state.algorithm is Algorithm.ZSDPD:
        return zsdpd_step(state)
    return czsd_step(state)


# ============== 不变量探针 ==============

def state_scale(state: RunState) -> float:
    """不变量检查的量纲：max(1, 各状态量的最大绝对值)"""
    return max(
        1.0,
        float(np.max(np.abs(state.v))),
        float(np.max(np.abs(state.z))),
        float(np.max(np.abs(state.y))),
    )


def dual_sum_residual(state: RunState) -> float:
    """||sum_i v_i||_inf，理论上恒为 0"""
    return float(np.max(np.abs(state.v.sum(axis=0))))


def memory_residual(state: RunState) -> float:
    """||z - L y||_max，理论上恒为 0"""
    return float(np.max(np.abs(state.z - state.topology.laplacian @ state.y)))
