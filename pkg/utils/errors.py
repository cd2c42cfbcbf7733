"""
统一异常定义
所有模块抛出的结构化错误都继承自 CzsdError
"""


class CzsdError(Exception):
    """项目内所有错误的基类"""


# ============== 参数 / 配置 ==============

class InvalidParamsError(CzsdError, ValueError):
    """参数不满足前置条件"""


class ConfigError(CzsdError):
    """运行配置无法解析或校验失败"""


class DimensionMismatchError(CzsdError, ValueError):
    """维度不一致（拓扑 / 问题 / 压缩器 / 初值）"""


# ============== 图 ==============

class NonSymmetricError(CzsdError, ValueError):
    """邻接矩阵不对称"""


class NegativeWeightError(CzsdError, ValueError):
    """邻接矩阵含负权重"""


class DisconnectedError(CzsdError):
    """图不连通"""


class ConnectivityFailureError(CzsdError):
    """随机几何图在重采样预算内始终不连通"""


class LambdaOutOfRangeError(CzsdError, ValueError):
    """lambda_{n+1} 不在 [lambda_2, lambda_n] 内"""


# ============== 数值 ==============

class NonFiniteInputError(CzsdError, ValueError):
    """压缩器输入含 NaN / Inf"""


class NonFiniteEvaluationError(CzsdError):
    """函数求值得到 NaN / Inf"""


class NonFiniteStateError(CzsdError):
    """算法状态发散（超过阈值或非有限值）"""

    def __init__(self, message: str, k: int = -1):
        super().__init__(message)
        self.k = k


class UnsupportedKindError(CzsdError):
    """该问题类型不支持所请求的操作"""


class RequiresAnalyticGradientError(CzsdError):
    """Lyapunov 诊断需要解析梯度"""


class EmptyStreamError(CzsdError):
    """空记录流上的 P(T) 未定义"""


# ============== 运行 ==============

class AllSeedsDivergedError(CzsdError):
    """所有种子的运行都发散"""
