from typing import Any, Optional

# 错误代码，与HTTP响应中的errCode保持一致
INVALID_INPUT = 1001
NO_LIFT = 1002
PRECONDITION = 1003
NOT_EFFECTIVELY_FREE = 1004
CONSISTENCY = 9001


class BiquotientError(Exception):
    """所有领域错误的基类，携带稳定的数字错误代码"""

    code = 1000

    def __init__(self, message: str, code: Optional[int] = None):
        super().__init__(message)
        self.message = message
        if code is not None:
            self.code = code

    def __str__(self) -> str:
        return self.message


class InvalidInputError(BiquotientError, ValueError):
    """输入不合法：全零权重、非幺模矩阵、未约化输入等"""

    code = INVALID_INPUT


class NoLiftError(BiquotientError):
    """S³权重含奇数指数，无法提升为SU(2)上的双商作用"""

    code = NO_LIFT


class PreconditionError(BiquotientError):
    code = PRECONDITION


class NotEffectivelyFreeError(BiquotientError):
    """
    分类时的类型化拒绝

    verdict 字段保存完整的判定结果（含见证元素），供调用方输出
    """

    code = NOT_EFFECTIVELY_FREE

    def __init__(self, message: str, verdict: Any = None):
        super().__init__(message)
        self.verdict = verdict


class ConsistencyError(BiquotientError):
    """内部一致性检查失败，意味着存在程序缺陷"""

    code = CONSISTENCY
