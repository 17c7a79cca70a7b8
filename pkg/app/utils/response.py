from typing import Any, Dict, Optional


def success_response(data: Any) -> Dict[str, Any]:
    """
    成功响应格式化

    Args:
        data: 报告、报告列表或目录行

    Returns:
        统一格式的响应字典
    """
    return {
        "errCode": 0,
        "data": data,
        "errMsg": None
    }


def error_response(error_code: int, error_message: str, data: Optional[Any] = None) -> Dict[str, Any]:
    """
    错误响应格式化

    Args:
        error_code: 错误代码（领域错误与 BiquotientError.code 一致）
        error_message: 错误信息
        data: 可选的附加数据，例如拒绝时的见证

    Returns:
        统一格式的响应字典
    """
    return {
        "errCode": error_code,
        "data": data,
        "errMsg": error_message
    }
