from fastapi import APIRouter
from pydantic import BaseModel, validator
from typing import List, Optional
import logging

from app.biquotient.actions import CircleWeights, TorusWeights
from app.biquotient.classify import catalog_lookup
from app.biquotient.errors import BiquotientError, ConsistencyError
from app.biquotient.report import build_circle_report, build_torus_report
from app.utils.response import success_response, error_response

router = APIRouter(tags=["Biquotient"])
logger = logging.getLogger("biquotient")

# 单个请求允许的最大 oracle 深度
MAX_ORACLE_DEPTH = 512


def _check_oracle(v):
    if v is not None and not 2 <= v <= MAX_ORACLE_DEPTH:
        raise ValueError(f"oracle 深度必须在 2 到 {MAX_ORACLE_DEPTH} 之间")
    return v


class CircleRequest(BaseModel):
    weights: List[int]
    oracle: Optional[int] = None

    @validator("weights")
    def validate_weights(cls, v):
        if len(v) != 4:
            raise ValueError("圆周作用需要4个整数 a, b, c, d")
        return v

    _oracle = validator("oracle", allow_reuse=True)(_check_oracle)


class TorusRequest(BaseModel):
    rows: List[List[int]]
    oracle: Optional[int] = None

    @validator("rows")
    def validate_rows(cls, v):
        if len(v) != 2 or any(len(row) != 4 for row in v):
            raise ValueError("环面权重必须是 2×4 整数矩阵")
        return v

    _oracle = validator("oracle", allow_reuse=True)(_check_oracle)


@router.post("/circle")
async def check_circle(request: CircleRequest):
    """
    判定圆周作用 (a,b,c,d)

    - 返回自由性判定、可容许类、w₂ 与微分同胚类型
    - 提供 oracle 时同时运行不动点枚举并给出对照结果
    """
    try:
        report = build_circle_report(CircleWeights(*request.weights), oracle_depth=request.oracle)
        logger.info(f"圆周作用 {request.weights}: {report.verdict.status.value}")
        return success_response(report.to_dict())
    except ConsistencyError:
        raise
    except BiquotientError as e:
        logger.error(f"圆周作用判定失败: {e.message}")
        return error_response(e.code, e.message)


@router.post("/torus")
async def check_torus(request: TorusRequest):
    """判定环面作用，返回规范形式、格指数与微分同胚类型"""
    try:
        weights = TorusWeights(tuple(tuple(row) for row in request.rows))
        report = build_torus_report(weights, oracle_depth=request.oracle)
        logger.info(f"环面作用 {request.rows}: {report.verdict.status.value}")
        return success_response(report.to_dict())
    except ConsistencyError:
        raise
    except BiquotientError as e:
        logger.error(f"环面作用判定失败: {e.message}")
        return error_response(e.code, e.message)


@router.get("/catalog/{dim}")
async def get_catalog(dim: int, manifold: Optional[str] = None):
    """维数4或5的静态目录；非法维数由全局错误处理器转为 1001"""
    rows = catalog_lookup(dim, manifold)
    return success_response([row.dict() for row in rows])
