from fastapi import APIRouter
from pydantic import BaseModel, validator
from starlette.concurrency import run_in_threadpool
import logging
import os
from typing import Optional

from app.biquotient.errors import BiquotientError, ConsistencyError
from app.biquotient.sweep import DEFAULT_BOUND, enumerate_actions
from app.utils.response import success_response, error_response

router = APIRouter(tags=["Sweep"])
logger = logging.getLogger("biquotient")

# HTTP 扫描允许的最大 bound，更大的范围请使用命令行
SWEEP_MAX_BOUND = int(os.environ.get("SWEEP_MAX_BOUND", 3))
# 4维扫描的是 2×4 矩阵，上限单独设置
SWEEP_MAX_TORUS_BOUND = int(os.environ.get("SWEEP_MAX_TORUS_BOUND", 1))
SWEEP_WORKERS = int(os.environ.get("SWEEP_WORKERS", 1))


class EnumerateRequest(BaseModel):
    dim: int
    bound: Optional[int] = None

    @validator("dim")
    def validate_dim(cls, v):
        if v not in (4, 5):
            raise ValueError("维数必须是4或5")
        return v

    @validator("bound")
    def validate_bound(cls, v):
        if v is not None and v < 0:
            raise ValueError("bound 必须非负")
        return v


@router.post("/enumerate")
async def enumerate_sweep(request: EnumerateRequest):
    """
    扫描 [−bound, bound] 内的规范代表元

    - 返回全部报告与直方图
    - bound 超过上限（5维 SWEEP_MAX_BOUND，4维 SWEEP_MAX_TORUS_BOUND）时拒绝
    """
    bound = request.bound if request.bound is not None else DEFAULT_BOUND[request.dim]
    limit = SWEEP_MAX_BOUND if request.dim == 5 else SWEEP_MAX_TORUS_BOUND
    if bound > limit:
        return error_response(1001, f"bound 超过上限 {limit}，请使用命令行进行更大范围的扫描")
    try:
        reports, summary = await run_in_threadpool(enumerate_actions, request.dim, bound, SWEEP_WORKERS)
        return success_response({"reports": [r.to_dict() for r in reports], "summary": summary.dict()})
    except ConsistencyError:
        raise
    except BiquotientError as e:
        logger.error(f"扫描失败: {e.message}")
        return error_response(e.code, e.message)
