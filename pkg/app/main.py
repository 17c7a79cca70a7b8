from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
import uvicorn
import logging
import os

from app.routers import biquotient, sweep
from app.utils.pool import worker_pool
from app.utils.concurrency import ConcurrencyLimiterMiddleware
from app.utils.error_handler import setup_error_handlers

# 配置日志
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger("biquotient")

# 创建FastAPI应用
app = FastAPI(
    title="双商分类API服务",
    description="判定 SU(2)×SU(2) 上圆周与环面双商作用的自由性，并给出商流形的微分同胚类型",
    version="1.0.0",
)

# 添加CORS中间件
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# 从环境变量读取并发限制配置
max_concurrent_requests = int(os.environ.get("MAX_CONCURRENT_REQUESTS", 200))
sweep_max_concurrent = int(os.environ.get("SWEEP_MAX_CONCURRENT", 4))

# 添加并发控制中间件
app.add_middleware(
    ConcurrencyLimiterMiddleware,
    max_concurrent_requests=max_concurrent_requests,
    sweep_max_concurrent=sweep_max_concurrent,
)

logger.info(f"配置并发控制: 总并发={max_concurrent_requests}, 扫描={sweep_max_concurrent}")

# 注册路由
app.include_router(biquotient.router, prefix="/apiBiquotient")
app.include_router(sweep.router, prefix="/apiBiquotient")

# 设置全局错误处理器
setup_error_handlers(app)


@app.get("/")
async def root():
    return {"message": "双商分类API服务已启动"}


@app.on_event("startup")
async def startup_event():
    logger.info(f"双商分类API服务启动，扫描上限 bound={sweep.SWEEP_MAX_BOUND}，进程数={sweep.SWEEP_WORKERS}")


@app.on_event("shutdown")
async def shutdown_event():
    """应用关闭时执行的事件，关闭进程池"""
    logger.info("双商分类API服务关闭，清理资源")
    worker_pool.shutdown_all()


if __name__ == "__main__":
    # 获取端口，默认3010
    port = int(os.environ.get("PORT", 3010))
    uvicorn.run("app.main:app", host="0.0.0.0", port=port, reload=True)
