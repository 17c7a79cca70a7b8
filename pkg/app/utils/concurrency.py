import asyncio
import logging
import time
from fastapi import Request
from starlette.middleware.base import BaseHTTPMiddleware
from starlette.types import ASGIApp

logger = logging.getLogger("biquotient")


class ConcurrencyLimiterMiddleware(BaseHTTPMiddleware):
    """
    并发请求限制中间件

    扫描请求（/enumerate）计算量大，使用单独的信号量，与其他请求分开限流
    """

    def __init__(
        self,
        app: ASGIApp,
        max_concurrent_requests: int = 200,
        sweep_max_concurrent: int = 4
    ):
        """
        初始化并发限制器

        Args:
            app: FastAPI应用实例
            max_concurrent_requests: 最大并发请求数
            sweep_max_concurrent: 扫描请求的最大并发数
        """
        super().__init__(app)
        self.semaphore = asyncio.Semaphore(max_concurrent_requests)
        self.sweep_semaphore = asyncio.Semaphore(sweep_max_concurrent)
        self.max_concurrent_requests = max_concurrent_requests
        self.sweep_max_concurrent = sweep_max_concurrent

        # 计数器
        self.current_requests = 0
        self.current_sweep_requests = 0

        logger.info(f"初始化并发限制中间件: 总并发={max_concurrent_requests}, 扫描={sweep_max_concurrent}")

    async def dispatch(self, request: Request, call_next):
        """处理请求的中间件方法"""
        if request.url.path.endswith("/enumerate"):
            async with self.sweep_semaphore:
                self.current_sweep_requests += 1
                try:
                    logger.debug(f"扫描当前并发请求数: {self.current_sweep_requests}/{self.sweep_max_concurrent}")
                    return await self._process_request(request, call_next)
                finally:
                    self.current_sweep_requests -= 1
        async with self.semaphore:
            self.current_requests += 1
            try:
                logger.debug(f"当前并发请求数: {self.current_requests}/{self.max_concurrent_requests}")
                return await call_next(request)
            finally:
                self.current_requests -= 1

    async def _process_request(self, request: Request, call_next):
        """处理请求并记录执行时间"""
        start_time = time.time()
        response = await call_next(request)
        execution_time = time.time() - start_time
        logger.info(f"请求 {request.url.path} 执行时间: {execution_time:.3f}秒")
        return response
