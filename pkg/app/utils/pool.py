import logging
import threading
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, Iterable, List

logger = logging.getLogger("biquotient")

# 闲置超过该秒数的进程池会被关闭
IDLE_TIMEOUT = 600
CLEANUP_INTERVAL = 300


class WorkerPool:
    """扫描任务的进程池管理器，按进程数缓存 ProcessPoolExecutor"""

    _instance = None
    _lock = threading.Lock()
    _executors: Dict[int, Dict[str, Any]] = {}

    def __new__(cls):
        with cls._lock:
            if cls._instance is None:
                cls._instance = super(WorkerPool, cls).__new__(cls)
                cls._instance._executors = {}
                # 添加清理线程
                cleanup_thread = threading.Thread(target=cls._instance._cleanup_idle_executors, daemon=True)
                cleanup_thread.start()
            return cls._instance

    def get_executor(self, workers: int) -> ProcessPoolExecutor:
        """获取指定进程数的进程池，不存在则创建"""
        with self._lock:
            info = self._executors.get(workers)
            if info is None:
                logger.info(f"创建进程池: {workers} 个进程")
                info = {"executor": ProcessPoolExecutor(max_workers=workers), "last_used": time.time()}
                self._executors[workers] = info
            info["last_used"] = time.time()
            return info["executor"]

    def _touch(self, workers: int) -> None:
        # 清理线程可能已经删除了这个进程池
        with self._lock:
            info = self._executors.get(workers)
            if info is not None:
                info["last_used"] = time.time()

    def map_ordered(self, fn: Callable, items: Iterable, workers: int = 1, chunksize: int = 64) -> List:
        """
        并行执行 fn 并按输入顺序返回结果

        workers ≤ 1 时在当前进程中顺序执行；结果与进程数无关
        """
        items = list(items)
        if workers <= 1 or len(items) <= 1:
            return [fn(item) for item in items]
        executor = self.get_executor(workers)
        results = list(executor.map(fn, items, chunksize=max(1, chunksize)))
        self._touch(workers)
        return results

    def shutdown_all(self):
        with self._lock:
            for workers, info in list(self._executors.items()):
                logger.info(f"关闭进程池: {workers} 个进程")
                info["executor"].shutdown(wait=True)
                del self._executors[workers]

    def _cleanup_idle_executors(self):
        """清理长时间未使用的进程池"""
        while True:
            time.sleep(CLEANUP_INTERVAL)
            current_time = time.time()
            with self._lock:
                idle = [w for w, info in self._executors.items() if current_time - info["last_used"] > IDLE_TIMEOUT]
                for workers in idle:
                    try:
                        logger.info(f"关闭闲置进程池: {workers} 个进程")
                        self._executors[workers]["executor"].shutdown(wait=False)
                        del self._executors[workers]
                    except Exception as e:
                        logger.error(f"关闭进程池失败: {str(e)}")


# 创建进程池单例实例
worker_pool = WorkerPool()
