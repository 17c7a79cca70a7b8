from app.utils.pool import WorkerPool, worker_pool


def test_pool_is_a_singleton():
    assert WorkerPool() is worker_pool


def test_map_ordered_keeps_input_order():
    items = [-3, 2, -1, 0, 5]
    assert worker_pool.map_ordered(abs, items) == [3, 2, 1, 0, 5]
    assert worker_pool.map_ordered(abs, items, workers=2, chunksize=1) == [3, 2, 1, 0, 5]
    worker_pool.shutdown_all()


def test_executor_removed_by_cleanup_is_recreated():
    executor = worker_pool.get_executor(2)
    # 清理线程在两次访问之间关闭了进程池
    with worker_pool._lock:
        info = worker_pool._executors.pop(2)
    info["executor"].shutdown(wait=True)
    worker_pool._touch(2)
    assert 2 not in worker_pool._executors
    assert worker_pool.get_executor(2) is not executor
    worker_pool.shutdown_all()
    assert worker_pool._executors == {}
