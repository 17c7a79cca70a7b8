# 服务端工具：统一响应、错误处理、并发控制与进程池
