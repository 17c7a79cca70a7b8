# HTTP 路由：圆周/环面判定、目录与范围扫描
