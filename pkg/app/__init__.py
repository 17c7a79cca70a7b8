# 双商分类应用包
