# 双商作用的精确分类库
