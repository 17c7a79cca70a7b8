"""
圆周与二维环面在 SU(2)×SU(2) 上的双商作用的权重数据

- CircleWeights: 圆周作用的指数 (a,b,c,d)，构造时自动约化
- TorusWeights: T² 在 S³×S³ 上线性作用的 2×4 指数矩阵，列顺序 (p₁,q₁,p₂,q₂)
- NormalizedTorus: 规范形式 (α,β,γ,δ)
- SymmetryMove: 保持商流形微分同胚类型的对称变换
"""
import logging
import operator
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce as fold
from math import gcd
from typing import Optional, Sequence, Tuple, Union

import sympy as sp

from app.biquotient.errors import InvalidInputError, NoLiftError

logger = logging.getLogger("biquotient")

# 输入权重的绝对值上限，超出视为非法输入
MAX_WEIGHT = 10 ** 6

Row = Tuple[int, int, int, int]
Matrix = Tuple[Row, Row]
Pair = Tuple[int, int]

# 列下标
P1, Q1, P2, Q2 = range(4)


def as_weight(value) -> int:
    """校验单个整数权重，拒绝布尔值、浮点数以及超出上限的值"""
    if isinstance(value, bool):
        raise InvalidInputError(f"权重必须是整数，而不是布尔值: {value!r}")
    try:
        number = operator.index(value)
    except TypeError:
        raise InvalidInputError(f"权重必须是整数: {value!r}")
    if abs(number) > MAX_WEIGHT:
        raise InvalidInputError(f"权重绝对值超过上限 {MAX_WEIGHT}: {number}")
    return number


def content(values: Sequence[int]) -> int:
    """整数向量的内容（各分量的最大公约数），零向量返回0"""
    return fold(gcd, values, 0)


def _reduce_vector(values: Sequence[int], what: str) -> Tuple[int, ...]:
    checked = tuple(as_weight(v) for v in values)
    g = content(checked)
    if g == 0:
        raise InvalidInputError(f"{what}不能全为零")
    return tuple(v // g for v in checked)


@dataclass(frozen=True)
class CircleWeights:
    """
    圆周双商作用 z∗(A,B) = (diag(zᵃ,z̄ᵃ)·A·diag(zᶜ,z̄ᶜ)⁻¹, diag(zᵇ,z̄ᵇ)·B·diag(zᵈ,z̄ᵈ)⁻¹)

    构造时除去公因子，原始输入保存在 raw 中
    """

    a: int
    b: int
    c: int
    d: int
    raw: Optional[Row] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        checked = tuple(as_weight(v) for v in (self.a, self.b, self.c, self.d))
        reduced = _reduce_vector(checked, "权重 (a,b,c,d)")
        if self.raw is None:
            object.__setattr__(self, "raw", checked)
        for name, value in zip("abcd", reduced):
            object.__setattr__(self, name, value)

    @property
    def values(self) -> Row:
        return (self.a, self.b, self.c, self.d)

    def swapped_factors(self) -> "CircleWeights":
        """交换两个SU(2)因子（两侧同时作用的自同构）"""
        return CircleWeights(self.b, self.a, self.d, self.c)

    def to_sphere_weights(self) -> Row:
        """同一作用在 S³×S³ 上的 z 指数 (p₁,q₁,p₂,q₂)"""
        (p1, _), (q1, _) = sphere_weights_from_su2(self.a, 0, self.c, 0)
        (p2, _), (q2, _) = sphere_weights_from_su2(self.b, 0, self.d, 0)
        return (p1, q1, p2, q2)


@dataclass(frozen=True)
class TorusWeights:
    """
    T² 在 S³×S³ 上的线性作用

    rows[0] 是 z 的指数 (a,c,e,g)，rows[1] 是 w 的指数 (b,d,f,h)。
    每一行在构造时除以自身的内容。
    """

    rows: Matrix
    raw: Optional[Matrix] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.rows) != 2 or any(len(row) != 4 for row in self.rows):
            raise InvalidInputError("环面权重必须是 2×4 整数矩阵")
        checked = tuple(tuple(as_weight(v) for v in row) for row in self.rows)
        reduced = tuple(_reduce_vector(row, f"权重矩阵第{i + 1}行") for i, row in enumerate(checked))
        if self.raw is None:
            object.__setattr__(self, "raw", checked)
        object.__setattr__(self, "rows", reduced)

    def column(self, j: int) -> Pair:
        """第 j 个复坐标上 (z,w) 的指数"""
        return (self.rows[0][j], self.rows[1][j])

    def minor(self, i: int, j: int) -> int:
        (x1, y1), (x2, y2) = self.column(i), self.column(j)
        return x1 * y2 - x2 * y1

    @property
    def rank(self) -> int:
        return int(sp.Matrix(self.rows).rank())

    @property
    def degenerate(self) -> bool:
        return self.rank < 2


@dataclass(frozen=True)
class NormalizedTorus:
    """规范作用 (z,w)∗((p₁,q₁),(p₂,q₂)) = ((z p₁, z^α w^β q₁), (w p₂, z^γ w^δ q₂))"""

    alpha: int
    beta: int
    gamma: int
    delta: int

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            object.__setattr__(self, name, as_weight(getattr(self, name)))

    def as_tuple(self) -> Row:
        return (self.alpha, self.beta, self.gamma, self.delta)

    @property
    def determinant(self) -> int:
        return self.alpha * self.delta - self.beta * self.gamma

    def swapped(self) -> "NormalizedTorus":
        """交换 z 与 w（同时交换两个球面因子）后的规范形式"""
        return NormalizedTorus(self.delta, self.gamma, self.beta, self.alpha)

    def to_weights(self) -> TorusWeights:
        return TorusWeights(((1, self.alpha, 0, self.gamma), (0, self.beta, 1, self.delta)))


class MoveKind(str, Enum):
    CONJUGATE_TORUS = "conjugate-torus-coordinate"
    CONJUGATE_SPHERE = "conjugate-sphere-coordinate"
    SWAP_TORUS = "swap-torus-coordinates"
    SWAP_SPHERES = "swap-sphere-factors"
    REPARAMETRIZE = "unimodular-reparametrization"


@dataclass(frozen=True)
class SymmetryMove:
    """
    保持商空间微分同胚类型的变换

    index 从0开始：环面坐标 0=z, 1=w；球面坐标 0..3 = p₁,q₁,p₂,q₂
    """

    kind: MoveKind
    index: Optional[int] = None
    matrix: Optional[Tuple[Pair, Pair]] = None

    def __post_init__(self):
        kind = MoveKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is MoveKind.CONJUGATE_TORUS and self.index not in (0, 1):
            raise InvalidInputError(f"环面坐标下标必须是0或1: {self.index}")
        if kind is MoveKind.CONJUGATE_SPHERE and self.index not in (0, 1, 2, 3):
            raise InvalidInputError(f"球面坐标下标必须在0..3之间: {self.index}")
        if kind is MoveKind.REPARAMETRIZE:
            if self.matrix is None or len(self.matrix) != 2 or any(len(r) != 2 for r in self.matrix):
                raise InvalidInputError("重参数化需要 2×2 整数矩阵")
            matrix = tuple(tuple(as_weight(v) for v in row) for row in self.matrix)
            (p, q), (r, s) = matrix
            if p * s - q * r not in (1, -1):
                raise InvalidInputError(f"重参数化矩阵行列式必须为 ±1: {matrix}")
            object.__setattr__(self, "matrix", matrix)

    @classmethod
    def conjugate_torus(cls, index: int) -> "SymmetryMove":
        return cls(MoveKind.CONJUGATE_TORUS, index=index)

    @classmethod
    def conjugate_sphere(cls, index: int) -> "SymmetryMove":
        return cls(MoveKind.CONJUGATE_SPHERE, index=index)

    @classmethod
    def swap_torus(cls) -> "SymmetryMove":
        return cls(MoveKind.SWAP_TORUS)

    @classmethod
    def swap_spheres(cls) -> "SymmetryMove":
        return cls(MoveKind.SWAP_SPHERES)

    @classmethod
    def reparametrize(cls, matrix) -> "SymmetryMove":
        return cls(MoveKind.REPARAMETRIZE, matrix=matrix)


Weights = Union[CircleWeights, TorusWeights]


def reduce(weights) -> Weights:
    """
    除去公因子

    接受 CircleWeights / TorusWeights（返回同类型的约化副本），
    也接受原始的4元组或 2×4 嵌套序列。结果满足类型不变式，重复调用结果不变。
    """
    if isinstance(weights, CircleWeights):
        return CircleWeights(*weights.values, raw=weights.raw)
    if isinstance(weights, TorusWeights):
        return TorusWeights(weights.rows, raw=weights.raw)
    values = tuple(weights)
    if len(values) == 4 and not any(isinstance(v, (tuple, list)) for v in values):
        return CircleWeights(*values)
    if len(values) == 2:
        return TorusWeights(tuple(tuple(row) for row in values))
    raise InvalidInputError(f"无法识别的权重数据: {weights!r}")


def apply_symmetry(move: SymmetryMove, weights: TorusWeights) -> TorusWeights:
    """对权重矩阵施加对称变换，商空间的微分同胚类型保持不变"""
    rows = [list(row) for row in weights.rows]
    kind = move.kind
    if kind is MoveKind.CONJUGATE_TORUS:
        rows[move.index] = [-v for v in rows[move.index]]
    elif kind is MoveKind.CONJUGATE_SPHERE:
        for row in rows:
            row[move.index] = -row[move.index]
    elif kind is MoveKind.SWAP_TORUS:
        rows.reverse()
    elif kind is MoveKind.SWAP_SPHERES:
        rows = [row[2:] + row[:2] for row in rows]
    else:
        (p, q), (r, s) = move.matrix
        z, w = rows
        rows = [[p * x + q * y for x, y in zip(z, w)], [r * x + s * y for x, y in zip(z, w)]]
        if any(content(row) != 1 for row in rows):
            # 原行格不饱和时 T·W 可能出现非本原行；约化会改变行格，改取同一行格的本原基
            adjusted = primitive_basis(rows)
            logger.debug(f"重参数化后出现非本原行 {rows}，改用同一行格的基 {adjusted}")
            rows = adjusted
    return TorusWeights(tuple(tuple(row) for row in rows))


def primitive_basis(rows: Sequence[Sequence[int]]) -> Matrix:
    """
    同一行格的一组基，两行都是本原向量

    每次只把另一行的整数倍加到非本原的行上，相当于再做一次幺模重参数化，行格不变。
    行格本身必须由本原向量生成（例如约化权重矩阵的行格）。
    """
    first, second = (tuple(as_weight(v) for v in row) for row in rows)
    if content(first) != 1:
        first = _shift_to_primitive(first, second)
    if content(second) != 1:
        second = _shift_to_primitive(second, first)
    return first, second


def _shift_to_primitive(row: Row, other: Row) -> Row:
    # 依次尝试 m = 1, −1, 2, −2, …；秩为2时坏的 m 只落在有限个素数的各一个剩余类里
    m = 1
    while True:
        for shift in (m, -m):
            candidate = tuple(x + shift * y for x, y in zip(row, other))
            if content(candidate) == 1:
                return candidate
        m += 1
        if m > MAX_WEIGHT:
            raise InvalidInputError(f"行格不含本原基，无法表示为约化权重: {(row, other)}")


def sphere_weights_from_su2(A: int, B: int, C: int, D: int) -> Tuple[Pair, Pair]:
    """
    SU(2) 上的双商作用 (z,w)∗U = diag(z^A w^B, ·)·U·diag(z^C w^D, ·)⁻¹
    在 S³ 坐标 (p,q) 下的指数

    由 2×2 矩阵乘法直接得到：p ↦ z^{A−C} w^{B−D} p，q ↦ z^{A+C} w^{B+D} q
    """
    A, B, C, D = (as_weight(v) for v in (A, B, C, D))
    return (A - C, B - D), (A + C, B + D)


def su2_from_sphere_weights(p_weight: Sequence[int], q_weight: Sequence[int]) -> Row:
    """
    S³ 上的作用 (z^{2a} w^{2b} p, z^{2c} w^{2d} q) 对应的 SU(2) 双商指数
    (A,B,C,D) = (a+c, b+d, a−c, b−d)

    逆变换把 p 与 q 的角色互换，轨道相同
    """
    exponents = tuple(as_weight(v) for v in (*p_weight, *q_weight))
    if len(exponents) != 4:
        raise InvalidInputError("p、q 的权重必须各是一对整数")
    odd = [v for v in exponents if v % 2]
    if odd:
        raise NoLiftError(f"奇数指数 {odd} 无法提升为 SU(2) 上的双商作用")
    a, b, c, d = (v // 2 for v in exponents)
    return (a + c, b + d, a - c, b - d)


def circle_canonical_form(weights: CircleWeights) -> CircleWeights:
    """
    圆周作用在对称变换下的规范代表元

    四个对角因子各自可用 Weyl 元共轭改变符号；两个 SU(2) 因子可以整体交换。
    """
    first = (abs(weights.a), abs(weights.c))
    second = (abs(weights.b), abs(weights.d))
    lo, hi = sorted((first, second))
    return CircleWeights(lo[0], hi[0], lo[1], hi[1])
