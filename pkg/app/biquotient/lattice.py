"""
环面权重矩阵的规范化

在有理行空间中取形如 (ν,α,0,γ)、(0,β,κ,δ) 的整数基，ν = κ = 1 时读出 (α,β,γ,δ)，
再用共轭与交换对称把它化为确定的规范代表元。
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import reduce as fold
from itertools import product
from typing import List, Optional, Sequence, Tuple

import sympy as sp

try:
    from sympy.core.intfunc import igcdex
except ImportError:  # sympy < 1.13
    from sympy.core.numbers import igcdex

from app.biquotient.actions import (
    P1,
    P2,
    Q1,
    Q2,
    Matrix,
    NormalizedTorus,
    SymmetryMove,
    TorusWeights,
    content,
)
from app.biquotient.errors import ConsistencyError, InvalidInputError
from app.biquotient.freeness import (
    FreenessStatus,
    Witness,
    stabilizer_family_witness,
    torus_fixed_point_oracle,
    torus_free,
    torus_oracle_window,
)

logger = logging.getLogger("biquotient")


class NormalizationStatus(str, Enum):
    OK = "ok"
    DEGENERATE = "degenerate"
    NOT_EFFECTIVELY_FREE = "not-effectively-free"


@dataclass(frozen=True)
class NormalizationResult:
    """
    规范化结果

    basis 是原坐标下的新基 (ν,α,0,γ)、(0,β,κ,δ)（尚未做符号规范化），
    moves 记录从该基到 normalized 所用的对称变换。
    lattice_index 是原行格在新基张成的格中的指数，等于 |D|。
    """

    status: NormalizationStatus
    determinant: int
    normalized: Optional[NormalizedTorus] = None
    basis: Optional[Matrix] = None
    lattice_index: int = 1
    witness: Optional[Witness] = None
    moves: Tuple[SymmetryMove, ...] = ()

    def __post_init__(self):
        if self.lattice_index < 1:
            raise ConsistencyError(f"格指数必须为正: {self.lattice_index}")
        if self.status is NormalizationStatus.OK:
            first, second = self.basis
            if first[P2] != 0 or second[P1] != 0:
                raise ConsistencyError(f"新基的形状不正确: {self.basis}")
            if content(first) != 1 or content(second) != 1:
                raise ConsistencyError(f"新基的行不是本原向量: {self.basis}")

    @property
    def ok(self) -> bool:
        return self.status is NormalizationStatus.OK


def _rational(value) -> sp.Rational:
    """精确有理数：int、Fraction、sympy 有理数或形如 "1/2" 的字符串，不接受浮点数"""
    if isinstance(value, Fraction):
        return sp.Rational(value.numerator, value.denominator)
    if isinstance(value, sp.Rational) or (isinstance(value, int) and not isinstance(value, bool)):
        return sp.Rational(value)
    if isinstance(value, str):
        try:
            return sp.Rational(value)
        except (TypeError, ValueError, sp.SympifyError):
            raise InvalidInputError(f"不是有理数: {value!r}")
    raise InvalidInputError(f"分量必须是精确有理数，而不是 {type(value).__name__}: {value!r}")


def primitive_vector(vector: Sequence) -> Tuple[int, ...]:
    """有理向量所在射线上内容为1的整数向量，首个非零分量取正"""
    entries = [_rational(x) for x in vector]
    if all(x == 0 for x in entries):
        raise InvalidInputError("零向量没有本原向量")
    scale = fold(sp.ilcm, (int(x.q) for x in entries), 1)
    integers = [int(x * scale) for x in entries]
    g = content(integers)
    integers = [x // g for x in integers]
    leading = next(x for x in integers if x != 0)
    if leading < 0:
        integers = [-x for x in integers]
    return tuple(integers)


def _span_element_vanishing_at(weights: TorusWeights, column: int) -> Tuple[int, ...]:
    """行空间中在给定列上为0的元素（在相差倍数的意义下唯一）"""
    span = sp.Matrix(weights.rows)
    coefficients = sp.Matrix([list(weights.column(column))]).nullspace()[0]
    return primitive_vector(list(coefficients.T * span))


def _oriented(vector: Tuple[int, ...], pivot: int) -> Tuple[int, ...]:
    # 对相应环面坐标取共轭，使主元为正
    return tuple(-x for x in vector) if vector[pivot] < 0 else vector


def _quotient_witness(coefficients: Tuple[int, int], determinant: int) -> Witness:
    """
    ν 或 κ 不为 ±1 时，元素 (x, y) mod |D| 固定 ((1,0),(1,0)) 且不在中心
    """
    x, y = coefficients
    g = content((x, y, determinant))
    order = abs(determinant) // g
    return Witness(order, ((x // g) % order, (y // g) % order), point=(0, 0))


def _sign_moves(signs: Tuple[int, int, int, int]) -> List[SymmetryMove]:
    s_alpha, s_beta, _, s_delta = signs
    moves = []
    if s_beta < 0:
        moves.append(SymmetryMove.conjugate_sphere(Q1))
    if s_delta < 0:
        moves.append(SymmetryMove.conjugate_sphere(Q2))
    if s_alpha * s_beta < 0:
        moves.extend([SymmetryMove.conjugate_torus(0), SymmetryMove.conjugate_sphere(P1)])
    return moves


def _canonical_key(candidate: NormalizedTorus):
    alpha, beta, gamma, delta = candidate.as_tuple()
    return (gamma != 0, beta, abs(gamma), gamma < 0, alpha, delta)


def canonical_form(normalized: NormalizedTorus) -> Tuple[NormalizedTorus, Tuple[SymmetryMove, ...]]:
    """
    在符号对称（偶数个负号）与 z↔w 交换下选取规范代表元

    要求 α, β, δ ≥ 0；优先 γ = 0，其次取 (β, |γ|) 字典序最小者。
    """
    best = None
    for swap in (False, True):
        base = normalized.swapped() if swap else normalized
        for signs in product((1, -1), repeat=4):
            if signs[0] * signs[1] * signs[2] * signs[3] != 1:
                continue
            candidate = NormalizedTorus(*(s * v for s, v in zip(signs, base.as_tuple())))
            if min(candidate.alpha, candidate.beta, candidate.delta) < 0:
                continue
            key = _canonical_key(candidate)
            if best is None or key < best[0]:
                moves = [SymmetryMove.swap_torus(), SymmetryMove.swap_spheres()] if swap else []
                best = (key, candidate, tuple(moves + _sign_moves(signs)))
    return best[1], best[2]


def hermite_rows(rows: Sequence[Sequence[int]]) -> Matrix:
    """两行整数矩阵的行格的 Hermite 标准形，只依赖行格本身"""
    first, second = ([int(v) for v in row] for row in rows)
    pivot = next((j for j in range(4) if first[j] or second[j]), None)
    if pivot is None:
        return (0, 0, 0, 0), (0, 0, 0, 0)
    x, y, g = (int(v) for v in igcdex(first[pivot], second[pivot]))
    u, v = first[pivot] // g, second[pivot] // g
    # [[x, y], [−v, u]] 的行列式为1
    first, second = (
        [x * f + y * s for f, s in zip(first, second)],
        [u * s - v * f for f, s in zip(first, second)],
    )
    tail = next((j for j in range(pivot + 1, 4) if second[j]), None)
    if tail is not None:
        if second[tail] < 0:
            second = [-s for s in second]
        q = first[tail] // second[tail]
        first = [f - q * s for f, s in zip(first, second)]
    return tuple(first), tuple(second)


def _column_images(rows: Matrix):
    # 四个球面坐标的共轭与两个球面因子的交换；环面坐标的变换已含在行格里
    for swap in (False, True):
        base = tuple(row[2:] + row[:2] for row in rows) if swap else rows
        for signs in product((1, -1), repeat=4):
            yield tuple(tuple(s * v for s, v in zip(signs, row)) for row in base)


def lattice_canonical_form(weights) -> Matrix:
    """
    权重矩阵在全部对称变换下的规范形式

    幺模重参数化与环面坐标的共轭、交换都不改变行格，球面坐标的变换作用在列上，
    因此取各列像的行格 Hermite 标准形中字典序最小者。接受 TorusWeights 或约化的 2×4 行。
    """
    rows = weights.rows if isinstance(weights, TorusWeights) else tuple(tuple(row) for row in weights)
    return min(hermite_rows(image) for image in _column_images(rows))


def normalize(weights: TorusWeights) -> NormalizationResult:
    """
    把环面作用化为规范形式 ((z p₁, z^α w^β q₁), (w p₂, z^γ w^δ q₂))

    D = det[[a,e],[b,f]]（p₁、p₂ 两列）为0时返回退化结果；
    ν 或 κ 的绝对值不为1时返回非有效自由结果并附见证。
    """
    if any(content(row) != 1 for row in weights.rows):
        raise InvalidInputError(f"输入未约化: {weights.rows}")
    (a, e), (b, f) = (weights.rows[0][P1], weights.rows[0][P2]), (weights.rows[1][P1], weights.rows[1][P2])
    determinant = a * f - e * b
    if determinant == 0:
        witness = stabilizer_family_witness(weights, (0, 0))
        logger.debug(f"{weights.rows} 的 D = 0，作用退化")
        return NormalizationResult(NormalizationStatus.DEGENERATE, determinant=0, witness=witness)

    first = _oriented(_span_element_vanishing_at(weights, P2), P1)
    second = _oriented(_span_element_vanishing_at(weights, P1), P2)
    nu, kappa = first[P1], second[P2]
    if nu != 1 or kappa != 1:
        coefficients = (f, -e) if nu != 1 else (b, -a)
        witness = _quotient_witness(coefficients, determinant)
        logger.debug(f"{weights.rows} 的 ν = {nu}, κ = {kappa}，见证阶 {witness.order}")
        return NormalizationResult(
            NormalizationStatus.NOT_EFFECTIVELY_FREE,
            determinant=determinant,
            basis=None,
            witness=witness,
        )

    raw = NormalizedTorus(first[Q1], second[Q1], first[Q2], second[Q2])
    normalized, moves = canonical_form(raw)
    index = abs(determinant)
    if index > 1:
        logger.debug(f"{weights.rows} 的格指数为 {index}，新基只张成有理行空间中的饱和格")
    return NormalizationResult(
        NormalizationStatus.OK,
        determinant=determinant,
        normalized=normalized,
        basis=(first, second),
        lattice_index=index,
        moves=moves,
    )


def verify_lattice_change(weights: TorusWeights, result: NormalizationResult, window: Optional[int] = None) -> bool:
    """
    用不动点枚举复核基变换：规范作用自由时，原作用应当恰好以阶为 lattice_index 的核有效自由；
    规范作用不自由时，原作用也应当不是有效自由的
    """
    if not result.ok:
        window = window or max(2, result.witness.order if result.witness else 2)
        oracle = torus_fixed_point_oracle(weights, window, max_witnesses=1)
        return oracle.verdict.status in (FreenessStatus.NOT_EFFECTIVELY_FREE, FreenessStatus.DEGENERATE)
    criterion = torus_free(result.normalized)
    index = result.lattice_index
    if not criterion.effectively_free:
        # 规范坐标下阶为 m 的见证，在原环面中的原像阶整除 m·|D|
        window = window or torus_oracle_window(result.normalized) * index
        oracle = torus_fixed_point_oracle(weights, window, max_witnesses=1)
        return oracle.verdict.status is FreenessStatus.NOT_EFFECTIVELY_FREE

    window = window or max(torus_oracle_window(result.normalized), index + 1)
    if window < index:
        logger.warning(f"枚举窗口 {window} 小于格指数 {index}，无法看到完整的核")
    oracle = torus_fixed_point_oracle(weights, window)
    expected = FreenessStatus.FREE if index == 1 else FreenessStatus.EFFECTIVELY_FREE
    return oracle.verdict.status is expected and oracle.verdict.kernel_order == index
