"""
自由性判定

对圆周作用与规范化的环面作用，分别给出基于最大公约数的判据，
以及独立的有限阶不动点枚举（oracle）。所有计算都在指数的剩余类上进行，
不做任何复数求值。
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple, Union

from app.biquotient.actions import CircleWeights, NormalizedTorus, TorusWeights, content
from app.biquotient.errors import ConsistencyError, InvalidInputError

logger = logging.getLogger("biquotient")

# (ε, ε′) 的遍历顺序
SIGNS: Tuple[Tuple[int, int], ...] = ((1, 1), (1, -1), (-1, 1), (-1, -1))

# gcd 为0时（无穷稳定子）的见证阶：SU(2) 中大于2的最小阶保证非中心
ZERO_GCD_WITNESS_ORDER = 3
# 环面情形下连续稳定子族的见证阶
FAMILY_WITNESS_ORDER = 2

# 环面模型中四个坐标点，0 表示 (1,0)，1 表示 (0,1)
POINTS: Tuple[Tuple[int, int], ...] = ((0, 0), (0, 1), (1, 0), (1, 1))


class FreenessStatus(str, Enum):
    FREE = "free"
    EFFECTIVELY_FREE = "effectively-free"
    NOT_EFFECTIVELY_FREE = "not-effectively-free"
    DEGENERATE = "degenerate"


class AdmissibilityClass(str, Enum):
    GCD1 = "gcd1"
    GCD4 = "gcd4"
    INADMISSIBLE = "inadmissible"


@dataclass(frozen=True)
class Witness:
    """
    非自由性的见证：有限阶元素 + 被其固定的点

    exponents 是元素在 e^{2πi/order} 下的指数（圆周为 (j,)，环面为 (j,k)）。
    圆周情形用 signs=(ε,ε′) 记录共轭条件 z^{a+εc} = z^{b+ε′d} = 1；
    环面情形用 point 记录坐标点，每个 S³ 因子 0 表示 (1,0)，1 表示 (0,1)。
    """

    order: int
    exponents: Tuple[int, ...]
    point: Optional[Tuple[int, int]] = None
    signs: Optional[Tuple[int, int]] = None
    infinite: bool = False

    @property
    def fixed_point(self) -> str:
        if self.point is not None:
            return "(" + ", ".join("(1,0)" if c == 0 else "(0,1)" for c in self.point) + ")"
        eps, eps2 = self.signs
        return f"z^(a{'+' if eps > 0 else '-'}c)=z^(b{'+' if eps2 > 0 else '-'}d)=1"


@dataclass(frozen=True)
class FreenessVerdict:
    status: FreenessStatus
    kernel_order: int = 1
    witness: Optional[Witness] = None

    def __post_init__(self):
        status = FreenessStatus(self.status)
        object.__setattr__(self, "status", status)
        if self.kernel_order < 1:
            raise ConsistencyError(f"核的阶必须为正: {self.kernel_order}")
        if status is FreenessStatus.FREE and (self.kernel_order != 1 or self.witness is not None):
            raise ConsistencyError("自由作用的核必须平凡且没有见证")
        if status is FreenessStatus.EFFECTIVELY_FREE and (self.kernel_order < 2 or self.witness is not None):
            raise ConsistencyError("有效自由作用必须有非平凡的有限核且没有见证")
        if status is FreenessStatus.NOT_EFFECTIVELY_FREE and self.witness is None:
            raise ConsistencyError("非有效自由的判定必须附带见证")

    @property
    def effectively_free(self) -> bool:
        return self.status in (FreenessStatus.FREE, FreenessStatus.EFFECTIVELY_FREE)


@dataclass(frozen=True)
class OracleResult:
    """不动点枚举的结果"""

    verdict: FreenessVerdict
    max_order: int
    witnesses: Tuple[Witness, ...] = ()
    # 作用在所有坐标上都平凡的非单位元，(阶, 指数)
    central: Tuple[Tuple[int, Tuple[int, ...]], ...] = ()
    infinite_stabilizer: bool = False


def _kills(order: int, exponents: Tuple[int, ...], weight: Tuple[int, ...]) -> bool:
    """元素 e^{2πi·exponents/order} 在权重 weight 上是否平凡"""
    return sum(e * w for e, w in zip(exponents, weight)) % order == 0


def _reduced_circle(weights: Union[CircleWeights, Sequence[int]]) -> CircleWeights:
    """CircleWeights 构造时已约化；原始四元组必须本身就是约化的"""
    if isinstance(weights, CircleWeights):
        return weights
    values = tuple(weights)
    if len(values) != 4:
        raise InvalidInputError(f"圆周作用需要4个整数 a, b, c, d: {values!r}")
    circle = CircleWeights(*values)
    if circle.values != circle.raw:
        raise InvalidInputError(f"输入未约化: {circle.raw}")
    return circle


# ---------------------------------------------------------------- 圆周作用


def circle_gcds(weights: CircleWeights) -> Dict[Tuple[int, int], int]:
    """四个 gcd(a+εc, b+ε′d)"""
    a, b, c, d = weights.values
    return {(e1, e2): gcd(a + e1 * c, b + e2 * d) for e1, e2 in SIGNS}


def circle_effectively_free(weights: Union[CircleWeights, Sequence[int]]) -> FreenessVerdict:
    """作用有效自由当且仅当四个 gcd(a±c, b±d) 都属于 {1,2}；也接受约化的原始四元组"""
    weights = _reduced_circle(weights)
    gcds = circle_gcds(weights)
    offending = [(signs, g) for signs, g in gcds.items() if g not in (1, 2)]
    if not offending:
        values = set(gcds.values())
        if values == {1}:
            return FreenessVerdict(FreenessStatus.FREE)
        if values == {2}:
            return FreenessVerdict(FreenessStatus.EFFECTIVELY_FREE, kernel_order=2)
        raise ConsistencyError(f"gcd 的奇偶性不一致: {gcds}")

    signs, g = min(offending, key=lambda item: item[1] or ZERO_GCD_WITNESS_ORDER)
    order = g or ZERO_GCD_WITNESS_ORDER
    witness = Witness(order, (1,), signs=signs, infinite=g == 0)
    logger.debug(f"{weights.values} 非有效自由，见证阶 {order}，条件 {witness.fixed_point}")
    return FreenessVerdict(FreenessStatus.NOT_EFFECTIVELY_FREE, witness=witness)


def admissibility_class(weights: CircleWeights) -> AdmissibilityClass:
    a, b, c, d = weights.values
    g = gcd(a * a - c * c, b * b - d * d)
    if g == 1:
        return AdmissibilityClass.GCD1
    if g == 4:
        return AdmissibilityClass.GCD4
    return AdmissibilityClass.INADMISSIBLE


def _circle_fixing_signs(weights: CircleWeights, order: int, exponents: Tuple[int, ...]) -> List[Tuple[int, int]]:
    a, b, c, d = weights.values
    return [
        (e1, e2)
        for e1, e2 in SIGNS
        if _kills(order, exponents, (a + e1 * c,)) and _kills(order, exponents, (b + e2 * d,))
    ]


def _circle_central(weights: CircleWeights, order: int, exponents: Tuple[int, ...]) -> bool:
    """z^a = z^c = ±1 且 z^b = z^d = ±1"""
    a, b, c, d = weights.values
    return all(_kills(order, exponents, (m,)) for m in (a - c, b - d, 2 * a, 2 * b))


def circle_fixed_point_oracle(
    weights: CircleWeights, max_order: int, max_witnesses: Optional[int] = None
) -> OracleResult:
    """
    枚举所有阶 n ≤ max_order 的元素 z = e^{2πij/n}（gcd(j,n)=1），
    检验其是否满足某个符号组合下的 z^{a±c} = 1 = z^{b±d}

    满足条件但不在中心的元素都作为见证返回；无穷稳定子（a±c = b±d = 0）另行符号化标记。
    """
    if max_order < 2:
        raise InvalidInputError(f"枚举深度必须至少为2: {max_order}")
    a, b, c, d = weights.values
    zero_patterns = [(e1, e2) for e1, e2 in SIGNS if a + e1 * c == 0 and b + e2 * d == 0]

    witnesses: List[Witness] = []
    central: List[Tuple[int, Tuple[int, ...]]] = []
    for n in range(2, max_order + 1):
        if max_witnesses is not None and len(witnesses) >= max_witnesses:
            break
        # gcd(j,n) = 1 时 z^m = 1 当且仅当 n | m，与 j 无关
        fixing = _circle_fixing_signs(weights, n, (1,))
        if not fixing:
            continue
        is_central = _circle_central(weights, n, (1,))
        for j in range(1, n):
            if gcd(j, n) != 1:
                continue
            if is_central:
                central.append((n, (j,)))
            else:
                witnesses.extend(Witness(n, (j,), signs=signs) for signs in fixing)

    if zero_patterns and not witnesses:
        witnesses.append(Witness(ZERO_GCD_WITNESS_ORDER, (1,), signs=zero_patterns[0], infinite=True))

    if witnesses:
        verdict = FreenessVerdict(FreenessStatus.NOT_EFFECTIVELY_FREE, witness=witnesses[0])
    elif central:
        verdict = FreenessVerdict(FreenessStatus.EFFECTIVELY_FREE, kernel_order=len(central) + 1)
    else:
        verdict = FreenessVerdict(FreenessStatus.FREE)
    return OracleResult(
        verdict=verdict,
        max_order=max_order,
        witnesses=tuple(witnesses),
        central=tuple(central),
        infinite_stabilizer=bool(zero_patterns),
    )


def circle_oracle_depth(weights: CircleWeights) -> int:
    """判据与 oracle 对照时使用的枚举深度 2·max(|a²−c²|, |b²−d²|, 1)"""
    a, b, c, d = weights.values
    return 2 * max(abs(a * a - c * c), abs(b * b - d * d), 1)


# ---------------------------------------------------------------- 环面作用


def torus_free(normalized: NormalizedTorus) -> FreenessVerdict:
    """规范作用自由当且仅当 α = δ = 1 且 |1−βγ| = 1"""
    alpha, beta, gamma, delta = normalized.as_tuple()
    if min(alpha, beta, delta) < 0:
        raise InvalidInputError(f"α、β、δ 必须非负，请先做符号规范化: {normalized.as_tuple()}")

    if delta != 1:
        # (1, w) 固定 ((1,0),(0,1))，w 为 δ 次单位根
        order = delta or FAMILY_WITNESS_ORDER
        witness = Witness(order, (0, 1), point=(0, 1), infinite=delta == 0)
    elif alpha != 1:
        order = alpha or FAMILY_WITNESS_ORDER
        witness = Witness(order, (1, 0), point=(1, 0), infinite=alpha == 0)
    else:
        m = abs(1 - beta * gamma)
        if m == 1:
            return FreenessVerdict(FreenessStatus.FREE)
        # (w̄^β, w) 固定 ((0,1),(0,1))
        order = m or FAMILY_WITNESS_ORDER
        witness = Witness(order, ((-beta) % order, 1 % order), point=(1, 1), infinite=m == 0)
    return FreenessVerdict(FreenessStatus.NOT_EFFECTIVELY_FREE, witness=witness)


def _active_columns(point: Tuple[int, int]) -> Tuple[int, int]:
    return point[0], 2 + point[1]


def stabilizer_family_witness(weights: TorusWeights, point: Tuple[int, int]) -> Optional[Witness]:
    """
    当该点两个活跃列的 2×2 子式为0时，整数解 (n₁,n₂) 给出一族固定该点的元素 (t^{n₁}, t^{n₂})

    返回族中作用非平凡的最小阶元素；若整族在所有坐标上平凡则返回 None
    """
    first, second = (weights.column(j) for j in _active_columns(point))
    if first[0] * second[1] - first[1] * second[0] != 0:
        return None
    x, y = first if first != (0, 0) else second
    if (x, y) == (0, 0):
        n1, n2 = 1, 0
    else:
        g = gcd(x, y)
        n1, n2 = y // g, -x // g
    g = content([n1 * zx + n2 * wy for zx, wy in (weights.column(j) for j in range(4))])
    if g == 0:
        return None
    order = next(n for n in range(2, g + 2) if g % n)
    return Witness(order, (n1 % order, n2 % order), point=point, infinite=True)


def torus_fixed_point_oracle(
    weights: TorusWeights, max_order: int, max_witnesses: Optional[int] = None
) -> OracleResult:
    """
    枚举公共阶 n ≤ max_order 的元素 (z,w) = (e^{2πij/n}, e^{2πik/n})，
    在四个坐标点上检验两个活跃权重是否同时被消去

    在四个坐标上都平凡的元素视为中心元素（属于无效核），其余不动元素作为见证。
    """
    if max_order < 2:
        raise InvalidInputError(f"枚举深度必须至少为2: {max_order}")
    columns = [weights.column(j) for j in range(4)]
    infinite_points = [p for p in POINTS if weights.minor(*_active_columns(p)) == 0]

    witnesses: List[Witness] = []
    central: List[Tuple[int, Tuple[int, ...]]] = []
    for n in range(2, max_order + 1):
        if max_witnesses is not None and len(witnesses) >= max_witnesses:
            break
        for j in range(n):
            for k in range(n):
                if gcd(gcd(j, k), n) != 1:
                    continue
                killed = [_kills(n, (j, k), column) for column in columns]
                if all(killed):
                    central.append((n, (j, k)))
                    continue
                witnesses.extend(
                    Witness(n, (j, k), point=p)
                    for p in POINTS
                    if all(killed[col] for col in _active_columns(p))
                )

    if infinite_points and not witnesses:
        for p in infinite_points:
            family = stabilizer_family_witness(weights, p)
            if family is not None:
                witnesses.append(family)
                break

    if witnesses:
        verdict = FreenessVerdict(FreenessStatus.NOT_EFFECTIVELY_FREE, witness=witnesses[0])
    elif infinite_points:
        # 整族元素在所有坐标上平凡：无效核无穷
        verdict = FreenessVerdict(FreenessStatus.DEGENERATE)
    elif central:
        verdict = FreenessVerdict(FreenessStatus.EFFECTIVELY_FREE, kernel_order=len(central) + 1)
    else:
        verdict = FreenessVerdict(FreenessStatus.FREE)
    return OracleResult(
        verdict=verdict,
        max_order=max_order,
        witnesses=tuple(witnesses),
        central=tuple(central),
        infinite_stabilizer=bool(infinite_points),
    )


def torus_oracle_window(normalized: NormalizedTorus) -> int:
    """与判据对照时的枚举窗口 max(2, α, δ, |1−βγ|) + 1"""
    alpha, beta, gamma, delta = normalized.as_tuple()
    return max(2, alpha, delta, abs(1 - beta * gamma)) + 1


# ---------------------------------------------------------------- 见证复核


def validate_witness(witness: Witness, weights: Union[CircleWeights, TorusWeights]) -> bool:
    """直接代入复核：见证元素确实固定所记录的点，并且不在中心"""
    order, exponents = witness.order, witness.exponents
    if order < 1:
        return False
    if isinstance(weights, CircleWeights):
        if witness.signs is None or len(exponents) != 1:
            return False
        a, b, c, d = weights.values
        e1, e2 = witness.signs
        fixes = _kills(order, exponents, (a + e1 * c,)) and _kills(order, exponents, (b + e2 * d,))
        return fixes and not _circle_central(weights, order, exponents)
    if witness.point is None or len(exponents) != 2:
        return False
    killed = [_kills(order, exponents, weights.column(j)) for j in range(4)]
    return all(killed[col] for col in _active_columns(witness.point)) and not all(killed)
