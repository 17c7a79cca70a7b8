"""
模2示性类计算

GF(2) 上按次数截断的多项式环、2-根乘积、有效自由圆周作用到 U(2)×U(2) 的提升、
极大2-子群上诱导的拉回，以及商流形的第二 Stiefel–Whitney 类。
所有计算截断在2次。
"""
import logging
from dataclasses import dataclass
from enum import Enum
from math import gcd
from typing import Dict, FrozenSet, Iterable, Mapping, Sequence, Tuple, Union

from app.biquotient.actions import CircleWeights
from app.biquotient.errors import ConsistencyError, InvalidInputError, PreconditionError
from app.biquotient.freeness import AdmissibilityClass, admissibility_class, circle_effectively_free

logger = logging.getLogger("biquotient")

DEGREE_BOUND = 2

Monomial = Tuple[int, ...]


class GF2Poly:
    """
    GF(2)[x₁,…,xₙ] 中次数不超过 degree_bound 的多项式，生成元都是1次

    系数隐含为1，terms 只记录出现的单项式（指数元组）；相同单项式相加即抵消。
    """

    __slots__ = ("generators", "terms", "degree_bound")

    def __init__(self, generators: Sequence[str], terms: Iterable[Monomial] = (), degree_bound: int = DEGREE_BOUND):
        generators = tuple(generators)
        if len(set(generators)) != len(generators):
            raise InvalidInputError(f"生成元重复: {generators}")
        if degree_bound < 0:
            raise InvalidInputError(f"次数上界必须非负: {degree_bound}")
        collected = set()
        for monomial in terms:
            monomial = tuple(monomial)
            if len(monomial) != len(generators) or any(e < 0 for e in monomial):
                raise InvalidInputError(f"单项式 {monomial} 与生成元 {generators} 不匹配")
            if sum(monomial) <= degree_bound:
                collected ^= {monomial}
        self.generators: Tuple[str, ...] = generators
        self.terms: FrozenSet[Monomial] = frozenset(collected)
        self.degree_bound = degree_bound

    # ---- 构造

    @classmethod
    def zero(cls, generators: Sequence[str], degree_bound: int = DEGREE_BOUND) -> "GF2Poly":
        return cls(generators, (), degree_bound)

    @classmethod
    def one(cls, generators: Sequence[str], degree_bound: int = DEGREE_BOUND) -> "GF2Poly":
        return cls(generators, [(0,) * len(generators)], degree_bound)

    @classmethod
    def generator(cls, generators: Sequence[str], name: str, degree_bound: int = DEGREE_BOUND) -> "GF2Poly":
        generators = tuple(generators)
        if name not in generators:
            raise InvalidInputError(f"未知生成元: {name}")
        monomial = tuple(1 if g == name else 0 for g in generators)
        return cls(generators, [monomial], degree_bound)

    def _same_ring(self, generators: Sequence[str], terms: Iterable[Monomial]) -> "GF2Poly":
        return GF2Poly(generators, terms, self.degree_bound)

    def _coerce(self, other) -> "GF2Poly":
        if isinstance(other, int) and not isinstance(other, bool):
            return GF2Poly.one(self.generators, self.degree_bound) if other % 2 else GF2Poly.zero(self.generators, self.degree_bound)
        if not isinstance(other, GF2Poly):
            return NotImplemented
        if other.generators != self.generators or other.degree_bound != self.degree_bound:
            raise InvalidInputError(
                f"多项式环不一致: {self.generators}/{self.degree_bound} 与 {other.generators}/{other.degree_bound}"
            )
        return other

    # ---- 运算

    def __add__(self, other) -> "GF2Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self._same_ring(self.generators, self.terms ^ other.terms)

    __radd__ = __add__
    __sub__ = __add__
    __rsub__ = __add__

    def __mul__(self, other) -> "GF2Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return gf2_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "GF2Poly":
        if exponent < 0:
            raise InvalidInputError("不支持负指数，请使用 inverse()")
        result = GF2Poly.one(self.generators, self.degree_bound)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and not isinstance(other, bool):
            other = self._coerce(other)
        if not isinstance(other, GF2Poly):
            return NotImplemented
        return (self.generators, self.degree_bound, self.terms) == (
            other.generators,
            other.degree_bound,
            other.terms,
        )

    def __hash__(self) -> int:
        return hash((self.generators, self.degree_bound, self.terms))

    def __bool__(self) -> bool:
        return bool(self.terms)

    # ---- 查询

    @property
    def degree(self) -> int:
        """最高次数，零多项式为 -1"""
        return max((sum(m) for m in self.terms), default=-1)

    @property
    def constant_term(self) -> int:
        return 1 if (0,) * len(self.generators) in self.terms else 0

    def homogeneous_part(self, degree: int) -> "GF2Poly":
        return self._same_ring(self.generators, (m for m in self.terms if sum(m) == degree))

    def truncate(self, degree_bound: int) -> "GF2Poly":
        if degree_bound > self.degree_bound:
            raise InvalidInputError(f"截断上界 {degree_bound} 超过当前上界 {self.degree_bound}")
        return GF2Poly(self.generators, self.terms, degree_bound)

    def substitute(self, images: Mapping[str, "GF2Poly"], target: Sequence[str]) -> "GF2Poly":
        """环同态：把每个生成元替换为目标环中的多项式"""
        result = GF2Poly.zero(target, self.degree_bound)
        for monomial in self.terms:
            term = GF2Poly.one(target, self.degree_bound)
            for name, exponent in zip(self.generators, monomial):
                if not exponent:
                    continue
                if name not in images:
                    raise InvalidInputError(f"缺少生成元 {name} 的像")
                term = term * images[name] ** exponent
            result = result + term
        return result

    def inverse(self) -> "GF2Poly":
        """截断环中的单位元求逆：(1+x)⁻¹ = Σ xᵏ"""
        if not self.constant_term:
            raise PreconditionError(f"常数项为0，不是单位元: {self}")
        one = GF2Poly.one(self.generators, self.degree_bound)
        nilpotent = self + one
        result, power = one, one
        for _ in range(self.degree_bound):
            power = power * nilpotent
            result = result + power
        return result

    # ---- 显示

    def _monomial_str(self, monomial: Monomial) -> str:
        factors = []
        for name, exponent in zip(self.generators, monomial):
            if exponent == 1:
                factors.append(name)
            elif exponent > 1:
                factors.append(f"{name}^{exponent}")
        return "·".join(factors) or "1"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        ordered = sorted(self.terms, key=lambda m: (sum(m), tuple(-e for e in m)))
        return " + ".join(self._monomial_str(m) for m in ordered)

    def __repr__(self) -> str:
        return f"GF2Poly({self}; bound={self.degree_bound})"


def gf2_mul(p: GF2Poly, q: GF2Poly) -> GF2Poly:
    """截断乘积，特征2下相同单项式两两抵消"""
    if p.generators != q.generators or p.degree_bound != q.degree_bound:
        raise InvalidInputError(f"多项式环不一致: {p.generators} 与 {q.generators}")
    collected = set()
    for left in p.terms:
        for right in q.terms:
            monomial = tuple(x + y for x, y in zip(left, right))
            if sum(monomial) <= p.degree_bound:
                collected ^= {monomial}
    return GF2Poly(p.generators, collected, p.degree_bound)


# ---------------------------------------------------------------- 2-根


class GroupDescriptor(str, Enum):
    SU2_SU2 = "SU(2)xSU(2)"
    CIRCLE = "S1"
    U2_U2 = "U(2)xU(2)"


# H*(BQ_H) ≅ GF(2)[w]，Q_H = ⟨−1⟩ ⊂ S¹
W_RING: Tuple[str, ...] = ("w",)
# U(2)×U(2) 的极大2-子群的对偶基
U2_GENERATORS: Tuple[str, ...] = ("λ1", "λ2", "μ1", "μ2")


def doubled_generators() -> Tuple[str, ...]:
    """Q_{G'}×Q_{G'} 的生成元，x⊗1 与 1⊗x 分别记为 x⊗1、x⊗2"""
    return tuple(f"{name}⊗{slot}" for slot in (1, 2) for name in U2_GENERATORS)


def two_roots_product(group: Union[GroupDescriptor, str], degree_bound: int = DEGREE_BOUND, slot: int = 0) -> GF2Poly:
    """
    Π(1+λ)，λ 取遍（带重数的）非平凡2-根

    S¹ 与 SU(2)×SU(2) 没有非平凡2-根，返回常数1；
    U(2)×U(2) 的2-根为 λ₁−λ₂、μ₁−μ₂，重数各为2。slot 为1或2时在双倍生成元环中取相应张量位。
    """
    try:
        group = GroupDescriptor(group)
    except ValueError:
        raise InvalidInputError(f"未知的群描述: {group!r}")
    if group is GroupDescriptor.CIRCLE:
        return GF2Poly.one(W_RING, degree_bound)
    if group is GroupDescriptor.SU2_SU2:
        return GF2Poly.one((), degree_bound)

    if slot not in (0, 1, 2):
        raise InvalidInputError(f"张量位必须是0、1或2: {slot}")
    generators = doubled_generators() if slot else U2_GENERATORS
    names = [f"{name}⊗{slot}" for name in U2_GENERATORS] if slot else list(U2_GENERATORS)
    lam1, lam2, mu1, mu2 = (GF2Poly.generator(generators, n, degree_bound) for n in names)
    return ((1 + lam1 + lam2) * (1 + mu1 + mu2)) ** 2


# ---------------------------------------------------------------- 提升与拉回


@dataclass(frozen=True)
class TwoGroupHom:
    """
    2-群同态在上同调上的拉回

    images[i] 是第 i 个目标生成元的像，表示为源生成元上的 GF(2) 向量
    """

    source_rank: int
    target_generators: Tuple[str, ...]
    images: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.images) != len(self.target_generators):
            raise InvalidInputError("像的个数与目标生成元个数不一致")
        for image in self.images:
            if len(image) != self.source_rank or any(bit not in (0, 1) for bit in image):
                raise InvalidInputError(f"不是合法的 GF(2) 向量: {image}")

    def pullback(self, poly: GF2Poly, source: Sequence[str] = W_RING) -> GF2Poly:
        if tuple(poly.generators) != self.target_generators:
            raise InvalidInputError(f"多项式的生成元 {poly.generators} 与同态的目标 {self.target_generators} 不一致")
        if len(source) != self.source_rank:
            raise InvalidInputError(f"源生成元个数应为 {self.source_rank}")
        zero = GF2Poly.zero(source, poly.degree_bound)
        basis = [GF2Poly.generator(source, name, poly.degree_bound) for name in source]
        mapping: Dict[str, GF2Poly] = {}
        for name, image in zip(self.target_generators, self.images):
            value = zero
            for bit, generator in zip(image, basis):
                if bit:
                    value = value + generator
            mapping[name] = value
        return poly.substitute(mapping, source)

    def restricted_to_slot(self, slot: int) -> "TwoGroupHom":
        """f₁ 或 f₂ 分量，目标为单个 Q_{G'}"""
        suffix = f"⊗{slot}"
        pairs = [(name[: -len(suffix)], image) for name, image in zip(self.target_generators, self.images) if name.endswith(suffix)]
        if not pairs:
            raise InvalidInputError(f"没有张量位 {slot} 的生成元")
        names, images = zip(*pairs)
        return TwoGroupHom(self.source_rank, tuple(names), tuple(images))


Pair = Tuple[int, int]


@dataclass(frozen=True)
class LiftedAction:
    """
    U(2)×U(2) 上的自由作用
    z∗(A,B) = (diag(zᵃ,1)·A·diag(z^{(a+c)/2}, z^{(a−c)/2})⁻¹, diag(zᵇ,1)·B·diag(z^{(b+d)/2}, z^{(b−d)/2})⁻¹)
    """

    left: Tuple[Pair, Pair]
    right: Tuple[Pair, Pair]

    def exponents(self) -> Tuple[int, ...]:
        """与 doubled_generators() 同序的八个对角指数"""
        (l1, l2), (m1, m2) = self.left
        (r1, r2), (s1, s2) = self.right
        return (l1, l2, m1, m2, r1, r2, s1, s2)

    @property
    def freeness_gcd(self) -> int:
        (a, _), (b, _) = self.left
        (half_ac, _), (half_bd, _) = self.right
        return gcd(gcd(a, half_ac), gcd(b, half_bd))

    def determinant_defect(self) -> Pair:
        """每个因子上左指数和减右指数和；为0说明作用与行列式映射交换"""
        return tuple(sum(l) - sum(r) for l, r in zip(self.left, self.right))


@dataclass(frozen=True)
class ParitySplit:
    odd_factor: int
    even_factor: int
    # 奇数指数放在第一个因子之后的权重
    weights: CircleWeights

    @property
    def swapped(self) -> bool:
        return self.odd_factor != 0


def _require_gcd4(weights: CircleWeights, what: str) -> None:
    cls = admissibility_class(weights)
    if cls is not AdmissibilityClass.GCD4:
        raise PreconditionError(f"{what}要求 gcd(a²−c², b²−d²) = 4，而 {weights.values} 属于 {cls.value}")


def parity_split(weights: CircleWeights) -> ParitySplit:
    """a 与 b 奇偶性相反；交换两个因子使奇数指数位于第一个因子"""
    _require_gcd4(weights, "奇偶拆分")
    if weights.a % 2 == weights.b % 2:
        raise ConsistencyError(f"{weights.values} 中 a、b 奇偶性相同，与 gcd4 类矛盾")
    if weights.a % 2:
        return ParitySplit(odd_factor=0, even_factor=1, weights=weights)
    return ParitySplit(odd_factor=1, even_factor=0, weights=weights.swapped_factors())


def u2_lift(weights: CircleWeights) -> LiftedAction:
    """gcd4 类的有效自由作用提升为 U(2)×U(2) 上轨道相同的自由作用"""
    _require_gcd4(weights, "U(2)×U(2) 提升")
    a, b, c, d = weights.values
    lift = LiftedAction(
        left=((a, 0), (b, 0)),
        right=(((a + c) // 2, (a - c) // 2), ((b + d) // 2, (b - d) // 2)),
    )
    if lift.freeness_gcd != 1:
        raise ConsistencyError(f"{weights.values} 的提升不自由，gcd = {lift.freeness_gcd}")
    return lift


def pullback_hom(lift: LiftedAction) -> TwoGroupHom:
    """在 z = −1 处取八个指数的奇偶性，得到 Q_H → Q_{G'}×Q_{G'} 的拉回"""
    return TwoGroupHom(
        source_rank=1,
        target_generators=doubled_generators(),
        images=tuple((e % 2,) for e in lift.exponents()),
    )


def borel_image_check(cls: GF2Poly) -> bool:
    """H*(BS¹) 在 H*(BQ_H) = GF(2)[w] 中的像是 GF(2)[w²]"""
    if cls.generators != W_RING:
        raise InvalidInputError(f"类必须位于 GF(2)[w] 中: {cls.generators}")
    if cls.degree > 2:
        raise InvalidInputError(f"只检查2次以内的类: {cls}")
    w_squared = GF2Poly.generator(W_RING, "w", cls.degree_bound) ** 2
    return not cls.homogeneous_part(1) and cls.homogeneous_part(2) in (GF2Poly.zero(W_RING, cls.degree_bound), w_squared)


def total_sw_class(weights: CircleWeights) -> GF2Poly:
    """
    商流形的全 Stiefel–Whitney 类（截断到2次），作为 GF(2)[w] 中的元素

    w = φ_G*(Π(1+λ))·φ_H*(Π(1+ρ))⁻¹；gcd1 类直接计算，gcd4 类经 U(2)×U(2) 提升计算。
    """
    verdict = circle_effectively_free(weights)
    if not verdict.effectively_free:
        raise PreconditionError(f"{weights.values} 不是有效自由作用")
    circle_factor = two_roots_product(GroupDescriptor.CIRCLE)

    if admissibility_class(weights) is AdmissibilityClass.GCD1:
        group_factor = two_roots_product(GroupDescriptor.SU2_SU2)
        pulled = TwoGroupHom(source_rank=1, target_generators=(), images=()).pullback(group_factor)
    else:
        split = parity_split(weights)
        hom = pullback_hom(u2_lift(split.weights))
        pulled = hom.pullback(two_roots_product(GroupDescriptor.U2_U2, slot=1))
        logger.debug(f"{weights.values} 经提升得到 Bf₁* 的像 {pulled}")

    total = pulled * circle_factor.inverse()
    if not borel_image_check(total):
        raise ConsistencyError(f"{weights.values} 的示性类 {total} 不在 Borel 像中")
    return total


def w2_of_circle_quotient(weights: CircleWeights) -> int:
    """第二 Stiefel–Whitney 类：0 对应 S³×S²，1 对应 S³×̂S²"""
    total = total_sw_class(weights)
    w_squared = GF2Poly.generator(W_RING, "w", total.degree_bound) ** 2
    return 1 if total.homogeneous_part(2) == w_squared else 0
