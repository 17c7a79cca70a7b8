"""
范围扫描与验证套件

enumerate: 在 [−bound, bound] 内枚举规范代表元并分类，输出报告流与直方图；
verify: 判据与 oracle 对照、对称不变性、可容许类等价、w₂ 二分等性质的全量检查。
每个工作项都是纯函数，结果按输入顺序合并，与进程数无关。
"""
import logging
import random
from collections import Counter
from functools import partial
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel

from app.biquotient.actions import (
    CircleWeights,
    Matrix,
    NormalizedTorus,
    SymmetryMove,
    TorusWeights,
    apply_symmetry,
    circle_canonical_form,
    content,
)
from app.biquotient.classify import assess_circle, assess_torus
from app.biquotient.errors import BiquotientError, ConsistencyError, InvalidInputError
from app.biquotient.freeness import (
    AdmissibilityClass,
    FreenessStatus,
    FreenessVerdict,
    Witness,
    admissibility_class,
    circle_effectively_free,
    circle_fixed_point_oracle,
    circle_gcds,
    circle_oracle_depth,
    torus_fixed_point_oracle,
    torus_free,
    torus_oracle_window,
)
from app.biquotient.lattice import lattice_canonical_form, normalize, verify_lattice_change
from app.biquotient.report import Report, WitnessModel, build_circle_report, build_torus_report, verdicts_agree
from app.biquotient.swclass import GF2Poly, parity_split, u2_lift, w2_of_circle_quotient
from app.utils.pool import worker_pool

logger = logging.getLogger("biquotient")

# 随机重参数化所用的幺模矩阵
UNIMODULAR = (((1, 1), (0, 1)), ((1, 0), (1, 1)), ((0, 1), (1, 0)), ((1, -1), (0, 1)), ((2, 1), (1, 1)))
# 格变换检查中矩阵元素的绝对值上限
LATTICE_SAMPLE_BOUND = 3
# 环面对照扫描的 α、β、|γ|、δ 上限
TORUS_VERIFY_BOUND = 8
# 构造行格指数大于1的样本时的尝试次数
UNSATURATED_ATTEMPTS = 20
# GF(2) 截断多项式环的随机性质检查次数
GF2_RING_CHECKS = 10_000
# 圆周验证时每个工作项包含的四元组个数
VERIFY_BATCH = 512
MISMATCH_REPORT_LIMIT = 50
# 未给出 bound 时按维数取默认值；4维扫描 2×4 矩阵，规模随 bound 增长很快
DEFAULT_BOUND = {5: 2, 4: 1}

GF2_RING = ("x", "y", "z")
GF2_MONOMIALS = [m for m in product(range(3), repeat=3) if sum(m) <= 2]


class SweepSummary(BaseModel):
    dim: int
    bound: int
    raw_count: int
    canonical_count: int
    histogram: Dict[str, int]
    statuses: Dict[str, int]


class Mismatch(BaseModel):
    suite: str
    weights: str
    detail: str
    witness: Optional[WitnessModel] = None


class VerifySummary(BaseModel):
    passed: bool
    bound: int
    depth: Optional[int]
    suites: Dict[str, int]
    mismatch_count: int
    mismatches: List[Mismatch]


def _check_bound(bound: int) -> None:
    if isinstance(bound, bool) or not isinstance(bound, int) or bound < 0:
        raise InvalidInputError(f"bound 必须是非负整数: {bound!r}")


# ---------------------------------------------------------------- 枚举


def reduced_circle_tuples(bound: int) -> List[Tuple[int, ...]]:
    """[−bound, bound]⁴ 中内容为1的四元组，按字典序"""
    _check_bound(bound)
    return [values for values in product(range(-bound, bound + 1), repeat=4) if content(values) == 1]


def circle_representatives(bound: int) -> Tuple[int, List[Tuple[int, ...]]]:
    """约化四元组的个数，以及按字典序排列的规范代表元"""
    reduced = reduced_circle_tuples(bound)
    representatives = {circle_canonical_form(CircleWeights(*values)).values for values in reduced}
    return len(reduced), sorted(representatives)


def torus_representatives(bound: int) -> Tuple[int, List[Matrix]]:
    """
    [−bound, bound] 中两行都约化的 2×4 权重矩阵个数，以及每个对称类中字典序最小的矩阵

    对称类由 lattice_canonical_form 判定，矩阵个数为 (本原行数)²，bound = 2 时已有约30万个
    """
    _check_bound(bound)
    primitive = [row for row in product(range(-bound, bound + 1), repeat=4) if content(row) == 1]
    classes: Dict[Matrix, Matrix] = {}
    # 按字典序遍历，每类第一次出现的矩阵就是最小者
    for rows in product(primitive, repeat=2):
        classes.setdefault(lattice_canonical_form(rows), rows)
    return len(primitive) ** 2, sorted(classes.values())


def _circle_report(values: Tuple[int, ...]) -> Report:
    return build_circle_report(CircleWeights(*values))


def _torus_report(rows: Matrix) -> Report:
    return build_torus_report(TorusWeights(rows))


def enumerate_actions(dim: int, bound: int, workers: int = 1) -> Tuple[List[Report], SweepSummary]:
    if dim == 5:
        raw, representatives = circle_representatives(bound)
        worker = _circle_report
    elif dim == 4:
        raw, representatives = torus_representatives(bound)
        worker = _torus_report
    else:
        raise InvalidInputError(f"维数必须是4或5: {dim!r}")

    logger.info(f"开始扫描: {dim}维, bound={bound}, 原始 {raw} 个, 规范代表元 {len(representatives)} 个")
    reports = worker_pool.map_ordered(worker, representatives, workers)
    histogram = Counter(r.diffeo.value for r in reports if r.diffeo is not None)
    statuses = Counter(r.verdict.status.value for r in reports)
    summary = SweepSummary(
        dim=dim,
        bound=bound,
        raw_count=raw,
        canonical_count=len(representatives),
        histogram=dict(sorted(histogram.items())),
        statuses=dict(sorted(statuses.items())),
    )
    logger.info(f"扫描结束: {summary.histogram}")
    return reports, summary


# ---------------------------------------------------------------- 验证


def _flipped(verdict: FreenessVerdict) -> FreenessVerdict:
    """故障注入：把判据结论取反"""
    if verdict.effectively_free:
        return FreenessVerdict(FreenessStatus.NOT_EFFECTIVELY_FREE, witness=Witness(2, (1,), signs=(1, 1)))
    return FreenessVerdict(FreenessStatus.FREE)


def _mismatch(suite: str, weights: str, detail: str, witness: Optional[Witness] = None) -> Mismatch:
    return Mismatch(suite=suite, weights=weights, detail=detail, witness=WitnessModel.from_witness(witness))


def _check_circle(values: Tuple[int, ...], depth: Optional[int] = None, inject_fault: bool = False):
    weights = CircleWeights(*values)
    label = ",".join(map(str, values))
    counts = Counter()
    mismatches: List[Mismatch] = []

    truth = circle_effectively_free(weights)
    criterion = _flipped(truth) if inject_fault else truth
    oracle = circle_fixed_point_oracle(weights, depth or circle_oracle_depth(weights), max_witnesses=1)
    counts["criterion-oracle"] += 1
    if not verdicts_agree(criterion, oracle.verdict):
        witness = oracle.verdict.witness or criterion.witness
        detail = f"判据 {criterion.status.value}/{criterion.kernel_order}，oracle {oracle.verdict.status.value}/{oracle.verdict.kernel_order}"
        mismatches.append(_mismatch("criterion-oracle", label, detail, witness))

    gcds = set(circle_gcds(weights).values())
    cls = admissibility_class(weights)
    counts["admissibility"] += 1
    if (gcds == {1}) != (cls is AdmissibilityClass.GCD1) or (gcds == {2}) != (cls is AdmissibilityClass.GCD4):
        mismatches.append(_mismatch("admissibility", label, f"gcd 模式 {sorted(gcds)} 与 {cls.value} 不一致"))

    if cls is AdmissibilityClass.GCD4:
        counts["parity"] += 1
        counts["lift"] += 1
        try:
            lift = u2_lift(parity_split(weights).weights)
            if lift.freeness_gcd != 1:
                mismatches.append(_mismatch("lift", label, f"提升的 gcd = {lift.freeness_gcd}"))
        except ConsistencyError as e:
            suite = "parity" if weights.a % 2 == weights.b % 2 else "lift"
            mismatches.append(_mismatch(suite, label, str(e)))

    if truth.effectively_free:
        counts["w2"] += 1
        try:
            w2 = w2_of_circle_quotient(weights)
            if w2 != (0 if cls is AdmissibilityClass.GCD1 else 1):
                mismatches.append(_mismatch("w2", label, f"{cls.value} 类得到 w₂ = {w2}"))
        except BiquotientError as e:
            mismatches.append(_mismatch("w2", label, str(e)))
    return counts, mismatches


def _check_circle_batch(batch: Sequence[Tuple[int, ...]], depth: Optional[int] = None, inject_fault: bool = False):
    counts = Counter()
    mismatches: List[Mismatch] = []
    for values in batch:
        item_counts, item_mismatches = _check_circle(values, depth, inject_fault)
        counts.update(item_counts)
        mismatches.extend(item_mismatches)
    return counts, mismatches


def _check_torus(values: Tuple[int, ...], depth: Optional[int] = None, inject_fault: bool = False):
    normalized = NormalizedTorus(*values)
    label = ",".join(map(str, values))
    truth = torus_free(normalized)
    criterion = _flipped(truth) if inject_fault else truth
    oracle = torus_fixed_point_oracle(
        normalized.to_weights(), depth or torus_oracle_window(normalized), max_witnesses=1
    )
    mismatches = []
    if not verdicts_agree(criterion, oracle.verdict):
        witness = oracle.verdict.witness or criterion.witness
        detail = f"判据 {criterion.status.value}，oracle {oracle.verdict.status.value}"
        mismatches.append(_mismatch("torus-criterion-oracle", label, detail, witness))
    return Counter({"torus-criterion-oracle": 1}), mismatches


def _torus_class(weights: TorusWeights):
    assessment = assess_torus(weights)
    return assessment.verdict.status.value, assessment.verdict.kernel_order, assessment.diffeo


def _circle_class(weights: CircleWeights):
    assessment = assess_circle(weights)
    return assessment.verdict.status.value, assessment.verdict.kernel_order, assessment.diffeo


def _random_torus_move(rng: random.Random) -> SymmetryMove:
    kind = rng.randrange(5)
    if kind == 0:
        return SymmetryMove.conjugate_torus(rng.randrange(2))
    if kind == 1:
        return SymmetryMove.conjugate_sphere(rng.randrange(4))
    if kind == 2:
        return SymmetryMove.swap_torus()
    if kind == 3:
        return SymmetryMove.swap_spheres()
    return SymmetryMove.reparametrize(rng.choice(UNIMODULAR))


def _random_circle_image(rng: random.Random, weights: CircleWeights) -> CircleWeights:
    values = list(weights.values)
    if rng.random() < 0.5:
        values[rng.randrange(4)] *= -1
    else:
        values = [values[1], values[0], values[3], values[2]]
    return CircleWeights(*values)


def _unsaturated(rng: random.Random, normalized: NormalizedTorus) -> Optional[TorusWeights]:
    """M·W，|det M| > 1 且两行仍然本原，原行格在饱和格中的指数为 |det M|"""
    rows = normalized.to_weights().rows
    for _ in range(UNSATURATED_ATTEMPTS):
        (p, q), (r, s) = [[rng.randint(-2, 2) for _ in range(2)] for _ in range(2)]
        if abs(p * s - q * r) < 2:
            continue
        image = (
            tuple(p * x + q * y for x, y in zip(*rows)),
            tuple(r * x + s * y for x, y in zip(*rows)),
        )
        if all(content(row) == 1 for row in image):
            return TorusWeights(image)
    return None


def _symmetry_suite(bound: int, samples: int, seed: int) -> Tuple[int, List[Mismatch]]:
    rng = random.Random(seed)
    mismatches = []
    checked = 0
    limit = max(bound, 1)
    for _ in range(samples):
        normalized = NormalizedTorus(
            rng.randint(0, limit), rng.randint(0, limit), rng.randint(-limit, limit), rng.randint(0, limit)
        )
        # 规范形式的行格指数为1，另取一个行格指数大于1的矩阵 M·W
        for weights in (normalized.to_weights(), _unsaturated(rng, normalized)):
            if weights is None:
                continue
            moved = weights
            for _ in range(rng.randint(1, 3)):
                moved = apply_symmetry(_random_torus_move(rng), moved)
            checked += 1
            before, after = _torus_class(weights), _torus_class(moved)
            if before != after:
                detail = f"{weights.rows} → {moved.rows}: {before} ≠ {after}"
                mismatches.append(_mismatch("symmetry", str(weights.rows), detail))

        values = [rng.randint(-limit, limit) for _ in range(4)]
        if not any(values):
            continue
        checked += 1
        circle = CircleWeights(*values)
        image = _random_circle_image(rng, circle)
        if _circle_class(circle) != _circle_class(image):
            mismatches.append(_mismatch("symmetry", ",".join(map(str, values)), f"{circle.values} → {image.values}"))
    return checked, mismatches


def _lattice_suite(bound: int, samples: int, seed: int) -> Tuple[int, List[Mismatch]]:
    rng = random.Random(seed + 1)
    limit = max(1, min(bound, LATTICE_SAMPLE_BOUND))
    mismatches = []
    checked = 0
    while checked < samples:
        rows = tuple(tuple(rng.randint(-limit, limit) for _ in range(4)) for _ in range(2))
        if any(not any(row) for row in rows):
            continue
        checked += 1
        weights = TorusWeights(rows)
        result = normalize(weights)
        if not verify_lattice_change(weights, result):
            detail = f"状态 {result.status.value}，格指数 {result.lattice_index}"
            mismatches.append(_mismatch("lattice-change", str(weights.rows), detail, result.witness))
    return checked, mismatches


def _random_gf2_poly(rng: random.Random) -> GF2Poly:
    return GF2Poly(GF2_RING, rng.sample(GF2_MONOMIALS, rng.randint(0, len(GF2_MONOMIALS))))


def _gf2_ring_suite(checks: int, seed: int) -> Tuple[int, List[Mismatch]]:
    """截断环的结合律、交换律、分配律、Frobenius、截断幂等与单位元求逆"""
    rng = random.Random(seed + 2)
    mismatches = []
    for _ in range(checks):
        p, q, r = (_random_gf2_poly(rng) for _ in range(3))
        failed = []
        if (p * q) * r != p * (q * r):
            failed.append("associativity")
        if p * q != q * p:
            failed.append("commutativity")
        if p * (q + r) != p * q + p * r:
            failed.append("distributivity")
        if (p + q) ** 2 != p ** 2 + q ** 2:
            failed.append("frobenius")
        if p.truncate(1).truncate(1) != p.truncate(1) or (p * q).truncate(1) != p.truncate(1) * q.truncate(1):
            failed.append("truncation")
        if p.constant_term and p * p.inverse() != 1:
            failed.append("inverse")
        if failed:
            mismatches.append(_mismatch("gf2-ring", f"{p}; {q}; {r}", ", ".join(failed)))
    return checks, mismatches


def verify_suites(
    bound: int,
    depth: Optional[int] = None,
    samples: int = 1000,
    seed: int = 0,
    workers: int = 1,
    inject_fault: bool = False,
    ring_checks: int = GF2_RING_CHECKS,
) -> VerifySummary:
    """运行全部性质检查；任何不一致都记录在 mismatches 中"""
    _check_bound(bound)
    if depth is not None and depth < 2:
        raise InvalidInputError(f"oracle 深度必须至少为2: {depth}")
    if samples < 0 or ring_checks < 0:
        raise InvalidInputError(f"样本数必须非负: samples={samples}, ring_checks={ring_checks}")
    counts = Counter()
    mismatches: List[Mismatch] = []

    # 全部约化四元组，不借助对称约化
    circles = reduced_circle_tuples(bound)
    batches = [circles[i : i + VERIFY_BATCH] for i in range(0, len(circles), VERIFY_BATCH)]
    logger.info(f"圆周验证: {len(circles)} 个约化四元组，{len(batches)} 批")
    check = partial(_check_circle_batch, depth=depth, inject_fault=inject_fault)
    for item_counts, item_mismatches in worker_pool.map_ordered(check, batches, workers, chunksize=1):
        counts.update(item_counts)
        mismatches.extend(item_mismatches)

    torus_bound = min(bound, TORUS_VERIFY_BOUND)
    tori = [
        (alpha, beta, gamma, delta)
        for alpha, beta, delta in product(range(torus_bound + 1), repeat=3)
        for gamma in range(-torus_bound, torus_bound + 1)
    ]
    logger.info(f"环面验证: {len(tori)} 个规范作用")
    check = partial(_check_torus, depth=depth, inject_fault=inject_fault)
    for item_counts, item_mismatches in worker_pool.map_ordered(check, tori, workers):
        counts.update(item_counts)
        mismatches.extend(item_mismatches)

    for suite, runner in (("symmetry", _symmetry_suite), ("lattice-change", _lattice_suite)):
        checked, found = runner(bound, samples, seed)
        counts[suite] += checked
        mismatches.extend(found)

    checked, found = _gf2_ring_suite(ring_checks, seed)
    counts["gf2-ring"] += checked
    mismatches.extend(found)

    if mismatches:
        logger.error(f"验证失败: {len(mismatches)} 处不一致")
    return VerifySummary(
        passed=not mismatches,
        bound=bound,
        depth=depth,
        suites=dict(sorted(counts.items())),
        mismatch_count=len(mismatches),
        mismatches=mismatches[:MISMATCH_REPORT_LIMIT],
    )
