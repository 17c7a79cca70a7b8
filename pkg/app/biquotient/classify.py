"""
微分同胚类型的判定与静态目录

维数4：T² 在 Sp(1)² 上的作用，商为 S²×S²、ℂP²#−ℂP² 或 ℂP²#ℂP²；
维数5：S¹ 在 Sp(1)² 上的作用，商为 S³×S² 或 S³×̂S²（由 w₂ 区分，Barden–Smale 分类）。
"""
import json
import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel

from app.biquotient.actions import CircleWeights, NormalizedTorus, TorusWeights
from app.biquotient.errors import ConsistencyError, InvalidInputError, NotEffectivelyFreeError
from app.biquotient.freeness import (
    AdmissibilityClass,
    FreenessStatus,
    FreenessVerdict,
    admissibility_class,
    circle_effectively_free,
    torus_free,
)
from app.biquotient.lattice import NormalizationResult, NormalizationStatus, normalize
from app.biquotient.swclass import w2_of_circle_quotient

logger = logging.getLogger("biquotient")

CATALOG_PATH = Path(__file__).parent / "data" / "catalog.json"
DIMENSIONS = (4, 5)


class DiffeoType(str, Enum):
    S4 = "S4"
    CP2 = "CP2"
    S2_S2 = "S2xS2"
    CP2_PLUS_CP2 = "CP2+CP2"
    CP2_MINUS_CP2 = "CP2-CP2"
    S5 = "S5"
    WU_MANIFOLD = "WuManifold"
    S3_S2 = "S3xS2"
    S3_TWIST_S2 = "S3twistS2"


class CatalogEntry(BaseModel):
    """目录中的一行，内容原样保存在 data/catalog.json 中"""

    manifold: DiffeoType
    group_g: str
    group_h: str
    embedding: str

    class Config:
        frozen = True


@lru_cache(maxsize=None)
def _load_catalog() -> Dict[int, Tuple[CatalogEntry, ...]]:
    raw = json.loads(CATALOG_PATH.read_text(encoding="utf-8"))
    catalog = {int(dim): tuple(CatalogEntry(**row) for row in rows) for dim, rows in raw.items()}
    logger.debug(f"已加载目录: {', '.join(f'{dim}维 {len(rows)} 行' for dim, rows in catalog.items())}")
    return catalog


def catalog_lookup(dimension: int, manifold: Optional[Union[DiffeoType, str]] = None) -> List[CatalogEntry]:
    """按维数（4或5）查询目录，可按流形标签过滤"""
    if isinstance(dimension, bool) or dimension not in DIMENSIONS:
        raise InvalidInputError(f"维数必须是4或5: {dimension!r}")
    rows = _load_catalog()[dimension]
    if manifold is None:
        return list(rows)
    try:
        tag = DiffeoType(manifold)
    except ValueError:
        raise InvalidInputError(f"未知的流形标签: {manifold!r}")
    return [row for row in rows if row.manifold is tag]


@dataclass(frozen=True)
class Assessment:
    """判据给出的完整结论：自由性、（环面）规范化结果、（圆周）w₂ 与微分同胚类型"""

    verdict: FreenessVerdict
    diffeo: Optional[DiffeoType] = None
    normalization: Optional[NormalizationResult] = None
    admissibility: Optional[AdmissibilityClass] = None
    w2: Optional[int] = None
    # 环面非自由时见证取在规范坐标下
    witness_in_normalized: bool = False


# ---------------------------------------------------------------- 圆周


def assess_circle(weights: CircleWeights) -> Assessment:
    verdict = circle_effectively_free(weights)
    cls = admissibility_class(weights)
    if not verdict.effectively_free:
        if cls is not AdmissibilityClass.INADMISSIBLE:
            raise ConsistencyError(f"{weights.values} 非有效自由却属于 {cls.value}")
        return Assessment(verdict, admissibility=cls)

    if cls is AdmissibilityClass.INADMISSIBLE:
        raise ConsistencyError(f"{weights.values} 有效自由却不满足 gcd(a²−c², b²−d²) ∈ {{1,4}}")
    w2 = w2_of_circle_quotient(weights)
    diffeo = DiffeoType.S3_S2 if cls is AdmissibilityClass.GCD1 else DiffeoType.S3_TWIST_S2
    if w2 != (0 if diffeo is DiffeoType.S3_S2 else 1):
        raise ConsistencyError(f"{weights.values}: 可容许类 {cls.value} 与 w₂ = {w2} 不一致")
    return Assessment(verdict, diffeo=diffeo, admissibility=cls, w2=w2)


def classify_circle(weights: CircleWeights) -> DiffeoType:
    assessment = assess_circle(weights)
    if assessment.diffeo is None:
        raise NotEffectivelyFreeError(f"{weights.values} 不是有效自由作用", verdict=assessment.verdict)
    return assessment.diffeo


# ---------------------------------------------------------------- 环面


def _torus_diffeo(normalized: NormalizedTorus) -> DiffeoType:
    if normalized.gamma != 0 and normalized.beta == 0:
        normalized = normalized.swapped()
    product = normalized.beta * normalized.gamma
    if product == 0:
        return DiffeoType.S2_S2 if normalized.beta % 2 == 0 else DiffeoType.CP2_MINUS_CP2
    if product == 2:
        return DiffeoType.CP2_PLUS_CP2
    raise ConsistencyError(f"自由的规范作用 {normalized.as_tuple()} 出现 βγ = {product}")


def assess_torus(weights: Union[TorusWeights, NormalizedTorus]) -> Assessment:
    if isinstance(weights, NormalizedTorus):
        weights = weights.to_weights()
    result = normalize(weights)
    if result.status is NormalizationStatus.DEGENERATE:
        return Assessment(FreenessVerdict(FreenessStatus.DEGENERATE, witness=result.witness), normalization=result)
    if result.status is NormalizationStatus.NOT_EFFECTIVELY_FREE:
        return Assessment(
            FreenessVerdict(FreenessStatus.NOT_EFFECTIVELY_FREE, witness=result.witness),
            normalization=result,
        )

    criterion = torus_free(result.normalized)
    if not criterion.effectively_free:
        return Assessment(criterion, normalization=result, witness_in_normalized=True)
    if result.lattice_index == 1:
        verdict = criterion
    else:
        verdict = FreenessVerdict(FreenessStatus.EFFECTIVELY_FREE, kernel_order=result.lattice_index)
    return Assessment(verdict, diffeo=_torus_diffeo(result.normalized), normalization=result)


def classify_torus(weights: Union[TorusWeights, NormalizedTorus]) -> DiffeoType:
    assessment = assess_torus(weights)
    if assessment.diffeo is None:
        status = assessment.verdict.status.value
        raise NotEffectivelyFreeError(f"环面作用被拒绝: {status}", verdict=assessment.verdict)
    return assessment.diffeo
