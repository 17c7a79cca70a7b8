"""
机器可读的报告

JSON 带版本键 "schema": "biquotient-report/1"，CSV 列固定。
"""
import logging
from enum import Enum
from typing import List, Optional, Union

from pydantic import BaseModel, Field, root_validator

from app.biquotient.actions import CircleWeights, TorusWeights
from app.biquotient.classify import Assessment, DiffeoType, assess_circle, assess_torus
from app.biquotient.freeness import (
    FreenessStatus,
    FreenessVerdict,
    OracleResult,
    Witness,
    circle_fixed_point_oracle,
    torus_fixed_point_oracle,
)

logger = logging.getLogger("biquotient")

SCHEMA = "biquotient-report/1"

CSV_COLUMNS = ["raw_weights", "reduced_weights", "status", "kernel_order", "diffeo", "w2", "witness_order"]


class Provenance(str, Enum):
    CRITERION = "criterion"
    ORACLE = "oracle"
    BOTH = "both"


class WitnessModel(BaseModel):
    order: int
    exponents: List[int]
    fixed_point: str
    point: Optional[List[int]] = None
    signs: Optional[List[int]] = None
    infinite: bool = False
    # original: 输入坐标；normalized: 规范坐标 ((1,α,0,γ),(0,β,1,δ))
    frame: str = "original"

    @classmethod
    def from_witness(cls, witness: Optional[Witness], frame: str = "original") -> Optional["WitnessModel"]:
        if witness is None:
            return None
        return cls(
            order=witness.order,
            exponents=list(witness.exponents),
            fixed_point=witness.fixed_point,
            point=list(witness.point) if witness.point is not None else None,
            signs=list(witness.signs) if witness.signs is not None else None,
            infinite=witness.infinite,
            frame=frame,
        )


class VerdictModel(BaseModel):
    status: FreenessStatus
    kernel_order: int = 1
    witness: Optional[WitnessModel] = None

    @property
    def effectively_free(self) -> bool:
        return self.status in (FreenessStatus.FREE, FreenessStatus.EFFECTIVELY_FREE)


class OracleModel(BaseModel):
    max_order: int
    status: FreenessStatus
    kernel_order: int
    witness_count: int
    infinite_stabilizer: bool
    agrees: bool


class Report(BaseModel):
    schema_: str = Field(SCHEMA, alias="schema")
    kind: str
    raw_weights: Union[List[int], List[List[int]]]
    reduced_weights: Union[List[int], List[List[int]]]
    normalized: Optional[List[int]] = None
    lattice_index: Optional[int] = None
    admissibility: Optional[str] = None
    verdict: VerdictModel
    diffeo: Optional[DiffeoType] = None
    w2: Optional[int] = None
    witness: Optional[WitnessModel] = None
    provenance: Provenance = Provenance.CRITERION
    oracle: Optional[OracleModel] = None

    class Config:
        allow_population_by_field_name = True

    @root_validator(skip_on_failure=True)
    def _diffeo_iff_effectively_free(cls, values):
        verdict = values["verdict"]
        if (values.get("diffeo") is not None) != verdict.effectively_free:
            raise ValueError("diffeo 必须且只能在有效自由时给出")
        return values

    @property
    def agrees(self) -> bool:
        return self.oracle is None or self.oracle.agrees

    def to_json(self, **kwargs) -> str:
        return self.json(by_alias=True, ensure_ascii=False, **kwargs)

    def to_dict(self) -> dict:
        return self.dict(by_alias=True)


def format_weights(weights: Union[List[int], List[List[int]]]) -> str:
    """与命令行输入相同的写法：圆周 1,0,0,1；环面 1,1,0,0/0,2,1,1"""
    if weights and isinstance(weights[0], list):
        return "/".join(",".join(str(v) for v in row) for row in weights)
    return ",".join(str(v) for v in weights)


def csv_row(report: Report) -> List[str]:
    witness = report.witness
    return [
        format_weights(report.raw_weights),
        format_weights(report.reduced_weights),
        report.verdict.status.value,
        str(report.verdict.kernel_order),
        report.diffeo.value if report.diffeo else "",
        "" if report.w2 is None else str(report.w2),
        str(witness.order) if witness else "",
    ]


def verdicts_agree(criterion: FreenessVerdict, oracle: FreenessVerdict) -> bool:
    """退化与非有效自由视为同一结论；有效自由时还要求核的阶一致"""
    if not criterion.effectively_free or not oracle.effectively_free:
        return criterion.effectively_free == oracle.effectively_free
    return criterion.status is oracle.status and criterion.kernel_order == oracle.kernel_order


def _oracle_model(criterion: FreenessVerdict, oracle: OracleResult) -> OracleModel:
    return OracleModel(
        max_order=oracle.max_order,
        status=oracle.verdict.status,
        kernel_order=oracle.verdict.kernel_order,
        witness_count=len(oracle.witnesses),
        infinite_stabilizer=oracle.infinite_stabilizer,
        agrees=verdicts_agree(criterion, oracle.verdict),
    )


def _verdict_model(assessment: Assessment) -> VerdictModel:
    verdict = assessment.verdict
    frame = "normalized" if assessment.witness_in_normalized else "original"
    return VerdictModel(
        status=verdict.status,
        kernel_order=verdict.kernel_order,
        witness=WitnessModel.from_witness(verdict.witness, frame),
    )


def build_circle_report(weights: CircleWeights, oracle_depth: Optional[int] = None) -> Report:
    assessment = assess_circle(weights)
    verdict = _verdict_model(assessment)
    oracle = None
    if oracle_depth:
        oracle = _oracle_model(assessment.verdict, circle_fixed_point_oracle(weights, oracle_depth))
        if not oracle.agrees:
            logger.error(f"{weights.values}: 判据 {verdict.status.value} 与 oracle {oracle.status.value} 不一致")
    return Report(
        kind="circle",
        raw_weights=list(weights.raw),
        reduced_weights=list(weights.values),
        admissibility=assessment.admissibility.value if assessment.admissibility else None,
        verdict=verdict,
        diffeo=assessment.diffeo,
        w2=assessment.w2,
        witness=verdict.witness,
        provenance=Provenance.BOTH if oracle else Provenance.CRITERION,
        oracle=oracle,
    )


def build_torus_report(weights: TorusWeights, oracle_depth: Optional[int] = None) -> Report:
    assessment = assess_torus(weights)
    verdict = _verdict_model(assessment)
    result = assessment.normalization
    oracle = None
    if oracle_depth:
        oracle = _oracle_model(assessment.verdict, torus_fixed_point_oracle(weights, oracle_depth))
        if not oracle.agrees:
            logger.error(f"{weights.rows}: 判据 {verdict.status.value} 与 oracle {oracle.status.value} 不一致")
    return Report(
        kind="torus",
        raw_weights=[list(row) for row in weights.raw],
        reduced_weights=[list(row) for row in weights.rows],
        normalized=list(result.normalized.as_tuple()) if result.ok else None,
        lattice_index=result.lattice_index if result.ok else None,
        verdict=verdict,
        diffeo=assessment.diffeo,
        witness=verdict.witness,
        provenance=Provenance.BOTH if oracle else Provenance.CRITERION,
        oracle=oracle,
    )
