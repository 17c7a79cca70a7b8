import json

import pytest
from hypothesis import assume, given, settings
from hypothesis.strategies import integers, tuples
from pydantic import ValidationError

from app.biquotient.actions import CircleWeights, TorusWeights
from app.biquotient.classify import DiffeoType
from app.biquotient.freeness import FreenessStatus, FreenessVerdict, Witness
from app.biquotient.report import (
    CSV_COLUMNS,
    SCHEMA,
    Provenance,
    Report,
    VerdictModel,
    build_circle_report,
    build_torus_report,
    csv_row,
    format_weights,
    verdicts_agree,
)

weight = integers(min_value=-5, max_value=5)


def test_circle_report_fields():
    report = build_circle_report(CircleWeights(2, 0, 0, 2))
    assert report.raw_weights == [2, 0, 0, 2]
    assert report.reduced_weights == [1, 0, 0, 1]
    assert report.verdict.status is FreenessStatus.FREE
    assert report.admissibility == "gcd1"
    assert report.diffeo is DiffeoType.S3_S2
    assert report.w2 == 0
    assert report.provenance is Provenance.CRITERION
    assert report.oracle is None and report.agrees


def test_circle_report_with_oracle():
    report = build_circle_report(CircleWeights(3, 2, 1, 0), oracle_depth=16)
    assert report.provenance is Provenance.BOTH
    assert report.oracle.status is FreenessStatus.EFFECTIVELY_FREE
    assert report.oracle.kernel_order == 2
    assert report.agrees


def test_rejected_circle_report_carries_witness():
    report = build_circle_report(CircleWeights(1, 1, 1, 1), oracle_depth=6)
    assert report.diffeo is None
    assert report.witness.order == 3
    assert report.witness.signs == [-1, -1]
    assert report.witness.infinite
    assert report.agrees


def test_torus_reports():
    report = build_torus_report(TorusWeights(((1, 1, 0, 0), (0, 2, 1, 1))), oracle_depth=4)
    assert report.normalized == [1, 2, 0, 1]
    assert report.lattice_index == 1
    assert report.diffeo is DiffeoType.S2_S2
    assert report.agrees

    report = build_torus_report(TorusWeights(((1, 0, 1, 0), (0, 1, 0, 1))), oracle_depth=4)
    assert report.verdict.status is FreenessStatus.DEGENERATE
    assert report.normalized is None
    assert report.witness.frame == "original"
    assert report.agrees

    report = build_torus_report(TorusWeights(((1, 2, 0, 2), (0, 2, 1, 1))))
    assert report.verdict.status is FreenessStatus.NOT_EFFECTIVELY_FREE
    assert report.witness.frame == "normalized"


def test_json_uses_schema_alias():
    payload = json.loads(build_circle_report(CircleWeights(1, 0, 0, 1)).to_json())
    assert payload["schema"] == SCHEMA
    assert payload["diffeo"] == "S3xS2"
    assert payload["verdict"]["status"] == "free"


@settings(max_examples=50, deadline=None)
@given(tuples(weight, weight, weight, weight))
def test_circle_report_survives_json(values):
    assume(any(values))
    report = build_circle_report(CircleWeights(*values))
    assert Report.parse_raw(report.to_json()) == report


def test_torus_report_survives_json():
    report = build_torus_report(TorusWeights(((1, 1, 1, 1), (1, 1, -1, -1))), oracle_depth=3)
    assert report.verdict.kernel_order == 2
    assert Report.parse_raw(report.to_json()) == report


def test_diffeo_only_for_effectively_free_actions():
    with pytest.raises(ValidationError):
        Report(
            kind="circle",
            raw_weights=[1, 1, 1, 1],
            reduced_weights=[1, 1, 1, 1],
            verdict=VerdictModel(status=FreenessStatus.NOT_EFFECTIVELY_FREE),
            diffeo=DiffeoType.S3_S2,
        )
    with pytest.raises(ValidationError):
        Report(
            kind="circle",
            raw_weights=[1, 0, 0, 1],
            reduced_weights=[1, 0, 0, 1],
            verdict=VerdictModel(status=FreenessStatus.FREE),
        )


def test_csv_row():
    assert format_weights([1, 0, 0, 1]) == "1,0,0,1"
    assert format_weights([[1, 1, 0, 0], [0, 2, 1, 1]]) == "1,1,0,0/0,2,1,1"
    row = csv_row(build_circle_report(CircleWeights(1, 1, 1, 1)))
    assert len(row) == len(CSV_COLUMNS)
    assert row == ["1,1,1,1", "1,1,1,1", "not-effectively-free", "1", "", "", "3"]


def test_verdicts_agree():
    free = FreenessVerdict(FreenessStatus.FREE)
    degenerate = FreenessVerdict(FreenessStatus.DEGENERATE)
    rejected = FreenessVerdict(FreenessStatus.NOT_EFFECTIVELY_FREE, witness=Witness(2, (1, 0), point=(0, 0)))
    kernel2 = FreenessVerdict(FreenessStatus.EFFECTIVELY_FREE, kernel_order=2)
    kernel3 = FreenessVerdict(FreenessStatus.EFFECTIVELY_FREE, kernel_order=3)
    assert verdicts_agree(degenerate, rejected)
    assert not verdicts_agree(free, rejected)
    assert not verdicts_agree(free, kernel2)
    assert not verdicts_agree(kernel2, kernel3)
    assert verdicts_agree(kernel2, kernel2)
