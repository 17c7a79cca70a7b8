from itertools import product

import pytest
from hypothesis import example, given
from hypothesis.strategies import integers, tuples

from app.biquotient.actions import CircleWeights, NormalizedTorus, TorusWeights, reduce
from app.biquotient.errors import ConsistencyError, InvalidInputError
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
    validate_witness,
)

weight = integers(min_value=-6, max_value=6)


def test_circle_criterion_examples():
    assert circle_effectively_free(CircleWeights(1, 0, 0, 1)).status is FreenessStatus.FREE

    verdict = circle_effectively_free(CircleWeights(1, 1, 1, 1))
    assert verdict.status is FreenessStatus.NOT_EFFECTIVELY_FREE
    assert verdict.witness.order == 3
    assert verdict.witness.signs == (-1, -1)
    assert verdict.witness.infinite

    for values in [(2, 1, 0, 1), (3, 2, 1, 0)]:
        verdict = circle_effectively_free(CircleWeights(*values))
        assert verdict.status is FreenessStatus.EFFECTIVELY_FREE
        assert verdict.kernel_order == 2


def test_circle_criterion_finite_witness():
    # a+c = 3, b+d = 3
    verdict = circle_effectively_free(CircleWeights(2, 2, 1, 1))
    assert verdict.status is FreenessStatus.NOT_EFFECTIVELY_FREE
    assert verdict.witness.order == 3
    assert not verdict.witness.infinite
    assert validate_witness(verdict.witness, CircleWeights(2, 2, 1, 1))


def test_circle_criterion_requires_reduced_input():
    # CircleWeights 自行约化；原始四元组必须已经约化
    assert circle_effectively_free(CircleWeights(2, 0, 0, 2)) == circle_effectively_free((1, 0, 0, 1))
    with pytest.raises(InvalidInputError):
        circle_effectively_free((2, 0, 0, 2))
    with pytest.raises(InvalidInputError):
        circle_effectively_free((1, 0, 0))


def test_circle_gcds():
    assert circle_gcds(CircleWeights(3, 2, 1, 0)) == {(1, 1): 2, (1, -1): 2, (-1, 1): 2, (-1, -1): 2}


@pytest.mark.parametrize(
    "values, expected",
    [
        ((1, 0, 0, 1), AdmissibilityClass.GCD1),
        ((3, 2, 1, 0), AdmissibilityClass.GCD4),
        ((2, 1, 0, 1), AdmissibilityClass.GCD4),
        ((1, 1, 1, 1), AdmissibilityClass.INADMISSIBLE),
    ],
)
def test_admissibility_class(values, expected):
    assert admissibility_class(CircleWeights(*values)) is expected


def test_circle_oracle_examples():
    assert circle_fixed_point_oracle(CircleWeights(1, 0, 0, 1), 12).verdict.status is FreenessStatus.FREE

    result = circle_fixed_point_oracle(CircleWeights(1, 1, 1, 1), 12)
    assert result.verdict.status is FreenessStatus.NOT_EFFECTIVELY_FREE
    assert result.infinite_stabilizer
    assert {w.order for w in result.witnesses} == set(range(3, 13))

    result = circle_fixed_point_oracle(CircleWeights(2, 1, 0, 1), 12)
    assert result.verdict.status is FreenessStatus.EFFECTIVELY_FREE
    assert result.verdict.kernel_order == 2
    assert result.central == ((2, (1,)),)


def test_circle_oracle_stops_at_max_witnesses():
    result = circle_fixed_point_oracle(CircleWeights(1, 1, 1, 1), 50, max_witnesses=1)
    # 阶3时 j = 1, 2 都是见证，之后停止
    assert {w.order for w in result.witnesses} == {3}


def test_oracle_depth_checked():
    with pytest.raises(InvalidInputError):
        circle_fixed_point_oracle(CircleWeights(1, 0, 0, 1), 1)
    with pytest.raises(InvalidInputError):
        torus_fixed_point_oracle(TorusWeights(((1, 1, 0, 0), (0, 0, 1, 1))), 0)


@given(tuples(weight, weight, weight, weight))
@example((1, 1, 1, 1))
@example((3, 2, 1, 0))
def test_circle_criterion_agrees_with_oracle(values):
    if not any(values):
        return
    weights = reduce(values)
    criterion = circle_effectively_free(weights)
    oracle = circle_fixed_point_oracle(weights, circle_oracle_depth(weights)).verdict
    assert criterion.effectively_free == oracle.effectively_free
    if criterion.effectively_free:
        assert criterion.status is oracle.status
        assert criterion.kernel_order == oracle.kernel_order
    else:
        assert validate_witness(criterion.witness, weights)


@given(tuples(weight, weight, weight, weight))
def test_admissible_iff_effectively_free(values):
    if not any(values):
        return
    weights = reduce(values)
    admissible = admissibility_class(weights) is not AdmissibilityClass.INADMISSIBLE
    assert admissible == circle_effectively_free(weights).effectively_free


@given(tuples(weight, weight, weight, weight))
def test_gcds_share_parity_when_effectively_free(values):
    if not any(values):
        return
    weights = reduce(values)
    if circle_effectively_free(weights).effectively_free:
        assert len({g % 2 for g in circle_gcds(weights).values()}) == 1


def test_torus_criterion_examples():
    assert torus_free(NormalizedTorus(1, 0, 0, 1)).status is FreenessStatus.FREE
    assert torus_free(NormalizedTorus(1, 1, 2, 1)).status is FreenessStatus.FREE

    witness = torus_free(NormalizedTorus(2, 1, 1, 1)).witness
    assert (witness.order, witness.exponents, witness.point) == (2, (1, 0), (1, 0))

    witness = torus_free(NormalizedTorus(1, 2, 2, 1)).witness
    assert (witness.order, witness.exponents, witness.point) == (3, (1, 1), (1, 1))

    witness = torus_free(NormalizedTorus(1, 0, 0, 0)).witness
    assert witness.infinite and witness.point == (0, 1)


def test_torus_criterion_wants_sign_normalized_input():
    with pytest.raises(InvalidInputError):
        torus_free(NormalizedTorus(-1, 0, 0, 1))


def test_torus_oracle_examples():
    for normalized in [NormalizedTorus(1, 0, 0, 1), NormalizedTorus(1, 3, 0, 1)]:
        result = torus_fixed_point_oracle(normalized.to_weights(), 8)
        assert result.verdict.status is FreenessStatus.FREE
        assert result.central == ()

    degenerate = TorusWeights(((1, 0, 1, 0), (0, 1, 0, 1)))
    result = torus_fixed_point_oracle(degenerate, 8)
    assert result.infinite_stabilizer
    assert result.verdict.status is FreenessStatus.NOT_EFFECTIVELY_FREE
    assert all(validate_witness(w, degenerate) for w in result.witnesses)


def test_torus_oracle_reports_trivial_family_as_degenerate():
    # 两行相同：对角子环面在所有坐标上平凡
    result = torus_fixed_point_oracle(TorusWeights(((1, 1, 1, 1), (1, 1, 1, 1))), 4)
    assert result.verdict.status is FreenessStatus.DEGENERATE


@pytest.mark.parametrize("normalized", list(product(range(0, 4), range(0, 4), range(-3, 4), range(0, 4))))
def test_torus_criterion_agrees_with_oracle(normalized):
    torus = NormalizedTorus(*normalized)
    criterion = torus_free(torus)
    weights = torus.to_weights()
    oracle = torus_fixed_point_oracle(weights, torus_oracle_window(torus), max_witnesses=1).verdict
    assert criterion.effectively_free == oracle.effectively_free
    if criterion.effectively_free:
        assert oracle.status is FreenessStatus.FREE
    else:
        assert validate_witness(criterion.witness, weights)


def test_validate_witness_rejects_central_and_mismatched_elements():
    weights = CircleWeights(2, 1, 0, 1)
    assert not validate_witness(Witness(2, (1,), signs=(1, 1)), weights)
    assert not validate_witness(Witness(2, (1, 0), point=(0, 0)), weights)
    torus = NormalizedTorus(1, 0, 0, 1).to_weights()
    assert not validate_witness(Witness(2, (1, 0), point=(0, 0)), torus)


def test_verdict_invariants():
    with pytest.raises(ConsistencyError):
        FreenessVerdict(FreenessStatus.FREE, kernel_order=2)
    with pytest.raises(ConsistencyError):
        FreenessVerdict(FreenessStatus.NOT_EFFECTIVELY_FREE)
    with pytest.raises(ConsistencyError):
        FreenessVerdict(FreenessStatus.EFFECTIVELY_FREE, kernel_order=1)
    assert FreenessVerdict("free").status is FreenessStatus.FREE
