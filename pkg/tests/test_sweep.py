import pytest

from app.biquotient.errors import InvalidInputError
from app.biquotient.lattice import lattice_canonical_form
from app.biquotient.sweep import (
    GF2_RING_CHECKS,
    _gf2_ring_suite,
    _symmetry_suite,
    circle_representatives,
    enumerate_actions,
    reduced_circle_tuples,
    torus_representatives,
    verify_suites,
)

FOUR_MANIFOLDS = {"S2xS2", "CP2-CP2", "CP2+CP2"}


def test_circle_representatives():
    raw, representatives = circle_representatives(1)
    # [−1,1]⁴ 中除零向量外都是约化的
    assert raw == 80
    assert representatives == sorted(representatives)
    assert all(min(values) >= 0 for values in representatives)
    assert circle_representatives(0) == (0, [])


def test_reduced_circle_tuples():
    tuples = reduced_circle_tuples(2)
    assert len(tuples) == 5 ** 4 - 3 ** 4
    assert (2, 0, 0, 2) not in tuples
    assert (2, 1, 0, 1) in tuples


def test_torus_representatives():
    raw, representatives = torus_representatives(1)
    # 80 个本原行的有序对
    assert raw == 80 ** 2
    assert representatives == sorted(representatives)
    keys = [lattice_canonical_form(rows) for rows in representatives]
    assert len(set(keys)) == len(keys)
    # 行格为 span(e_p₁, e_p₂) 的类中字典序最小的矩阵
    assert ((-1, 0, -1, 0), (-1, 0, 0, 0)) in representatives
    assert ((1, 0, 0, 0), (0, 0, 1, 0)) not in representatives


def test_enumerate_dimension_five():
    reports, summary = enumerate_actions(5, 2)
    assert set(summary.histogram) == {"S3xS2", "S3twistS2"}
    assert summary.canonical_count == len(reports)
    assert sum(summary.statuses.values()) == len(reports)


def test_enumerate_dimension_four():
    reports, summary = enumerate_actions(4, 1)
    assert set(summary.histogram) == FOUR_MANIFOLDS
    assert summary.raw_count == 80 ** 2
    assert summary.canonical_count == len(reports)
    assert summary.statuses["degenerate"] > 0
    assert summary.statuses["not-effectively-free"] > 0
    # ((1,1,1,1),(1,1,−1,−1)) 这样的不饱和行格也在范围内
    assert any(r.lattice_index and r.lattice_index > 1 and r.diffeo is not None for r in reports)


def test_empty_sweep():
    reports, summary = enumerate_actions(5, 0)
    assert reports == []
    assert summary.histogram == {}
    _, summary = enumerate_actions(4, 0)
    assert summary.raw_count == 0


def test_enumerate_is_deterministic():
    first, _ = enumerate_actions(5, 1)
    second, _ = enumerate_actions(5, 1, workers=2)
    assert [r.to_dict() for r in first] == [r.to_dict() for r in second]


def test_enumerate_rejects_bad_arguments():
    with pytest.raises(InvalidInputError):
        enumerate_actions(6, 1)
    with pytest.raises(InvalidInputError):
        enumerate_actions(5, -1)


def test_verify_passes():
    summary = verify_suites(1, samples=20, ring_checks=50)
    assert summary.passed
    assert summary.mismatch_count == 0
    # 每个约化四元组都参与判据与 oracle 的对照
    assert summary.suites["criterion-oracle"] == 80
    assert summary.suites["admissibility"] == 80
    assert summary.suites["symmetry"] >= 40
    assert summary.suites["lattice-change"] == 20
    assert summary.suites["gf2-ring"] == 50


def test_verify_with_fixed_depth():
    assert verify_suites(2, depth=24, samples=10, ring_checks=10).passed


def test_verify_in_parallel_matches_serial():
    serial = verify_suites(2, samples=5, ring_checks=5)
    parallel = verify_suites(2, samples=5, ring_checks=5, workers=2)
    assert serial.suites == parallel.suites
    assert serial.suites["criterion-oracle"] == 5 ** 4 - 3 ** 4


def test_injected_fault_is_reported():
    summary = verify_suites(1, samples=5, inject_fault=True, ring_checks=5)
    assert not summary.passed
    assert summary.mismatch_count > 0
    assert {m.suite for m in summary.mismatches} <= {"criterion-oracle", "torus-criterion-oracle"}


def test_verify_rejects_negative_counts():
    with pytest.raises(InvalidInputError):
        verify_suites(1, samples=-1)
    with pytest.raises(InvalidInputError):
        verify_suites(1, ring_checks=-1)


def test_symmetry_suite_samples_unsaturated_lattices():
    checked, mismatches = _symmetry_suite(3, 200, seed=7)
    assert mismatches == []
    # 每个样本: 规范矩阵、大部分样本还有一个不饱和矩阵、一个圆周作用
    assert checked > 2 * 200


def test_gf2_ring_suite():
    checked, mismatches = _gf2_ring_suite(GF2_RING_CHECKS, seed=0)
    assert checked == 10_000
    assert mismatches == []
