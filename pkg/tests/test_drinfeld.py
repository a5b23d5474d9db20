import numpy as np
import pytest

from kacdouble import drinfeld as dr
from kacdouble.algebra_zoo import BUILTIN_GROUPS, builtin, function_algebra, symmetric
from kacdouble.commutant import block_decomposition
from kacdouble.hopf_core import dual, verify_kac_axioms

from group_oracle import double_blocks_oracle


def test_oracle_s3():
    assert double_blocks_oracle("S3") == [1, 1, 2, 2, 2, 2, 3, 3]


# the double ---------------------------------------------------------------------------


@pytest.mark.parametrize("name", sorted(BUILTIN_GROUPS))
def test_double_passes_axioms_and_has_predicted_blocks(name):
    H = builtin(name)
    D = dr.drinfeld_double(H)
    assert D.dim == H.dim**2
    assert [c.name for c in verify_kac_axioms(D) if not c.passed] == []
    assert block_decomposition(D).multiset == double_blocks_oracle(name)
    assert max(dr.injection_checks(H, D).values()) < 1e-12


def test_double_of_non_cocommutative_algebra():
    F = function_algebra(symmetric(3))
    D = dr.drinfeld_double(F)
    assert all(c.passed for c in verify_kac_axioms(D))
    assert block_decomposition(D).multiset == [1, 1, 2, 2, 2, 2, 3, 3]
    assert max(dr.injection_checks(F, D).values()) < 1e-12


@pytest.mark.parametrize("name", ["Z2", "Z3", "Z2xZ2"])
def test_abelian_double_is_a_tensor_product(name):
    H = builtin(name)
    n = H.dim
    D = dr.drinfeld_double(H)
    expected = np.einsum("iks,jlt->ijklst", dual(H).mul, H.mul).reshape(n * n, n * n, n * n)
    assert np.allclose(D.mul, expected)


@pytest.mark.parametrize("variant", [dr.op, dr.cop])
def test_op_cop_pass_axioms(S3, variant):
    V = variant(dr.drinfeld_double(S3))
    assert all(c.passed for c in verify_kac_axioms(V))


def test_op_reverses_products(S3):
    D = dr.drinfeld_double(S3)
    assert np.allclose(dr.op(D).mul, D.mul.transpose(1, 0, 2))
    assert np.allclose(dr.cop(dr.cop(D)).comul_dense, D.comul_dense)


def test_predicted_tower():
    K = dr.drinfeld_double(builtin("Z2"))
    rows = dr.predicted_tower(K, 3)
    assert [r["dim"] for r in rows] == [1, 4, 16]
    assert rows[1]["blocks"] == [1, 1, 1, 1]
    assert dr.predicted_tower(dr.drinfeld_double(builtin("S3")), 2)[1]["dim"] == 36
    with pytest.raises(ValueError):
        dr.predicted_tower(K, 0)


def test_compare_z2():
    r = dr.compare(builtin("Z2"), 3)
    assert r.dims == (1, 4, 16) and r.passed
    assert r.levels[1].blocks == [1, 1, 1, 1] and r.levels[1].blocks_match == "both"
    assert [lv.e_trace for lv in r.levels[1:]] == pytest.approx([0.25, 0.25], abs=1e-12)


def test_compare_z3():
    r = dr.compare(builtin("Z3"), 2)
    assert r.dims == (1, 9) and r.passed
    assert r.levels[1].blocks == [1] * 9


def test_compare_s3_records_both_multisets():
    r = dr.compare(builtin("S3"), 2)
    lv = r.levels[1]
    assert lv.dim == 36
    assert lv.double_blocks == [1, 1, 2, 2, 2, 2, 3, 3]
    assert lv.dual_double_blocks == [1] * 12 + [2] * 6
    assert lv.blocks == lv.dual_double_blocks and lv.blocks_match == "dual"


def test_compare_guard():
    with pytest.raises(dr.ResourceGuard):
        dr.compare(builtin("S3"), 3)
    assert dr.level_allowed(4, 3) and not dr.level_allowed(5, 3) and not dr.level_allowed(9, 2)
