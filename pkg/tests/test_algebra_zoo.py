import json

import numpy as np
import pytest

from kacdouble.algebra_zoo import (
    AlgebraFileError,
    GroupTable,
    algebra_from_dict,
    algebra_to_dict,
    builtin,
    cyclic,
    direct_product,
    load_algebra,
    symmetric,
)
from kacdouble.hopf_core import verify_kac_axioms


def test_symmetric_group_table():
    t = symmetric(3)
    assert t.order == 6
    assert not t.is_abelian()
    assert t.labels[t.identity] == "e"
    # apply a first, then b: (12) then (23) is (132) written as a map 0->2->... check directly
    perms = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]
    a, b = perms.index((1, 0, 2)), perms.index((0, 2, 1))
    ab = tuple(perms[b][perms[a][i]] for i in range(3))
    assert t.cayley[a][b] == perms.index(ab)


def test_direct_product_is_klein():
    t = direct_product(cyclic(2), cyclic(2))
    assert t.is_abelian() and t.order == 4
    assert all(t.cayley[a][a] == t.identity for a in range(4))


@pytest.mark.parametrize(
    "cayley",
    [((0, 1), (0, 1)), ((0, 1, 2), (1, 2, 0), (1, 2, 0)), ()],
)
def test_group_table_rejects_bad_tables(cayley):
    with pytest.raises(ValueError):
        GroupTable(cayley, tuple("abc"[: len(cayley)]))


def test_unknown_builtin():
    with pytest.raises(ValueError, match="unknown group"):
        builtin("Q8")


def test_json_round_trip(tmp_path, S3):
    path = tmp_path / "s3.json"
    path.write_text(json.dumps(algebra_to_dict(S3)))
    A, report = load_algebra(path)
    assert all(c.passed for c in report)
    assert np.allclose(A.mul, S3.mul) and np.allclose(A.comul_dense, S3.comul_dense)


def test_unit_inferred_when_missing(Z3):
    data = algebra_to_dict(Z3)
    del data["unit"]
    A = algebra_from_dict(data)
    assert np.allclose(A.unit, Z3.unit)


def test_parse_error_reports_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"dim": 2,\n "mul": [1, }')
    with pytest.raises(AlgebraFileError, match="line 2"):
        load_algebra(path)


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda d: d.pop("counit"), "missing field"),
        (lambda d: d.__setitem__("comul", [[[0, 5, 1.0]], []]), "out of range"),
        (lambda d: d.__setitem__("star", [[1, 0]]), "length"),
        (lambda d: d.__setitem__("counit", ["x", 1]), "number"),
    ],
)
def test_schema_errors(Z2, mutate, message):
    data = algebra_to_dict(Z2)
    mutate(data)
    with pytest.raises(AlgebraFileError, match=message):
        algebra_from_dict(data)


def test_broken_file_reports_failing_axiom(tmp_path, Z2):
    data = algebra_to_dict(Z2)
    data["antipode"] = [[1, 0], [0, 0]]
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(data))
    _, report = load_algebra(path)
    assert "antipode" in {c.name for c in report if not c.passed}
