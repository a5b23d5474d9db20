import numpy as np
import pytest
from hypothesis import given, strategies as st

from kacdouble.algebra_zoo import BUILTIN_GROUPS, builtin, cyclic, function_algebra, symmetric
from kacdouble.hopf_core import (
    KacAlgebra,
    antipode,
    comultiply,
    counit,
    dual,
    fourier,
    fourier_matrix,
    integral,
    iterated_coproduct,
    multiply,
    pair,
    star,
    verify_kac_axioms,
)

GROUPS = sorted(BUILTIN_GROUPS)
coeffs = st.lists(st.floats(-3, 3, allow_nan=False), min_size=12, max_size=12)


def _vec(vals, n):
    a = np.asarray(vals[: 2 * n] + [0.0] * max(0, 2 * n - len(vals)))
    return a[:n] + 1j * a[n : 2 * n]


@pytest.mark.parametrize("name", GROUPS)
@pytest.mark.parametrize("which", ["group", "dual"])
def test_axioms_pass(name, which):
    A = builtin(name) if which == "group" else dual(builtin(name))
    bad = [(c.name, c.residual) for c in verify_kac_axioms(A) if not c.passed]
    assert bad == []


def test_function_algebra_is_dual_of_group_algebra():
    t = symmetric(3)
    F = function_algebra(t)
    D = dual(builtin("S3"))
    assert np.allclose(F.mul, D.mul)
    assert np.allclose(F.comul_dense, D.comul_dense)
    assert np.allclose(F.antipode, D.antipode)
    assert np.allclose(F.star, D.star)
    assert all(c.passed for c in verify_kac_axioms(F))


def test_double_dual_is_identity(S3):
    DD = dual(dual(S3))
    assert DD.name == S3.name
    for attr in ("mul", "comul_dense", "antipode", "star", "unit", "counit"):
        assert np.allclose(getattr(DD, attr), getattr(S3, attr))


def test_broken_multiplication_is_detected(Z2):
    mul = Z2.mul.copy()
    mul[1, 1] = [0.5, 0.5]
    bad = KacAlgebra("bad", mul, Z2.unit, Z2.comul, Z2.counit, Z2.antipode, Z2.star)
    failed = {c.name for c in verify_kac_axioms(bad) if not c.passed}
    assert "associativity" in failed or "comultiplication_multiplicative" in failed


def test_non_semisimple_signal(Z2):
    # an antipode that is not an antipode
    bad = KacAlgebra("bad", Z2.mul, Z2.unit, Z2.comul, Z2.counit, np.eye(2, dtype=complex) * 0, Z2.star)
    assert not all(c.passed for c in verify_kac_axioms(bad))


@pytest.mark.parametrize("name", GROUPS)
def test_integral_normalization(name):
    H = builtin(name)
    h, phi = H.integral, H.haar
    n = H.dim
    assert abs(counit(H, h) - 1) < 1e-12
    assert np.allclose(multiply(H, h, h), h)
    assert abs(pair(phi, h) - 1 / n) < 1e-12
    # group algebra: h is the average of group elements
    assert np.allclose(h, np.ones(n) / n)


@pytest.mark.parametrize("name", GROUPS)
def test_fourier_composition_is_antipode(name):
    H = builtin(name)
    Hd = dual(H)
    assert np.abs(fourier_matrix(Hd) @ fourier_matrix(H) - H.antipode).max() < 1e-9


@pytest.mark.parametrize("name", GROUPS)
def test_fourier_of_coproduct(name):
    H = builtin(name)
    Hd = dual(H)
    F = fourier_matrix(H)
    for i in range(H.dim):
        x = H.basis(i)
        d = comultiply(H, x)
        lhs = sum(d[j, k] * multiply(Hd, F[:, j], F[:, k]) for j in range(H.dim) for k in range(H.dim))
        assert np.abs(lhs - H.delta * fourier(H, x)).max() < 1e-9


def test_integral_rejects_degenerate():
    # a 1-dimensional "algebra" whose counit vanishes on the integral
    A = KacAlgebra.from_dense("zero", [[[1.0]]], [1.0], [[[1.0]]], [0.0], [[1.0]], [[1.0]])
    with pytest.raises(ValueError):
        integral(A)


def test_iterated_coproduct_group_like(S3):
    g = S3.basis(3)
    t = iterated_coproduct(S3, g, 2)
    expected = np.zeros((6, 6, 6))
    expected[3, 3, 3] = 1
    assert np.allclose(t, expected)
    assert np.allclose(iterated_coproduct(S3, g, 0), g)


@given(coeffs, coeffs)
def test_comultiplication_is_multiplicative_property(a, b):
    H = dual(builtin("S3"))
    x, y = _vec(a, 6), _vec(b, 6)
    lhs = comultiply(H, multiply(H, x, y))
    dx, dy = comultiply(H, x), comultiply(H, y)
    rhs = np.einsum("ij,kl,ikp,jlq->pq", dx, dy, H.mul, H.mul)
    assert np.abs(lhs - rhs).max() < 1e-9 * max(1.0, np.abs(lhs).max())


@given(coeffs, coeffs)
def test_antipode_and_star_reverse_products(a, b):
    H = builtin("S3")
    x, y = _vec(a, 6), _vec(b, 6)
    xy = multiply(H, x, y)
    assert np.allclose(antipode(H, xy), multiply(H, antipode(H, y), antipode(H, x)))
    assert np.allclose(star(H, xy), multiply(H, star(H, y), star(H, x)))


def test_cyclic_labels():
    assert cyclic(3).labels == ("e", "g", "g^2")


@given(st.integers(0, 5), st.integers(1, 3))
def test_iterated_coproduct_nesting_is_immaterial(i, m):
    H = dual(builtin("S3"))
    left = iterated_coproduct(H, H.basis(i), m)
    # right nesting: split the last leg each time
    right = H.basis(i)
    for _ in range(m):
        right = np.tensordot(right, H.comul_dense, axes=([-1], [0]))
    assert np.abs(left - right).max() < 1e-12
