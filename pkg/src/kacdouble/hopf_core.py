"""Finite-dimensional Kac algebras stored as structure constants.

Conventions (coordinates over a fixed basis e_0 .. e_{n-1}):

* ``mul[i, j, k]`` is the coefficient of e_k in e_i e_j;
* ``comul[i]`` lists triples ``(j, k, c)`` with Delta(e_i) = sum c e_j (x) e_k;
* ``antipode`` acts on column coefficient vectors, S(a) = antipode @ a;
* ``star`` acts after conjugating coefficients, a* = star @ conj(a).

The dual algebra uses the coordinate dual basis, so its tensors are
transposes of the original ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from ._linalg import Check, maxabs, nullspace

TOL = 1e-9

Sparse = tuple[tuple[tuple[int, int, complex], ...], ...]


def _sparse_from_dense(t: np.ndarray, cutoff: float = 1e-14) -> Sparse:
    out = []
    for i in range(t.shape[0]):
        j, k = np.nonzero(np.abs(t[i]) > cutoff)
        out.append(tuple((int(a), int(b), complex(t[i, a, b])) for a, b in zip(j, k)))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class KacAlgebra:
    name: str
    mul: np.ndarray
    unit: np.ndarray
    comul: Sparse
    counit: np.ndarray
    antipode: np.ndarray
    star: np.ndarray
    basis_labels: tuple[str, ...] = ()
    comul_dense: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        n = self.mul.shape[0]
        if self.mul.shape != (n, n, n):
            raise ValueError(f"mul must have shape (n, n, n), got {self.mul.shape}")
        if len(self.comul) != n:
            raise ValueError("comul needs one entry per basis element")
        for arr, shape, label in (
            (self.unit, (n,), "unit"),
            (self.counit, (n,), "counit"),
            (self.antipode, (n, n), "antipode"),
            (self.star, (n, n), "star"),
        ):
            if np.shape(arr) != shape:
                raise ValueError(f"{label} must have shape {shape}")
        d = np.zeros((n, n, n), dtype=complex)
        for i, terms in enumerate(self.comul):
            for j, k, c in terms:
                d[i, j, k] += c
        object.__setattr__(self, "comul_dense", d)
        if not self.basis_labels:
            object.__setattr__(self, "basis_labels", tuple(f"e{i}" for i in range(n)))

    @classmethod
    def from_dense(cls, name, mul, unit, comul, counit, antipode, star, basis_labels=()):
        as_c = lambda a: np.asarray(a, dtype=complex)
        return cls(
            name,
            as_c(mul),
            as_c(unit),
            _sparse_from_dense(as_c(comul)),
            as_c(counit),
            as_c(antipode),
            as_c(star),
            tuple(basis_labels),
        )

    @property
    def dim(self) -> int:
        return self.mul.shape[0]

    @property
    def delta(self) -> float:
        return float(np.sqrt(self.dim))

    def basis(self, i: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[i] = 1.0
        return v

    @cached_property
    def integral(self) -> np.ndarray:
        return integral(self)

    @cached_property
    def haar(self) -> np.ndarray:
        """Idempotent integral of the dual, i.e. the normalized trace functional."""
        return integral(dual(self))

    @cached_property
    def mul_sparse(self) -> sp.csr_matrix:
        n = self.dim
        return sp.csr_matrix(self.mul.reshape(n * n, n))

    @cached_property
    def comul_sparse(self) -> sp.csr_matrix:
        n = self.dim
        return sp.csr_matrix(self.comul_dense.reshape(n, n * n))


def _check(A: KacAlgebra, v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.shape != (A.dim,):
        raise ValueError(f"element of length {v.shape} does not belong to {A.name} (dim {A.dim})")
    return v


def multiply(A: KacAlgebra, a, b) -> np.ndarray:
    return np.einsum("i,j,ijk->k", _check(A, a), _check(A, b), A.mul)


def comultiply(A: KacAlgebra, a) -> np.ndarray:
    """Delta(a) as an (n, n) coefficient array over e_j (x) e_k."""
    return np.einsum("i,ijk->jk", _check(A, a), A.comul_dense)


def counit(A: KacAlgebra, a) -> complex:
    return complex(A.counit @ _check(A, a))


def antipode(A: KacAlgebra, a) -> np.ndarray:
    return A.antipode @ _check(A, a)


def star(A: KacAlgebra, a) -> np.ndarray:
    return A.star @ np.conj(_check(A, a))


def iterated_coproduct(A: KacAlgebra, a, m: int) -> np.ndarray:
    """Left-nested Delta_m(a) as a dense tensor of shape (n,)*(m+1)."""
    if m < 0:
        raise ValueError("m must be non-negative")
    t = _check(A, a)
    for _ in range(m):
        # split the first leg: (Delta (x) id^{(x) r}) applied to t
        t = np.tensordot(A.comul_dense, t, axes=([0], [0]))
    return t


def pair(f, x) -> complex:
    """Evaluate a functional (dual-basis coordinates) on an element."""
    return complex(np.asarray(f) @ np.asarray(x))


def dual(A: KacAlgebra) -> KacAlgebra:
    n = A.dim
    mul = np.transpose(A.comul_dense, (1, 2, 0))  # (f g)(x) = f(x_1) g(x_2)
    comul = np.transpose(A.mul, (2, 0, 1))  # Delta(f)(x (x) y) = f(xy)
    # f*(x) = conj(f(S(x)*))
    star = (np.conj(A.star) @ A.antipode).T
    labels = tuple(f"d[{lab}]" for lab in A.basis_labels)
    name = A.name[5:-1] if A.name.startswith("dual(") and A.name.endswith(")") else f"dual({A.name})"
    return KacAlgebra(
        name,
        np.ascontiguousarray(mul),
        A.counit.copy(),
        _sparse_from_dense(comul),
        A.unit.copy(),
        A.antipode.T.copy(),
        star,
        labels if n else (),
    )


def left_mult_matrix(A: KacAlgebra, a) -> np.ndarray:
    return np.einsum("i,ijk->kj", _check(A, a), A.mul)


def integral(A: KacAlgebra, tol: float = TOL) -> np.ndarray:
    """The idempotent two-sided integral t (a t = eps(a) t = t a)."""
    n = A.dim
    eye = np.eye(n)
    rows = []
    for a in range(n):
        rows.append(A.mul[a].T - A.counit[a] * eye)  # a.t - eps(a) t
        rows.append(A.mul[:, a, :].T - A.counit[a] * eye)  # t.a - eps(a) t
    ker = nullspace(np.vstack(rows))
    if ker.shape[1] != 1:
        raise ValueError(f"{A.name}: integral space has dimension {ker.shape[1]}, expected 1")
    t = ker[:, 0]
    eps = A.counit @ t
    if abs(eps) < tol:
        raise ValueError(f"{A.name}: integral has vanishing counit, no idempotent normalization")
    t = t / eps
    if maxabs(multiply(A, t, t) - t) > 1e-7:
        raise ValueError(f"{A.name}: normalized integral is not idempotent")
    return t


def fourier_matrix(A: KacAlgebra) -> np.ndarray:
    """Matrix of F(a) = delta * phi_1(a) phi_2 : A -> A*, phi the idempotent integral of A*."""
    phi = A.haar
    dphi = np.einsum("c,abc->ab", phi, A.mul)  # Delta_{A*}(phi) in dual coordinates
    return A.delta * dphi.T


def fourier(A: KacAlgebra, a) -> np.ndarray:
    return fourier_matrix(A) @ _check(A, a)


def _kron(a, b):
    return sp.kron(a, b, format="csr")


def verify_kac_axioms(A: KacAlgebra, tol: float = TOL) -> list[Check]:
    """Residuals of every Kac algebra axiom (max absolute coefficient error)."""
    n = A.dim
    M, D = A.mul_sparse, A.comul_sparse
    I = sp.identity(n, dtype=complex, format="csr")
    S, St, u, eps = A.antipode, A.star, A.unit, A.counit
    out: list[Check] = []

    def add(name, residual):
        out.append(Check(name, float(residual), tol))

    add("associativity", maxabs((_kron(M, I) @ M - _kron(I, M) @ M).toarray()))
    add(
        "unit",
        max(maxabs(np.einsum("i,ijk->jk", u, A.mul) - np.eye(n)), maxabs(np.einsum("j,ijk->ik", u, A.mul) - np.eye(n))),
    )
    add("coassociativity", maxabs((D @ _kron(D, I) - D @ _kron(I, D)).toarray()))
    dd = A.comul_dense
    add(
        "counit",
        max(maxabs(np.einsum("ijk,j->ik", dd, eps) - np.eye(n)), maxabs(np.einsum("ijk,k->ij", dd, eps) - np.eye(n))),
    )
    # Delta(e_i e_j) versus Delta(e_i) Delta(e_j): rows (i, j), columns (a, b)
    lhs = M @ D
    kk = _kron(M, M)  # rows (p, r, q, s)
    p, q, r, s = np.unravel_index(np.arange(n**4), (n, n, n, n))
    kk = kk[np.ravel_multi_index((p, r, q, s), (n, n, n, n))]
    rhs = _kron(D, D) @ kk
    add("comultiplication_multiplicative", maxabs((lhs - rhs).toarray()))
    add("comultiplication_unital", maxabs(comultiply(A, u) - np.outer(u, u)))
    add(
        "counit_multiplicative",
        max(maxabs(np.einsum("ijk,k->ij", A.mul, eps) - np.outer(eps, eps)), abs(eps @ u - 1.0)),
    )
    add(
        "antipode",
        max(
            maxabs(np.einsum("ipq,rp,rqk->ik", dd, S, A.mul) - np.outer(eps, u)),
            maxabs(np.einsum("ipq,rq,prk->ik", dd, S, A.mul) - np.outer(eps, u)),
        ),
    )
    add("antipode_involutive", maxabs(S @ S - np.eye(n)))
    add("star_involutive", maxabs(St @ np.conj(St) - np.eye(n)))
    prod_star = np.einsum("kl,ijl->ijk", St, np.conj(A.mul))  # (e_i e_j)*
    rev = np.einsum("pj,qi,pqk->ijk", St, St, A.mul)  # e_j* e_i*
    add("star_antimultiplicative", maxabs(prod_star - rev))
    d_star = np.einsum("pi,pjk->ijk", St, dd)  # Delta(e_i*)
    star_d = np.einsum("aj,bk,ijk->iab", St, St, np.conj(dd))  # Delta(e_i)^{* (x) *}
    add("comultiplication_star", maxabs(d_star - star_d))
    add("counit_star", maxabs(eps @ St - np.conj(eps)))
    add("antipode_star", maxabs(S @ St @ np.conj(S) - St))
    try:
        t = integral(A, tol)
        t_dual = integral(dual(A), tol)
        add("integral_idempotent", maxabs(multiply(A, t, t) - t))
        # C*-condition: the Haar functional gives a positive definite form <a, b> = phi(b* a)
        gram = np.einsum("pj,pik,k->ij", St, A.mul, t_dual)
        gram = 0.5 * (gram + gram.conj().T)
        w = np.linalg.eigvalsh(gram)
        out.append(Check("haar_positive", float(max(0.0, -w[0])), tol, {"min_eigenvalue": float(w[0])}, bool(w[0] > tol)))
    except ValueError as exc:
        out.append(Check("integral_idempotent", float("inf"), tol, {"error": str(exc)}, False))
    return out


def axioms_pass(A: KacAlgebra, tol: float = TOL) -> bool:
    return all(c.passed for c in verify_kac_axioms(A, tol))
