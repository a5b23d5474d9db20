"""Relative commutants Q~_m and Q_m, the h-averaging operator, and block decompositions.

Level m lives in the (2m-1)-slot algebra H_[0, 2m-2] (H* on even slots).  The
commutant-side space Q~_m is solved in its own interval and carried over by
the prime map; the displayed commutation description of Q_m is solved
directly as an independent route.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ._linalg import Check, RANK_RTOL, maxabs, nullspace, orth, subspace_residual
from .crossed import (
    SlotAlgebra,
    cond_exp_interval,
    embedding_matrix,
    interval_algebra,
    prime_map,
)
from .hopf_core import KacAlgebra, iterated_coproduct, left_mult_matrix, star as kac_star

TOL = 1e-9
MAX_AMBIENT = 4096


class ResourceGuard(RuntimeError):
    pass


@dataclass
class SubalgebraSpan:
    """Subspace of ``ambient`` with trace-orthonormal basis columns."""

    ambient: SlotAlgebra
    basis: np.ndarray
    closed_under_mult: bool = False
    name: str = ""

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @cached_property
    def euclidean(self) -> np.ndarray:
        return orth(self.basis)

    def residual(self, X) -> float:
        """Distance of the columns of X from the span, relative to the largest column norm."""
        X = np.asarray(X, dtype=complex).reshape(self.ambient.dim, -1)
        if X.shape[1] == 0:
            return 0.0
        Q = self.euclidean
        res = X - Q @ (Q.conj().T @ X)
        scale = max(float(np.max(np.linalg.norm(X, axis=0))), 1e-300)
        return float(np.max(np.linalg.norm(res, axis=0)) / scale)

    def contains(self, X, tol: float = 1e-8) -> bool:
        return self.residual(X) < tol

    def closure_checks(self, tol: float = 1e-8) -> list[Check]:
        A, V = self.ambient, self.basis
        prod = 0.0
        for i in range(self.dim):
            prod = max(prod, self.residual(A.left(V[:, i]) @ V))
        out = [
            Check(f"{self.name}:closed_under_mult", prod, tol),
            Check(f"{self.name}:closed_under_star", self.residual(A.star_matrix @ V.conj()), tol),
            Check(f"{self.name}:contains_unit", self.residual(A.one()), tol),
        ]
        self.closed_under_mult = all(c.passed for c in out)
        return out

    def same_space(self, other: "SubalgebraSpan") -> float:
        """Mutual containment residual (0 iff the spans coincide)."""
        if self.ambient.slots != other.ambient.slots:
            raise ValueError("spans live in different ambients")
        a, b = self.euclidean, other.euclidean
        if a.shape[1] != b.shape[1]:
            return float("inf")
        return max(subspace_residual(a, b), subspace_residual(b, a))


def _trace_orthonormal(ambient: SlotAlgebra, V: np.ndarray) -> np.ndarray:
    if V.shape[1] == 0:
        return V
    G = V.conj().T @ ambient.gram @ V
    w, u = np.linalg.eigh(0.5 * (G + G.conj().T))
    return V @ (u / np.sqrt(w)) @ u.conj().T


def span_of(ambient: SlotAlgebra, vectors, name: str = "") -> SubalgebraSpan:
    return SubalgebraSpan(ambient, _trace_orthonormal(ambient, orth(np.asarray(vectors, dtype=complex))), name=name)


def centralizer(generators, ambient: SlotAlgebra, context: SlotAlgebra | None = None, name: str = "") -> SubalgebraSpan:
    """{X in ambient : X commutes with every generator}, commutators taken in ``context``."""
    context = ambient if context is None else context
    V = embedding_matrix(ambient, context) if context is not ambient else np.eye(ambient.dim, dtype=complex)
    rows = [(context.left(g) - context.right(g)) @ V for g in generators]
    if not rows:
        ker = np.eye(ambient.dim, dtype=complex)
    else:
        ker = nullspace(np.vstack(rows), RANK_RTOL)
    return SubalgebraSpan(ambient, _trace_orthonormal(ambient, ker), name=name)


def _coproduct_generators(H: KacAlgebra, context: SlotAlgebra, slots: list[int]) -> list[np.ndarray]:
    legs = len(slots) - 1
    return [context.place(slots, iterated_coproduct(H, H.basis(i), legs)) for i in range(H.dim)]


def _guard(dim: int, force: bool) -> None:
    if dim > MAX_AMBIENT and not force:
        raise ResourceGuard(f"commutant context of dimension {dim} exceeds {MAX_AMBIENT}")


def qtilde(level: int, H: KacAlgebra, force: bool = False) -> SubalgebraSpan:
    """Commutant-side space: level 2m in H_[2,4m], level 2m-1 in H_[0,4m-4]."""
    if level < 1:
        raise ValueError("level must be >= 1")
    m = (level + 1) // 2
    if level % 2 == 0:
        ambient = interval_algebra(H, 2, 4 * m)
        context = ambient
        slots = [4 * i - 1 for i in range(1, m + 1)]
    else:
        ambient = interval_algebra(H, 0, 4 * m - 4)
        context = interval_algebra(H, -1, 4 * m - 4)
        slots = [4 * i - 1 for i in range(m)]
    _guard(context.dim, force)
    return centralizer(_coproduct_generators(H, context, slots), ambient, context, name=f"qtilde({level})")


def q(level: int, H: KacAlgebra, force: bool = False) -> SubalgebraSpan:
    """Prime-map image of qtilde(level) inside H_[0, 2 level - 2]."""
    qt = qtilde(level, H, force)
    image, target = prime_map(qt.basis, qt.ambient)
    if target.slots != tuple(range(0, 2 * level - 1)):
        raise AssertionError(f"prime map landed on {target.label}")
    return span_of(target, image, name=f"q({level})")


def q_direct(level: int, H: KacAlgebra, force: bool = False) -> SubalgebraSpan:
    """Solve the displayed description of q(level) directly in H_[0, 2 level - 2].

    Generators carry the legs of Delta_{m-1}(x) at slots 1, 5, 9, ...; odd levels
    test X (x) 1 inside one extra slot.
    """
    m = (level + 1) // 2
    ambient = interval_algebra(H, 0, 2 * level - 2)
    context = ambient if level % 2 == 0 else interval_algebra(H, 0, 2 * level - 1)
    _guard(context.dim, force)
    slots = [4 * i - 3 for i in range(1, m + 1)]
    return centralizer(_coproduct_generators(H, context, slots), ambient, context, name=f"q_direct({level})")


# averaging operator -------------------------------------------------------------


@dataclass
class AveragingOperator:
    level: int
    ambient: SlotAlgebra
    context: SlotAlgebra
    terms: list[tuple[np.ndarray, np.ndarray]]  # (left factor, right factor) in context

    def __call__(self, X) -> np.ndarray:
        C = self.context
        Y = embedding_matrix(self.ambient, C) @ self.ambient.check(X) if C is not self.ambient else self.ambient.check(X)
        out = sum(C.mul_many(L, Y, R) for L, R in self.terms)
        if C is not self.ambient:
            out = cond_exp_interval(C, self.ambient, out)
        return out

    @cached_property
    def matrix(self) -> np.ndarray:
        C, A = self.context, self.ambient
        if A.dim > MAX_AMBIENT:
            raise ResourceGuard("averaging operator too large to materialize")
        V = embedding_matrix(A, C) if C is not A else np.eye(A.dim, dtype=complex)
        M = sum(C.left(L) @ (C.right(R) @ V) for L, R in self.terms)
        if C is not A:
            M = cond_exp_interval(C, A, M)
        return M


def averaging_operator(level: int, H: KacAlgebra, force: bool = False) -> AveragingOperator:
    """X -> sum L(h_1..h_k) X R(Sh_2k..Sh_k+1) over the legs of Delta_{2k-1}(h).

    Odd levels act on X (x) 1 in one extra slot and are followed by the trace-preserving
    expectation back onto the first 2 level - 1 slots.
    """
    if level < 1:
        raise ValueError("level must be >= 1")
    k = (level + 1) // 2
    n = H.dim
    ambient = interval_algebra(H, 0, 2 * level - 2)
    context = ambient if level % 2 == 0 else interval_algebra(H, 0, 2 * level - 1)
    _guard(context.dim, force)
    slots = [4 * i - 3 for i in range(1, k + 1)]
    T = iterated_coproduct(H, H.integral, 2 * k - 1).reshape(n**k, n**k)
    u, s, vh = np.linalg.svd(T)
    r = int(np.sum(s > RANK_RTOL * s[0]))
    Sk = H.antipode
    terms = []
    for j in range(r):
        left = (u[:, j] * s[j]).reshape((n,) * k)
        right = vh[j].reshape((n,) * k)
        for p in range(k):
            right = np.moveaxis(np.tensordot(Sk, right, axes=([1], [p])), 0, p)
        right = np.transpose(right, list(reversed(range(k))))
        terms.append((context.place(slots, left), context.place(slots, right)))
    return AveragingOperator(level, ambient, context, terms)


def fixed_space(op: AveragingOperator) -> SubalgebraSpan:
    M = op.matrix
    ker = nullspace(M - np.eye(M.shape[0]), RANK_RTOL)
    return SubalgebraSpan(op.ambient, _trace_orthonormal(op.ambient, ker), name=f"fixed(alpha^{op.level})")


# further pieces of the tower --------------------------------------------------------


def second_commutant_subspace(level: int, H: KacAlgebra, Q: SubalgebraSpan | None = None) -> SubalgebraSpan:
    """Elements of q(level) whose slot 0 is the counit and slot 1 the unit."""
    Q = q(level, H) if Q is None else Q
    amb = Q.ambient
    if level == 1:
        inner = np.asarray([amb.one()]).T
    else:
        inner = embedding_matrix(interval_algebra(H, 2, 2 * level - 2), amb)
    A, B = Q.euclidean, orth(inner)
    ker = nullspace(np.hstack([A, -B]), RANK_RTOL)
    vecs = A @ ker[: A.shape[1]]
    return span_of(amb, vecs, name=f"second({level})")


def natural_inclusion(level: int, H: KacAlgebra) -> np.ndarray:
    """q(level) -> q(level + 1): pad two unit slots on the right."""
    return embedding_matrix(interval_algebra(H, 0, 2 * level - 2), interval_algebra(H, 0, 2 * level))


def e_level(level: int, H: KacAlgebra) -> np.ndarray:
    """Image in q(level) of the grid Jones projection e_{0,level}."""
    from .jones_tower import Grid

    if level < 2:
        raise ValueError("e_level needs level >= 2")
    g = Grid(H, 0, level)
    cell = g.cell(0, level)
    e = g.jones(0, level)
    last = cell.slots[-1]
    # e lives on all but the last slot, which must carry the unit
    body = interval_algebra(H, cell.slots[0], last - 1)
    t = e.reshape(body.dim, H.dim)
    unit = cell.factor(last).unit
    coef = t @ unit.conj() / (unit.conj() @ unit)
    if maxabs(t - np.outer(coef, unit)) > 1e-9:
        raise AssertionError("grid projection does not factor through the commutant interval")
    image, _ = prime_map(coef, body)
    return image


# block decomposition ------------------------------------------------------------------


@dataclass
class BlockDecomposition:
    sizes: list[int]
    central_idempotents: list[np.ndarray] = field(repr=False)
    eigenvalues: list[complex] = field(repr=False)

    @property
    def multiset(self) -> list[int]:
        return sorted(self.sizes)

    @property
    def dim(self) -> int:
        return sum(s * s for s in self.sizes)


class _Kac:
    """Adapter giving a KacAlgebra the SlotAlgebra-style left/right/star/one interface."""

    def __init__(self, A: KacAlgebra):
        self.A = A
        self.dim = A.dim

    def left(self, x):
        return left_mult_matrix(self.A, x)

    def right(self, y):
        return np.einsum("j,ijk->ki", np.asarray(y, dtype=complex), self.A.mul)

    def star(self, x):
        return kac_star(self.A, x)

    def one(self):
        return self.A.unit.astype(complex)


def _as_span(S) -> tuple[object, np.ndarray, np.ndarray]:
    """(ambient, basis, generators) for a span, slot algebra or Kac algebra."""
    if isinstance(S, SubalgebraSpan):
        return S.ambient, S.basis, S.basis
    if isinstance(S, SlotAlgebra):
        eye = np.eye(S.dim, dtype=complex)
        gens = [S.slot_element(s, S.factor(s).basis(i)) for s in S.slots for i in range(S.n)]
        return S, eye, np.array(gens).T if gens else eye[:, :0]
    if isinstance(S, KacAlgebra):
        eye = np.eye(S.dim, dtype=complex)
        return _Kac(S), eye, eye
    raise TypeError(f"cannot decompose {type(S).__name__}")


def _centre_coefficients(amb, V: np.ndarray, gens: np.ndarray) -> np.ndarray:
    d, k = V.shape[1], gens.shape[1]
    if k == 0:
        return np.eye(d, dtype=complex)
    if k * V.shape[0] * d <= 2 * 10**7:
        rows = [(amb.right(gens[:, j]) - amb.left(gens[:, j])) @ V for j in range(k)]
        return nullspace(np.vstack(rows), RANK_RTOL)
    # large systems: accumulate the normal equations instead of stacking
    G = np.zeros((d, d), dtype=complex)
    for j in range(k):
        M = (amb.right(gens[:, j]) - amb.left(gens[:, j])) @ V
        G += M.conj().T @ M
    w, u = np.linalg.eigh(0.5 * (G + G.conj().T))
    return u[:, w <= max(RANK_RTOL * w[-1], 1e-12)]


def block_decomposition(S, seed: int = 0, cluster_tol: float = 1e-7, attempts: int = 5) -> BlockDecomposition:
    """Simple summands of a finite-dimensional C*-algebra via a generic central element."""
    amb, V, gens = _as_span(S)
    d = V.shape[1]
    pinv = np.linalg.pinv(V)
    # centre: z = V c with [z, g] = 0 for all generators g
    cz = _centre_coefficients(amb, V, gens)
    centre = V @ cz
    zdim = centre.shape[1]
    one_c = pinv @ amb.one()
    rng = np.random.default_rng(seed)
    for _ in range(attempts):
        w = centre @ (rng.standard_normal(zdim) + 1j * rng.standard_normal(zdim))
        z = 0.5 * (w + amb.star(w))
        Lz = pinv @ amb.left(z) @ V
        vals = np.linalg.eigvals(Lz)
        clusters: list[list[complex]] = []
        scale = max(1.0, float(np.max(np.abs(vals))))
        for v in sorted(vals, key=lambda c: (round(c.real, 6), round(c.imag, 6))):
            for cl in clusters:
                if abs(cl[0] - v) < cluster_tol * scale:
                    cl.append(v)
                    break
            else:
                clusters.append([v])
        if len(clusters) != zdim:
            continue
        centres = [np.mean(cl) for cl in clusters]
        sizes, idem = [], []
        for i, cl in enumerate(clusters):
            root = int(round(np.sqrt(len(cl))))
            if root * root != len(cl):
                break
            p = one_c.copy()
            for j, mu in enumerate(centres):
                if j != i:
                    p = (Lz @ p - mu * p) / (centres[i] - mu)
            sizes.append(root)
            idem.append(V @ p)
        else:
            order = np.argsort(sizes, kind="stable")
            return BlockDecomposition(
                [sizes[i] for i in order], [idem[i] for i in order], [centres[i] for i in order]
            )
    raise np.linalg.LinAlgError("could not split the centre with a generic element")


def inclusion_matrix(small: BlockDecomposition, big: BlockDecomposition, big_algebra: SlotAlgebra, embed_small: np.ndarray) -> np.ndarray:
    """Multiplicities: entry (i, j) is the number of copies of block i of the small algebra in block j."""
    C = big_algebra
    out = np.zeros((len(small.sizes), len(big.sizes)), dtype=int)
    for i, p in enumerate(small.central_idempotents):
        P = embed_small @ p
        for j, qj in enumerate(big.central_idempotents):
            pq = C.mul(P, qj)
            if maxabs(pq) < 1e-9:
                continue
            corner = C.left(pq) @ C.right(pq)
            r = np.linalg.matrix_rank(corner, tol=1e-8 * max(1.0, maxabs(corner)))
            mult = np.sqrt(r) / small.sizes[i]
            out[i, j] = int(round(mult))
    return out
