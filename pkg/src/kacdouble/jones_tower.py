"""GNS representations, Jones projections, basic-construction and commuting-square checks, and the grid A_{k,n}."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from ._linalg import Check, inv_sqrt_psd, maxabs, orth, rank
from .crossed import (
    SlotAlgebra,
    embed,
    embedding_matrix,
    generic_cond_exp,
    interval_algebra,
    psi_embedding,
    tensor_algebra,
)
from .hopf_core import KacAlgebra

TOL = 1e-9
MAX_DIM = 10**4


class ResourceGuard(RuntimeError):
    """Raised when a requested construction exceeds the configured size bounds."""


@dataclass
class GnsRep:
    algebra: SlotAlgebra
    onb: np.ndarray  # columns: orthonormal basis of L^2(algebra) in algebra coordinates
    to_l2: np.ndarray  # coordinates -> L^2 coordinates (W^{1/2})

    def left_mul(self, X) -> np.ndarray:
        return self.to_l2 @ self.algebra.left(X) @ self.onb

    @property
    def omega(self) -> np.ndarray:
        return self.to_l2 @ self.algebra.one()

    def vector(self, X) -> np.ndarray:
        return self.to_l2 @ self.algebra.check(X)


def gns(A: SlotAlgebra) -> GnsRep:
    w, v = np.linalg.eigh(A.gram)
    if w[0] <= 1e-12 * max(w[-1], 1.0):
        raise np.linalg.LinAlgError("trace is not faithful: Gram matrix not positive definite")
    root = (v * np.sqrt(w)) @ v.conj().T
    onb = inv_sqrt_psd(A.gram)
    return GnsRep(A, onb, root)


def jones_projection(B: SlotAlgebra, sub_basis: np.ndarray) -> np.ndarray:
    """Orthogonal projection of L^2(B) onto the closure of A.Omega (A spanned by sub_basis columns)."""
    V = np.asarray(sub_basis, dtype=complex).reshape(B.dim, -1)
    one = B.one()
    coef, *_ = np.linalg.lstsq(V, one, rcond=None)
    if maxabs(V @ coef - one) > 1e-8:
        raise ValueError("subalgebra is not unital in B")
    rep = gns(B)
    E = generic_cond_exp(B, V)
    return rep.to_l2 @ E @ rep.onb


# Jones projections as concrete elements ---------------------------------------


def slot_integral(C: SlotAlgebra, s: int) -> np.ndarray:
    """Idempotent integral of the slot-s factor, placed in C."""
    return C.slot_element(s, C.factor(s).integral)


def pimsner_popa(C: SlotAlgebra, chain: list[int], lam: float) -> np.ndarray:
    """r-step Jones projection from the single-step ones.

    ``chain`` lists the slots whose integrals are the successive single-step
    projections f_2, ..., f_{2r}; the result is
    lam^{r(r-1)/2} (f_{r+1} ... f_2)(f_{r+2} ... f_3) ... (f_{2r} ... f_{r+1}).
    """
    if not chain:
        return C.one()
    r = (len(chain) + 1) // 2
    if len(chain) != 2 * r - 1:
        raise ValueError("an r-step projection needs 2r - 1 single-step projections")
    f = {j + 2: slot_integral(C, s) for j, s in enumerate(chain)}
    out = C.one()
    for i in range(1, r + 1):
        for j in range(r + i, i, -1):
            out = C.mul(out, f[j])
    return lam ** (r * (r - 1) / 2) * out


def double_cup(C: SlotAlgebra, a: int) -> np.ndarray:
    """Two-strand Jones projection n * I(a+1) I(a) I(a+2) I(a+1) on slots a, a+1, a+2."""
    return pimsner_popa(C, [a, a + 1, a + 2], float(C.n))


# inclusion triples ------------------------------------------------------------


@dataclass
class Triple:
    """A subset B subset C with the candidate Jones projection e in C and expected modulus."""

    name: str
    A: SlotAlgebra
    B: SlotAlgebra
    C: SlotAlgebra
    V_AB: np.ndarray
    V_BC: np.ndarray
    e: np.ndarray
    modulus: float

    @property
    def V_AC(self) -> np.ndarray:
        return self.V_BC @ self.V_AB


def _natural(A: SlotAlgebra, B: SlotAlgebra) -> np.ndarray:
    return embedding_matrix(A, B)


def basic_1i(H: KacAlgebra, k: int, p: int, q: int, l: int) -> Triple:
    """H_[p,q] in H_[k,l] in H_[2k-p, 2l-q]."""
    if not (k <= p and q <= l and p <= q + 1):
        raise ValueError("need k <= p <= q + 1 and q <= l")
    A, B = interval_algebra(H, p, q), interval_algebra(H, k, l)
    C = interval_algebra(H, 2 * k - p, 2 * l - q)
    lam = float(H.dim)
    left = pimsner_popa(C, [p - j for j in range(2, 2 * (p - k) + 1)], lam)
    right = pimsner_popa(C, [q + j for j in range(2, 2 * (l - q) + 1)], lam)
    e = C.mul(left, right)
    return Triple(f"H[{p},{q}] < H[{k},{l}] < {C.label}", A, B, C, _natural(A, B), _natural(B, C), e, lam ** (p - k + l - q))


def basic_1ii(H: KacAlgebra, k: int) -> Triple:
    """C in H_[0,k] in H_[0,2k+1]."""
    A, B, C = interval_algebra(H, 0, -1), interval_algebra(H, 0, k), interval_algebra(H, 0, 2 * k + 1)
    lam = float(H.dim)
    e = pimsner_popa(C, [j - 1 for j in range(2, 2 * (k + 1) + 1)], lam)
    return Triple(f"C < H[0,{k}] < H[0,{2 * k + 1}]", A, B, C, _natural(A, B), _natural(B, C), e, lam ** (k + 1))


def basic_1iii(H: KacAlgebra, k: int) -> Triple:
    """C in H_[-k,0] in H_[-2k-1,0]."""
    A, B, C = interval_algebra(H, 1, 0), interval_algebra(H, -k, 0), interval_algebra(H, -2 * k - 1, 0)
    lam = float(H.dim)
    e = pimsner_popa(C, [1 - j for j in range(2, 2 * (k + 1) + 1)], lam)
    return Triple(f"C < H[{-k},0] < H[{-2 * k - 1},0]", A, B, C, _natural(A, B), _natural(B, C), e, lam ** (k + 1))


def basic_2(H: KacAlgebra, l: int, s: int) -> Triple:
    """H_[-l,-1] (x) H_[2,2+s] in H_[-l,2+s] in H_[-l,-1] (x) H_[2,6+s] (via psi)."""
    A = tensor_algebra(H, (-l, -1), (2, 2 + s))
    V_BC, B, C = psi_embedding(H, l, s)
    e = double_cup(C, 2)
    return Triple(f"{A.label} < {B.label} < {C.label}", A, B, C, _natural(A, B), V_BC, e, float(H.dim) ** 2)


def basic_3(H: KacAlgebra, l: int, s: int) -> Triple:
    """H_[-l,2+s] in H_[-l,-1] (x) H_[2,6+s] (via psi) in H_[-l,6+s]."""
    V_AB, A, B = psi_embedding(H, l, s)
    C = interval_algebra(H, -l, 6 + s)
    e = double_cup(C, 0)
    return Triple(f"{A.label} < {B.label} < {C.label}", A, B, C, V_AB, _natural(B, C), e, float(H.dim) ** 2)


# checks -----------------------------------------------------------------------


def span_dimension(blocks, target: int | None = None, rtol: float = 1e-8) -> int:
    """Dimension of the sum of column spans of the given blocks (stops early at ``target``)."""
    Q = None
    scale = 0.0
    for blk in blocks:
        blk = np.asarray(blk, dtype=complex)
        if blk.size == 0:
            continue
        scale = max(scale, float(np.max(np.linalg.norm(blk, axis=0))))
        if Q is not None:
            blk = blk - Q @ (Q.conj().T @ blk)
            blk = blk - Q @ (Q.conj().T @ blk)
        u, s, _ = np.linalg.svd(blk, full_matrices=False)
        new = u[:, s > rtol * max(scale, 1e-300)]
        if new.shape[1]:
            Q = new if Q is None else np.hstack([Q, new])
        if target is not None and Q is not None and Q.shape[1] >= target:
            break
    return 0 if Q is None else Q.shape[1]


def _expectation_in(B: SlotAlgebra, V: np.ndarray) -> np.ndarray:
    return generic_cond_exp(B, V)


def basic_construction_check(t: Triple, tol: float = TOL) -> list[Check]:
    """Conditions (i)-(iii) for e together with the Markov property of modulus t.modulus."""
    C, e = t.C, t.e
    Le, Re = C.left(e), C.right(e)
    out: list[Check] = []
    out.append(Check("projection", max(maxabs(C.star(e) - e), maxabs(Le @ e - e)), tol))
    V_AC = t.V_AC
    out.append(Check("commutes_with_A", maxabs(Le @ V_AC - Re @ V_AC), tol))
    inj = rank(Re @ V_AC)
    out.append(Check("a_to_ae_injective", float(t.A.dim - inj), 0.5, {"rank": inj, "dim_A": t.A.dim}))
    # e b e = E_A(b) e, E_A the trace-preserving expectation of B onto A
    E_A = _expectation_in(t.B, t.V_AB)  # B -> B coordinates
    ebe = Le @ Re @ t.V_BC
    rhs = Re @ t.V_BC @ E_A
    out.append(Check("implements_expectation", maxabs(ebe - rhs), tol))
    # span(B e B) = C: span of b_i e b_j = sum over q in orth(eB) of B.q
    eB = orth(Le @ t.V_BC)
    blocks = (C.right(eB[:, c]) @ t.V_BC for c in range(eB.shape[1]))
    dim_span = span_dimension(blocks, target=C.dim)
    out.append(Check("spans_C", float(C.dim - dim_span), 0.5, {"dim_span": dim_span, "dim_C": C.dim}))
    out.extend(markov_check(t, tol))
    return out


def markov_check(t: Triple, tol: float = TOL) -> list[Check]:
    """tr(x e) = modulus^{-1} tr(x) for all basis x of B, and tr(e) = modulus^{-1}."""
    C, e, lam = t.C, t.e, t.modulus
    tr = C.trace_vector
    lhs = (tr @ C.right(e)) @ t.V_BC
    rhs = (tr @ t.V_BC) / lam
    tr_e = C.trace(e)
    return [
        Check("markov", maxabs(lhs - rhs), tol, {"modulus": lam}),
        Check("trace_of_e", abs(tr_e - 1.0 / lam), tol, {"trace": tr_e.real}),
    ]


def commuting_square_check(S: SlotAlgebra, P: np.ndarray, Q: np.ndarray, R: np.ndarray, tol: float = TOL) -> list[Check]:
    """P in Q, P in R, Q, R in S (basis columns in S coordinates)."""
    EP, EQ, ER = (generic_cond_exp(S, V) for V in (P, Q, R))
    out = [
        Check("E_Q E_R = E_P", maxabs(EQ @ ER - EP), tol),
        Check("E_R E_Q = E_P", maxabs(ER @ EQ - EP), tol),
    ]
    blocks = (S.right(R[:, j]) @ Q for j in range(R.shape[1]))
    d = span_dimension(blocks, target=S.dim)
    out.append(Check("symmetric_span", float(S.dim - d), 0.5, {"dim_span": d, "dim_S": S.dim}))
    return out


def comm_sq_instance(H: KacAlgebra, k: int, p: int, q: int, l: int):
    """Square C in H_[k,p] (x) H_[q,l], H_[p+1,q-1] in H_[k,l], with its Markov triple."""
    if not k < p < q < l:
        raise ValueError("need k < p < q < l")
    S = interval_algebra(H, k, l)
    Qa = interval_algebra(H, p + 1, q - 1)
    Ra = tensor_algebra(H, (k, p), (q, l))
    P = S.one().reshape(-1, 1)
    triple = basic_1i(H, k, p + 1, q - 1, l)
    return S, P, embedding_matrix(Qa, S), embedding_matrix(Ra, S), triple


# the grid A_{k,n} ---------------------------------------------------------------


def cell_slots(k: int, n: int) -> tuple[int, ...]:
    if k < 0 or n < 0:
        raise ValueError("grid indices are non-negative")
    if k == 0:
        if n == 0:
            return ()
        if n % 2:
            return tuple(range(0, 2 * n))
        return tuple(range(2, 2 * n + 2))
    if n % 2:
        return tuple(range(-k, 2 * n + k))
    return tuple(range(-k, 0)) + tuple(range(2, 2 * n + k + 2))


def cell_dim(H: KacAlgebra, k: int, n: int) -> int:
    return H.dim ** len(cell_slots(k, n))


@dataclass
class TowerCell:
    k: int
    n: int
    algebra: SlotAlgebra


@dataclass
class Grid:
    H: KacAlgebra
    k_max: int
    n_max: int
    cells: dict[tuple[int, int], TowerCell] = field(default_factory=dict)

    def cell(self, k: int, n: int) -> SlotAlgebra:
        key = (k, n)
        if key not in self.cells:
            self.cells[key] = TowerCell(k, n, SlotAlgebra(self.H, cell_slots(k, n)))
        return self.cells[key].algebra

    def right_map(self, k: int, n: int) -> np.ndarray:
        """Matrix of A_{k,n} -> A_{k,n+1}."""
        src, dst = self.cell(k, n), self.cell(k, n + 1)
        if n % 2 and k > 0:
            V, psrc, pdst = psi_embedding(self.H, k, 2 * n + k - 3)
            assert psrc.slots == src.slots and pdst.slots == dst.slots
            return V
        if n % 2 and k == 0:
            return embedding_matrix(src, dst, shift=4)
        return embedding_matrix(src, dst)

    def up_map(self, k: int, n: int) -> np.ndarray:
        """Matrix of A_{k,n} -> A_{k+1,n}."""
        return embedding_matrix(self.cell(k, n), self.cell(k + 1, n))

    def jones(self, k: int, m: int) -> np.ndarray:
        """e_{k,m} in A_{k,m} (m >= 2), the Jones projection of A_{k,m-2} in A_{k,m-1}."""
        if m < 2:
            raise ValueError("e_{k,m} needs m >= 2")
        return double_cup(self.cell(k, m), 0 if m % 2 else 2)

    def triple(self, k: int, n: int) -> Triple:
        A, B, C = self.cell(k, n), self.cell(k, n + 1), self.cell(k, n + 2)
        return Triple(
            f"A[{k},{n}] < A[{k},{n + 1}] < A[{k},{n + 2}]",
            A,
            B,
            C,
            self.right_map(k, n),
            self.right_map(k, n + 1),
            self.jones(k, n + 2),
            float(self.H.dim) ** 2,
        )

    def push_right(self, k: int, m: int, top: int, X) -> np.ndarray:
        for j in range(m, top):
            X = self.right_map(k, j) @ X
        return X


def build_grid(H: KacAlgebra, k_max: int, n_max: int, force: bool = False, max_dim: int = MAX_DIM) -> Grid:
    need = max(cell_dim(H, k, n) for k in range(k_max + 1) for n in range(n_max + 1))
    if need > max_dim and not force:
        raise ResourceGuard(f"grid up to A[{k_max},{n_max}] needs dimension {need} > {max_dim}")
    g = Grid(H, k_max, n_max)
    for k in range(k_max + 1):
        for n in range(n_max + 1):
            g.cell(k, n)
    return g


def temperley_lieb_check(g: Grid, k: int, top: int, tol: float = TOL) -> list[Check]:
    """Relations among e_{k,2}, ..., e_{k,top} pushed into A_{k,top}."""
    C = g.cell(k, top)
    es = {m: g.push_right(k, m, top, g.jones(k, m)) for m in range(2, top + 1)}
    tau = 1.0 / float(g.H.dim) ** 2
    proj = tl = far = 0.0
    for i, e in es.items():
        proj = max(proj, maxabs(C.mul(e, e) - e), maxabs(C.star(e) - e))
        for j, f in es.items():
            if abs(i - j) == 1:
                tl = max(tl, maxabs(C.mul_many(e, f, e) - tau * e))
            elif abs(i - j) >= 2:
                far = max(far, maxabs(C.mul(e, f) - C.mul(f, e)))
    name = f"TL[k={k},e2..e{top}]"
    return [
        Check(f"{name}:projections", proj, tol),
        Check(f"{name}:e_i e_(i+-1) e_i = delta^-4 e_i", tl, tol, {"pairs": len(es) > 1}),
        Check(f"{name}:far_commutation", far, tol, {"pairs": len(es) > 2}),
    ]


def grid_checks(g: Grid, tol: float = TOL, tl_top: int | None = None) -> list[Check]:
    """Every grid check: squares, vertical triples, up maps and (optionally) Temperley-Lieb relations."""
    out: list[Check] = []
    K, N = g.k_max, g.n_max
    for k in range(K):
        for n in range(N):
            lhs = g.right_map(k + 1, n) @ g.up_map(k, n)
            rhs = g.up_map(k, n + 1) @ g.right_map(k, n)
            out.append(Check(f"square_commutes[{k},{n}]", maxabs(lhs - rhs), tol))
    for k in range(K + 1):
        for n in range(N - 1):
            t = g.triple(k, n)
            for c in basic_construction_check(t, tol):
                c.name = f"basic[{k},{n}]:{c.name}"
                out.append(c)
    for k in range(K):
        for m in range(2, N + 1):
            moved = g.up_map(k, m) @ g.jones(k, m)
            out.append(Check(f"up_carries_e[{k},{m}]", maxabs(moved - g.jones(k + 1, m)), tol))
    for k in range(K + 1):
        if N >= 3:
            out.extend(temperley_lieb_check(g, k, N, tol))
    if tl_top is not None and tl_top > N:
        out.extend(temperley_lieb_check(g, 0, tl_top, tol))
    return out
