"""Iterated crossed products H_[i,j] and their tensor-product subalgebras.

Slot s carries H when s is odd and H* when s is even.  An element of the
algebra on slots (s_1 < ... < s_L) is a dense coefficient tensor of shape
(n,)*L, flattened in slot order, over the elementary tensors
x^{s_1} x^{s_2} ... x^{s_L} (the normal-ordered products).

Moving a slot-(s+1) element past a slot-s element obeys

    u . b = (u_(1) |> b) u_(2)

where |> is the canonical action of the neighbouring factor.  Writing both
factors in normal order and pushing each slot of the right factor leftwards
gives the product slot by slot:

    (X Y)_s = x_s,(2) . (x_{s+1},(1) |> y_s)

so the product is a contraction along the slot chain whose bond index is the
first coproduct leg of the next slot.  Slots further apart than one commute,
so a gap in the slot list simply breaks the chain.  The same bond structure
gives the star operation (swept right to left) and the trace pairing.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import hopf_core as hc
from .hopf_core import KacAlgebra


def canonical_action(A: KacAlgebra, u, v) -> np.ndarray:
    """Action of the dual of A on A: (f |> x) = f(x_2) x_1.

    With A = H this is f.x = f(x_2) x_1; with A = H* (so the acting algebra is H)
    it reads (x |> f)(y) = f(y x).
    """
    return np.einsum("c,b,brc->r", np.asarray(u), np.asarray(v), A.comul_dense)


def action_tensor(A: KacAlgebra) -> np.ndarray:
    """act[c, b, r]: coefficient of e_r in (dual basis c) |> e_b."""
    return np.transpose(A.comul_dense, (2, 0, 1))


class SlotAlgebra:
    """The subalgebra of the chain generated by the slots in ``slots``.

    A contiguous slot range is the interval algebra H_[i,j]; ranges separated by
    at least one missing slot give tensor products such as H_[-l,-1] (x) H_[2,q].
    """

    def __init__(self, H: KacAlgebra, slots: Iterable[int]):
        self.H = H
        self.Hd = hc.dual(H)
        self.slots = tuple(sorted(set(int(s) for s in slots)))
        self.n = H.dim
        self.L = len(self.slots)
        self.dim = self.n**self.L
        self.shape = (self.n,) * self.L

    def __repr__(self) -> str:
        return f"SlotAlgebra({self.H.name}, {self.label})"

    @property
    def label(self) -> str:
        if not self.slots:
            return "C"
        runs, start, prev = [], self.slots[0], self.slots[0]
        for s in self.slots[1:]:
            if s != prev + 1:
                runs.append((start, prev))
                start = s
            prev = s
        runs.append((start, prev))
        return " (x) ".join(f"H[{a},{b}]" for a, b in runs)

    def factor(self, s: int) -> KacAlgebra:
        return self.H if s % 2 else self.Hd

    def _linked(self, p: int) -> bool:
        """Whether position p+1 acts on position p."""
        return p + 1 < self.L and self.slots[p + 1] == self.slots[p] + 1

    def same_as(self, other: "SlotAlgebra") -> bool:
        return self.H is other.H and self.slots == other.slots

    def check(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=complex)
        if X.shape != (self.dim,):
            raise ValueError(f"element of shape {X.shape} does not belong to {self.label} (dim {self.dim})")
        return X

    # elements -------------------------------------------------------------

    def one(self) -> np.ndarray:
        return self.elementary({})

    def basis(self, index: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[index] = 1.0
        return v

    def elementary(self, parts: dict[int, np.ndarray]) -> np.ndarray:
        """Normal-ordered product of slot elements; slots not given carry the unit."""
        for s in parts:
            if s not in self.slots:
                raise ValueError(f"slot {s} is not in {self.label}")
        t = np.ones((), dtype=complex)
        for s in self.slots:
            v = parts.get(s, self.factor(s).unit)
            t = np.multiply.outer(t, np.asarray(v, dtype=complex))
        return t.reshape(-1)

    def slot_element(self, s: int, v) -> np.ndarray:
        return self.elementary({s: v})

    def place(self, slots: Sequence[int], tensor) -> np.ndarray:
        """Embed a tensor over the given (increasing) slots, units elsewhere."""
        tensor = np.asarray(tensor, dtype=complex)
        sub = SlotAlgebra(self.H, slots)
        return embed(tensor.reshape(-1), sub, self)

    # local tensors ----------------------------------------------------------

    @cached_property
    def _mul_locals(self) -> list[np.ndarray]:
        """G_p with axes (bond_in, a, b, k, bond_out) for the product sweep."""
        out = []
        for p, s in enumerate(self.slots):
            A = self.factor(s)
            n = self.n
            if p > 0 and self.slots[p - 1] == s - 1:
                split = A.comul_dense  # (a, dn, d)
            else:
                split = np.eye(n, dtype=complex)[:, None, :]
            if self._linked(p):
                act = action_tensor(A)  # (up, b, r)
            else:
                act = np.eye(n, dtype=complex)[None, :, :]
            g = np.einsum("axd,ubr,drk->xabku", split, act, A.mul, optimize=True)
            out.append(g)
        return out

    @cached_property
    def _star_locals(self) -> list[np.ndarray]:
        """Local tensors with axes (bond_in, a, k, bond_out) for X -> X* (applied to conj(X))."""
        out = []
        for p, s in enumerate(self.slots):
            A = self.factor(s)
            n = self.n
            if p > 0 and self.slots[p - 1] == s - 1:
                split = A.comul_dense
            else:
                split = np.eye(n, dtype=complex)[:, None, :]
            if self._linked(p):
                act = action_tensor(A)
            else:
                act = np.eye(n, dtype=complex)[None, :, :]
            g = np.einsum("ba,ubw,wxk->xaku", A.star, act, split, optimize=True)
            out.append(g)
        return out

    # sweeps -----------------------------------------------------------------

    def _sweep_fixed(self, locals_, fixed: np.ndarray) -> np.ndarray:
        """Contract a bilinear chain with one argument fixed; returns matrix [k, free]."""
        n, L = self.n, self.L
        if L == 0:
            return np.asarray(fixed, dtype=complex).reshape(1, 1)
        # state axes: (K, F, bond, rest of fixed)
        state = np.asarray(fixed, dtype=complex).reshape(1, 1, 1, -1)
        for p in range(L):
            g = locals_[p]  # (dn, fixed, free, k, up)
            dn, _, _, _, up = g.shape
            K, F, bond, R = state.shape
            rest = R // n
            st = state.reshape(K, F, bond, n, rest).transpose(0, 1, 4, 2, 3).reshape(K * F * rest, bond * n)
            nxt = st @ g.reshape(dn * n, n * n * up)
            nxt = nxt.reshape(K, F, rest, n, n, up).transpose(0, 4, 1, 3, 5, 2)
            state = nxt.reshape(K * n, F * n, up, rest)
        return state.reshape(self.dim, self.dim)

    def left(self, X) -> np.ndarray:
        """Matrix of Y -> X Y."""
        X = self.check(X)
        return self._sweep_fixed(self._mul_locals, X)

    def right(self, Y) -> np.ndarray:
        """Matrix of X -> X Y."""
        Y = self.check(Y)
        swapped = [np.transpose(g, (0, 2, 1, 3, 4)) for g in self._mul_locals]
        return self._sweep_fixed(swapped, Y)

    def mul(self, X, Y) -> np.ndarray:
        return self.left(X) @ self.check(Y)

    def mul_many(self, *factors) -> np.ndarray:
        out = self.check(factors[0])
        for f in factors[1:]:
            out = self.mul(out, f)
        return out

    @cached_property
    def star_matrix(self) -> np.ndarray:
        """Matrix M with X* = M conj(X)."""
        n, L = self.n, self.L
        if L == 0:
            return np.ones((1, 1), dtype=complex)
        # sweep right to left, state axes: (bond, K, A)
        state = np.ones((1, 1, 1), dtype=complex)
        for p in reversed(range(L)):
            g = self._star_locals[p]  # (dn, a, k, up)
            dn, _, _, up = g.shape
            _, K, A = state.shape
            nxt = np.einsum("uKA,xaku->xkKaA", state, g)
            state = nxt.reshape(dn, n * K, n * A)
        return state.reshape(self.dim, self.dim)

    def star(self, X) -> np.ndarray:
        return self.star_matrix @ np.conj(self.check(X))

    @cached_property
    def trace_vector(self) -> np.ndarray:
        """tr(X) = trace_vector @ X: phi on H-slots, evaluation at h on H*-slots."""
        t = np.ones((), dtype=complex)
        for s in self.slots:
            t = np.multiply.outer(t, self.factor(s).haar)
        return t.reshape(-1)

    def trace(self, X) -> complex:
        return complex(self.trace_vector @ self.check(X))

    @cached_property
    def trace_form(self) -> np.ndarray:
        """B[a, b] = tr(e_a e_b)."""
        n, L = self.n, self.L
        if L == 0:
            return np.ones((1, 1), dtype=complex)
        state = np.ones((1, 1, 1), dtype=complex)  # (A, B, bond)
        for p, s in enumerate(self.slots):
            g = np.einsum("xabku,k->xabu", self._mul_locals[p], self.factor(s).haar)
            nxt = np.einsum("ABx,xabu->AaBbu", state, g)
            state = nxt.reshape(state.shape[0] * n, state.shape[1] * n, g.shape[-1])
        return state.reshape(self.dim, self.dim)

    @cached_property
    def gram(self) -> np.ndarray:
        """Hermitian W with <X, Y> = tr(Y* X) = Y^H W X."""
        w = self.star_matrix.T @ self.trace_form
        return 0.5 * (w + w.conj().T)

    def inner(self, X, Y) -> complex:
        return complex(np.conj(self.check(Y)) @ self.gram @ self.check(X))

    def structure_tensor(self) -> np.ndarray:
        """Full multiplication tensor T[i, j, k] (only for small algebras)."""
        if self.dim > 256:
            raise MemoryError("structure tensor requested for a large algebra")
        T = np.empty((self.dim, self.dim, self.dim), dtype=complex)
        for i in range(self.dim):
            T[i] = self.left(self.basis(i)).T
        return T


def interval_algebra(H: KacAlgebra, i: int, j: int) -> SlotAlgebra:
    """H_[i,j]; the empty interval (i > j) is C."""
    return SlotAlgebra(H, range(i, j + 1))


def tensor_algebra(H: KacAlgebra, *intervals: tuple[int, int]) -> SlotAlgebra:
    """H_[a1,b1] (x) H_[a2,b2] (x) ...; consecutive intervals must be separated by a gap."""
    slots: list[int] = []
    for a, b in intervals:
        if slots and a <= slots[-1] + 1:
            raise ValueError("tensor factors must be separated by at least one missing slot")
        slots.extend(range(a, b + 1))
    return SlotAlgebra(H, slots)


# maps between slot algebras ---------------------------------------------------


def _to_batch(X, dim: int) -> tuple[np.ndarray, bool]:
    X = np.asarray(X, dtype=complex)
    single = X.ndim == 1
    X = X.reshape(dim, -1)
    return X, single


def embed(X, source: SlotAlgebra, target: SlotAlgebra, shift: int = 0) -> np.ndarray:
    """Natural inclusion padding the new slots with units; source slot s lands on s + shift.

    Accepts one element (dim,) or a batch of columns (dim, m).
    """
    if shift % 2:
        raise ValueError("slot shifts must be even to preserve parity")
    if source.H is not target.H:
        raise ValueError("embedding between algebras over different Kac algebras")
    moved = [s + shift for s in source.slots]
    if not set(moved) <= set(target.slots):
        raise ValueError(f"{source.label} (shift {shift}) is not contained in {target.label}")
    X, single = _to_batch(X, source.dim)
    m = X.shape[1]
    t = X.reshape(source.shape + (m,))
    axis_of = {s: i for i, s in enumerate(moved)}
    new_axes = []
    for s in target.slots:
        if s not in axis_of:
            t = np.multiply.outer(t, target.factor(s).unit)
            new_axes.append(s)
    # current axis order: moved slots, batch, new slots
    order_labels = moved + ["batch"] + new_axes
    perm = [order_labels.index(s) for s in target.slots] + [order_labels.index("batch")]
    out = np.transpose(t, perm).reshape(target.dim, m)
    return out[:, 0] if single else out


def embedding_matrix(source: SlotAlgebra, target: SlotAlgebra, shift: int = 0) -> np.ndarray:
    return embed(np.eye(source.dim, dtype=complex), source, target, shift)


def prime_map(X, source: SlotAlgebra, target_start: int | None = None) -> tuple[np.ndarray, SlotAlgebra]:
    """X' : reverse the slot order and apply S slotwise (a *-anti-isomorphism).

    ``source`` must be an interval [i, j]; the image lives on [t, t + L - 1] with t of
    the parity of j (default t = 1 if j is odd, else 0).
    """
    slots = source.slots
    if not slots or list(slots) != list(range(slots[0], slots[-1] + 1)):
        raise ValueError("prime_map needs a non-empty interval algebra")
    j = slots[-1]
    t0 = (j % 2) if target_start is None else target_start
    if (t0 - j) % 2:
        raise ValueError("target start must have the parity of the last source slot")
    target = interval_algebra(source.H, t0, t0 + source.L - 1)
    X, single = _to_batch(X, source.dim)
    m = X.shape[1]
    t = X.reshape(source.shape + (m,))
    for p, s in enumerate(slots):
        S = source.factor(s).antipode
        t = np.moveaxis(np.tensordot(S, t, axes=([1], [p])), 0, p)
    t = np.transpose(t, list(reversed(range(source.L))) + [source.L])
    out = t.reshape(target.dim, m)
    return (out[:, 0] if single else out), target


def psi_embedding(H: KacAlgebra, l: int, s: int, X=None):
    """psi_{l,s}: H_[-l, 2+s] -> H_[-l,-1] (x) H_[2, 6+s].

    The slot -1 element is split by the coproduct into slots -1 and 3, slot 2 gets
    the unit of H*, and slots t >= 0 move to t + 4.  Returns (image, source, target);
    with X None the image is the full embedding matrix.
    """
    if l < 1 or s < 0:
        raise ValueError("psi_embedding needs l >= 1 and s >= 0")
    source = interval_algebra(H, -l, 2 + s)
    target = tensor_algebra(H, (-l, -1), (2, 6 + s))
    return _psi_apply(X, source, target, l), source, target


def _psi_apply(X, source: SlotAlgebra, target: SlotAlgebra, l: int) -> np.ndarray:
    H = source.H
    if X is None:
        X = np.eye(source.dim, dtype=complex)
    X, single = _to_batch(X, source.dim)
    m = X.shape[1]
    t = X.reshape(source.shape + (m,))
    pos = l - 1  # axis of slot -1
    # split slot -1: axes become (..., leg1, leg2, slots 0.., batch)
    t = np.tensordot(t, H.comul_dense, axes=([pos], [0]))  # leg axes appended at the end
    # current axes: slots -l..-2, slots 0..2+s, batch, leg1, leg2
    rest = source.L - l  # number of slots >= 0
    nneg = l - 1
    idx_neg = list(range(nneg))
    idx_pos = list(range(nneg, nneg + rest))
    i_batch = nneg + rest
    i_leg1, i_leg2 = i_batch + 1, i_batch + 2
    t = np.multiply.outer(t, source.Hd.unit)  # slot 2 unit, axis i_leg2 + 1
    i_eps = i_leg2 + 1
    perm = idx_neg + [i_leg1, i_eps, i_leg2] + idx_pos + [i_batch]
    out = np.transpose(t, perm).reshape(target.dim, m)
    return out[:, 0] if single else out


def cond_exp_interval(ambient: SlotAlgebra, target: SlotAlgebra, X=None) -> np.ndarray:
    """Trace out the ambient slots that are not in the target (slot sets, no relabelling)."""
    if not set(target.slots) <= set(ambient.slots):
        raise ValueError(f"{target.label} is not a slot subalgebra of {ambient.label}")
    if X is None:
        X = np.eye(ambient.dim, dtype=complex)
    X, single = _to_batch(X, ambient.dim)
    m = X.shape[1]
    t = X.reshape(ambient.shape + (m,))
    for p in reversed(range(ambient.L)):
        s = ambient.slots[p]
        if s not in target.slots:
            t = np.tensordot(t, ambient.factor(s).haar, axes=([p], [0]))
    out = t.reshape(target.dim, m)
    return out[:, 0] if single else out


def cond_exp_psi(H: KacAlgebra, l: int, s: int, Y=None) -> np.ndarray:
    """Conditional expectation of H_[-l,-1] (x) H_[2,6+s] onto psi_{l,s}(H_[-l,2+s]).

    E(... x^{-1} (x) f^2 x^3 f^4 ...) = phi(S(x^{-1}_2) x^3) f^2(h) (... x^{-1}_1 f^4 ...),
    with slots t >= 4 moved back to t - 4.  The result is in source coordinates.
    """
    if l < 1 or s < 0:
        raise ValueError("cond_exp_psi needs l >= 1 and s >= 0")
    source = interval_algebra(H, -l, 2 + s)
    target = tensor_algebra(H, (-l, -1), (2, 6 + s))
    if Y is None:
        Y = np.eye(target.dim, dtype=complex)
    Y, single = _to_batch(Y, target.dim)
    m = Y.shape[1]
    t = Y.reshape(target.shape + (m,))
    phi, h = H.haar, H.integral
    # Phi[q, c] = phi(S(e_q) e_c)
    Phi = np.einsum("rq,rck,k->qc", H.antipode, H.mul, phi)
    kern = np.einsum("apq,qc->acp", H.comul_dense, Phi)  # (x^{-1}, x^3) -> new slot -1
    i_m1, i_2, i_3 = l - 1, l, l + 1
    t = np.tensordot(t, h, axes=([i_2], [0]))  # slot 2 removed; slot 3 now at axis l
    t = np.tensordot(t, kern, axes=([i_m1, i_2 - 0], [0, 1]))  # new leg appended last
    # axes now: slots -l..-2, slots 4..6+s, batch, new slot -1
    nneg = l - 1
    rest = source.L - l
    perm = list(range(nneg)) + [nneg + rest + 1] + list(range(nneg, nneg + rest)) + [nneg + rest]
    out = np.transpose(t, perm).reshape(source.dim, m)
    return out[:, 0] if single else out


def generic_cond_exp(ambient: SlotAlgebra, basis: np.ndarray) -> np.ndarray:
    """Trace-orthogonal projection onto span(basis columns): the trace-preserving expectation."""
    W = ambient.gram
    V = np.asarray(basis, dtype=complex)
    G = V.conj().T @ W @ V
    return V @ np.linalg.solve(G, V.conj().T @ W)
