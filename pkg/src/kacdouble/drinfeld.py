"""Drinfeld double D(H) on H* (x) H, op/cop variants, and the tower comparison harness."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .commutant import block_decomposition, e_level, q
from .hopf_core import KacAlgebra, dual, iterated_coproduct, verify_kac_axioms

TOL = 1e-9


class ResourceGuard(RuntimeError):
    pass


def drinfeld_double(H: KacAlgebra) -> KacAlgebra:
    """D(H) with basis e^i (x) e_j at index i * n + j.

    (f (x) x)(g (x) y) = <g_1, S x_3> <g_3, x_1> f g_2 (x) x_2 y,
    Delta(f (x) x) = (f_2 (x) x_1) (x) (f_1 (x) x_2).
    """
    n = H.dim
    Hd = dual(H)
    idx = np.eye(n, dtype=complex)
    x3 = np.stack([iterated_coproduct(H, idx[j], 2) for j in range(n)])  # [j, a, b, c]
    g3 = np.stack([iterated_coproduct(Hd, idx[k], 2) for k in range(n)])  # [k, p, q, r]
    mul = np.einsum(
        "kpqa,jabc,pc,iqs,blt->ijklst", g3, x3, H.antipode, Hd.mul, H.mul, optimize=True
    ).reshape(n * n, n * n, n * n)
    comul = np.einsum("iuv,jab->ijvaub", Hd.comul_dense, H.comul_dense).reshape(n * n, n * n, n * n)
    unit = np.kron(Hd.unit, H.unit)
    counit = np.kron(Hd.counit, H.counit)

    def prod(a, b):
        return np.einsum("i,j,ijk->k", a, b, mul)

    N = n * n
    antipode = np.zeros((N, N), dtype=complex)
    star = np.zeros((N, N), dtype=complex)
    for i in range(n):
        for j in range(n):
            col = i * n + j
            antipode[:, col] = prod(np.kron(Hd.unit, H.antipode[:, j]), np.kron(Hd.antipode[:, i], H.unit))
            star[:, col] = prod(np.kron(Hd.unit, H.star[:, j]), np.kron(Hd.star[:, i], H.unit))
    labels = tuple(f"{a}#{b}" for a in Hd.basis_labels for b in H.basis_labels)
    return KacAlgebra.from_dense(f"D({H.name})", mul, unit, comul, counit, antipode, star, labels)


def op(A: KacAlgebra) -> KacAlgebra:
    return KacAlgebra(f"{A.name}^op", A.mul.transpose(1, 0, 2).copy(), A.unit, A.comul, A.counit, A.antipode, A.star, A.basis_labels)


def cop(A: KacAlgebra) -> KacAlgebra:
    comul = tuple(tuple((k, j, c) for j, k, c in terms) for terms in A.comul)
    return KacAlgebra(f"{A.name}^cop", A.mul, A.unit, comul, A.counit, A.antipode, A.star, A.basis_labels)


def injection_checks(H: KacAlgebra, D: KacAlgebra, tol: float = TOL) -> dict[str, float]:
    """Residuals showing x -> eps (x) x and f -> f (x) 1 are *-bialgebra maps (H* enters as H*^cop)."""
    n = H.dim
    Hd = dual(H)
    inj_h = np.kron(Hd.unit[:, None], np.eye(n))  # (n^2, n)
    inj_d = np.kron(np.eye(n), H.unit[:, None])
    out = {}
    for label, A, V in (("H", H, inj_h), ("H*", cop(Hd), inj_d)):
        lhs = np.einsum("ap,bq,abk->pqk", V, V, D.mul)
        rhs = np.einsum("pqr,kr->pqk", A.mul, V)
        com = np.einsum("ka,kpq->apq", V, D.comul_dense)
        com_rhs = np.einsum("apq,ip,jq->aij", A.comul_dense, V, V)
        st = D.star @ np.conj(V) - V @ A.star
        out[label] = float(max(np.abs(lhs - rhs).max(), np.abs(com - com_rhs).max(), np.abs(st).max()))
    return out


# tower comparison ---------------------------------------------------------------


@dataclass
class LevelReport:
    level: int
    dim: int
    predicted_dim: int
    blocks: list[int] | None = None
    double_blocks: list[int] | None = None
    dual_double_blocks: list[int] | None = None
    blocks_match: str | None = None  # "double", "dual", "both" or "none"
    e_trace: float | None = None
    runtime: float = 0.0

    @property
    def passed(self) -> bool:
        ok = self.dim == self.predicted_dim
        if self.blocks is not None:
            ok = ok and self.blocks_match != "none"
        return ok


@dataclass
class TowerReport:
    algebra: str
    levels: list[LevelReport] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(lv.passed for lv in self.levels) and not self.skipped

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(lv.dim for lv in self.levels)


def predicted_tower(K: KacAlgebra, m_max: int) -> list[dict]:
    """Expected level data for R in R x| K: dims (dim K)^(m-1); level 2 blocks of K and K*."""
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    out = []
    for m in range(1, m_max + 1):
        row = {"level": m, "dim": K.dim ** (m - 1)}
        if m == 2:
            row["blocks"] = block_decomposition(K).multiset
            row["dual_blocks"] = block_decomposition(dual(K)).multiset
        out.append(row)
    return out


def level_allowed(n: int, m: int) -> bool:
    if m <= 1:
        return True
    if m == 2:
        return n <= 8
    if m == 3:
        return n <= 4
    return False


def compare(H: KacAlgebra, m_max: int, force: bool = False) -> TowerReport:
    """Relative commutants q(m) against the predictions for R in R x| D(H)^cop."""
    n = H.dim
    if not force:
        bad = [m for m in range(1, m_max + 1) if not level_allowed(n, m)]
        if bad:
            raise ResourceGuard(f"level {bad[0]} exceeds the size bound for dim H = {n}")
    D = cop(drinfeld_double(H))
    pred = predicted_tower(D, m_max)
    report = TowerReport(H.name)
    for row in pred:
        m = row["level"]
        t0 = time.perf_counter()
        Q = q(m, H, force=force)
        lv = LevelReport(m, Q.dim, row["dim"])
        if m == 2:
            lv.blocks = block_decomposition(Q).multiset
            lv.double_blocks = row["blocks"]
            lv.dual_double_blocks = row["dual_blocks"]
            hits = [lv.blocks == lv.double_blocks, lv.blocks == lv.dual_double_blocks]
            lv.blocks_match = {(True, True): "both", (True, False): "double", (False, True): "dual"}.get(tuple(hits), "none")
        if m >= 2 and n ** (2 * m) <= 1024:
            e = e_level(m, H)
            lv.e_trace = float(Q.ambient.trace(e).real)
        lv.runtime = time.perf_counter() - t0
        report.levels.append(lv)
    return report
