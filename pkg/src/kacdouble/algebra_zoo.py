"""Concrete Kac algebras: group algebras, function algebras, and JSON-loaded algebras.

Group convention: ``cayley[a][b]`` is the index of the product a*b, where a*b
means "apply a first, then b" for permutation groups.  Cyclic groups are
written additively, so the order of factors does not matter there.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .hopf_core import KacAlgebra, verify_kac_axioms


class AlgebraFileError(ValueError):
    pass


@dataclass(frozen=True)
class GroupTable:
    cayley: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        n = len(self.cayley)
        table = np.asarray(self.cayley)
        if table.shape != (n, n) or n == 0:
            raise ValueError("Cayley table must be a non-empty square")
        full = set(range(n))
        for row in table:
            if set(row.tolist()) != full:
                raise ValueError("Cayley table is not a Latin square")
        for col in table.T:
            if set(col.tolist()) != full:
                raise ValueError("Cayley table is not a Latin square")
        a, b, c = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
        if not np.array_equal(table[table[a, b], c], table[a, table[b, c]]):
            raise ValueError("Cayley table is not associative")
        ids = [e for e in range(n) if np.array_equal(table[e], np.arange(n)) and np.array_equal(table[:, e], np.arange(n))]
        if len(ids) != 1:
            raise ValueError("Cayley table has no two-sided identity")
        if len(self.labels) != n:
            raise ValueError("need one label per group element")

    @property
    def order(self) -> int:
        return len(self.cayley)

    @property
    def identity(self) -> int:
        table = np.asarray(self.cayley)
        return int(next(e for e in range(self.order) if np.array_equal(table[e], np.arange(self.order))))

    @property
    def inverse(self) -> tuple[int, ...]:
        table = np.asarray(self.cayley)
        e = self.identity
        return tuple(int(np.nonzero(table[a] == e)[0][0]) for a in range(self.order))

    def is_abelian(self) -> bool:
        table = np.asarray(self.cayley)
        return bool(np.array_equal(table, table.T))


def cyclic(n: int) -> GroupTable:
    return GroupTable(
        tuple(tuple((a + b) % n for b in range(n)) for a in range(n)),
        tuple("e" if a == 0 else f"g^{a}" if a > 1 else "g" for a in range(n)),
    )


def direct_product(g: GroupTable, h: GroupTable) -> GroupTable:
    pairs = list(itertools.product(range(g.order), range(h.order)))
    index = {p: i for i, p in enumerate(pairs)}
    cayley = tuple(
        tuple(index[(g.cayley[a][c], h.cayley[b][d])] for c, d in pairs) for a, b in pairs
    )
    labels = tuple(f"({g.labels[a]},{h.labels[b]})" for a, b in pairs)
    return GroupTable(cayley, labels)


def symmetric(k: int) -> GroupTable:
    """Permutations of range(k); the product a*b applies a first, then b."""
    perms = sorted(itertools.permutations(range(k)))
    index = {p: i for i, p in enumerate(perms)}
    cayley = tuple(tuple(index[tuple(b[a[i]] for i in range(k))] for b in perms) for a in perms)
    return GroupTable(cayley, tuple(_cycle_label(p) for p in perms))


def _cycle_label(p: tuple[int, ...]) -> str:
    seen, cycles = set(), []
    for start in range(len(p)):
        if start in seen or p[start] == start:
            continue
        cyc, i = [], start
        while i not in seen:
            seen.add(i)
            cyc.append(str(i + 1))
            i = p[i]
        cycles.append("(" + "".join(cyc) + ")")
    return "".join(cycles) or "e"


BUILTIN_GROUPS = {
    "Z2": lambda: cyclic(2),
    "Z3": lambda: cyclic(3),
    "Z4": lambda: cyclic(4),
    "Z2xZ2": lambda: direct_product(cyclic(2), cyclic(2)),
    "S3": lambda: symmetric(3),
}


def group_algebra(t: GroupTable, name: str | None = None) -> KacAlgebra:
    """C[G]: Delta(g) = g (x) g, S(g) = g^-1, g* = g^-1."""
    n = t.order
    mul = np.zeros((n, n, n))
    comul = np.zeros((n, n, n))
    perm = np.zeros((n, n))
    for a in range(n):
        comul[a, a, a] = 1.0
        perm[t.inverse[a], a] = 1.0
        for b in range(n):
            mul[a, b, t.cayley[a][b]] = 1.0
    unit = np.zeros(n)
    unit[t.identity] = 1.0
    return KacAlgebra.from_dense(
        name or f"C[G{n}]", mul, unit, comul, np.ones(n), perm, perm, t.labels
    )


def function_algebra(t: GroupTable, name: str | None = None) -> KacAlgebra:
    """C(G) on indicators: pointwise product, Delta(d_s) = sum_{uv=s} d_u (x) d_v."""
    n = t.order
    mul = np.zeros((n, n, n))
    comul = np.zeros((n, n, n))
    perm = np.zeros((n, n))
    for a in range(n):
        mul[a, a, a] = 1.0
        perm[t.inverse[a], a] = 1.0
        for b in range(n):
            comul[t.cayley[a][b], a, b] = 1.0
    counit = np.zeros(n)
    counit[t.identity] = 1.0
    return KacAlgebra.from_dense(
        name or f"C(G{n})",
        mul,
        np.ones(n),
        comul,
        counit,
        perm,
        np.eye(n),
        tuple(f"d[{lab}]" for lab in t.labels),
    )


def builtin(name: str) -> KacAlgebra:
    """Group algebra of a builtin group, e.g. ``builtin("S3")`` is C[S3]."""
    try:
        table = BUILTIN_GROUPS[name]()
    except KeyError:
        raise ValueError(f"unknown group {name!r}; choose from {sorted(BUILTIN_GROUPS)}") from None
    return group_algebra(table, f"C[{name}]")


def _cplx(v, where: str) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    raise AlgebraFileError(f"{where}: expected a number or [re, im], got {v!r}")


def _cplx_array(v, shape: tuple[int, ...], where: str) -> np.ndarray:
    arr = np.zeros(shape, dtype=complex)
    if len(shape) == 0:
        return np.asarray(_cplx(v, where))
    if not isinstance(v, list) or len(v) != shape[0]:
        raise AlgebraFileError(f"{where}: expected a list of length {shape[0]}")
    for i, item in enumerate(v):
        arr[i] = _cplx_array(item, shape[1:], f"{where}[{i}]")
    return arr


def algebra_from_dict(data: dict) -> KacAlgebra:
    try:
        n = int(data["dim"])
        name = str(data.get("name", "file"))
        basis = [str(b) for b in data.get("basis", [f"e{i}" for i in range(n)])]
        mul = _cplx_array(data["mul"], (n, n, n), "mul")
        comul_raw = data["comul"]
        counit = _cplx_array(data["counit"], (n,), "counit")
        S = _cplx_array(data["antipode"], (n, n), "antipode")
        star = _cplx_array(data["star"], (n, n), "star")
        unit = _cplx_array(data["unit"], (n,), "unit") if "unit" in data else None
    except KeyError as exc:
        raise AlgebraFileError(f"missing field {exc.args[0]!r}") from None
    if len(basis) != n or n <= 0:
        raise AlgebraFileError("basis must list dim labels")
    if not isinstance(comul_raw, list) or len(comul_raw) != n:
        raise AlgebraFileError("comul: expected one list of [i, j, c] triples per basis index")
    comul = []
    for i, terms in enumerate(comul_raw):
        row = []
        for t, term in enumerate(terms):
            if not isinstance(term, list) or len(term) != 3:
                raise AlgebraFileError(f"comul[{i}][{t}]: expected [i, j, [re, im]]")
            a, b = int(term[0]), int(term[1])
            if not (0 <= a < n and 0 <= b < n):
                raise AlgebraFileError(f"comul[{i}][{t}]: index out of range")
            row.append((a, b, _cplx(term[2], f"comul[{i}][{t}]")))
        comul.append(tuple(row))
    if unit is None:
        # the unit is the element acting as identity under left multiplication
        lhs = mul.transpose(1, 2, 0).reshape(n * n, n)
        unit, *_ = np.linalg.lstsq(lhs, np.eye(n).reshape(-1), rcond=None)
    return KacAlgebra(name, mul, unit, tuple(comul), counit, S, star, tuple(basis))


def load_algebra(path) -> tuple[KacAlgebra, list]:
    """Load a structure-constant JSON file; returns (algebra, axiom report)."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AlgebraFileError(f"{path}: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise AlgebraFileError(f"{path}: top level must be an object")
    A = algebra_from_dict(data)
    return A, verify_kac_axioms(A)


def _c(z: complex):
    return [float(z.real), float(z.imag)]


def algebra_to_dict(A: KacAlgebra) -> dict:
    n = A.dim
    return {
        "name": A.name,
        "dim": n,
        "basis": list(A.basis_labels),
        "mul": [[[_c(A.mul[i, j, k]) for k in range(n)] for j in range(n)] for i in range(n)],
        "comul": [[[j, k, _c(c)] for j, k, c in terms] for terms in A.comul],
        "counit": [_c(z) for z in A.counit],
        "unit": [_c(z) for z in A.unit],
        "antipode": [[_c(z) for z in row] for row in A.antipode],
        "star": [[_c(z) for z in row] for row in A.star],
    }
