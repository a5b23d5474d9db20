"""Drinfeld double block multisets from character theory, independent of the algebra code.

Irreps of D(C[G]) are labelled by a conjugacy class C and an irrep of the centralizer of a
representative; the block size is |C| times that irrep's dimension.
"""

import itertools

from kacdouble.algebra_zoo import BUILTIN_GROUPS


def _subgroup_irrep_dims(table, inv, elems):
    elems = list(elems)
    order = len(elems)
    classes = {frozenset(table[table[inv[g]][x]][g] for g in elems) for x in elems}
    commutators = {table[table[inv[a]][inv[b]]][table[a][b]] for a in elems for b in elems}
    derived = set(commutators)
    while True:
        grown = derived | {table[a][b] for a in derived for b in derived}
        if grown == derived:
            break
        derived = grown
    linear = order // len(derived)
    k = len(classes)
    rest = order - linear
    sols = []
    for combo in itertools.combinations_with_replacement(range(2, 7), k - linear):
        if sum(d * d for d in combo) == rest and all(order % d == 0 for d in combo):
            sols.append(combo)
    assert len(sols) == 1, "oracle ambiguous"
    return [1] * linear + list(sols[0])


def double_blocks_oracle(name):
    t = BUILTIN_GROUPS[name]()
    table = t.cayley
    inv = t.inverse
    n = t.order
    seen, blocks = set(), []
    for x in range(n):
        if x in seen:
            continue
        cls = {table[table[inv[g]][x]][g] for g in range(n)}
        seen |= cls
        centralizer = [g for g in range(n) if table[g][x] == table[x][g]]
        blocks += [len(cls) * d for d in _subgroup_irrep_dims(table, inv, centralizer)]
    return sorted(blocks)
