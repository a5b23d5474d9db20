"""End-to-end acceptance criteria; each test prints one PASS/FAIL line."""

import subprocess
import sys
import time

import numpy as np
import pytest

from kacdouble import commutant as cm
from kacdouble import drinfeld as dr
from kacdouble import jones_tower as jt
from kacdouble.algebra_zoo import builtin
from kacdouble.crossed import embedding_matrix, interval_algebra, tensor_algebra
from kacdouble.hopf_core import comultiply, dual, fourier, fourier_matrix, multiply, pair, verify_kac_axioms

from group_oracle import double_blocks_oracle

GROUPS = ["Z2", "Z3", "Z4", "Z2xZ2", "S3"]


@pytest.fixture
def verdict(capsys):
    def emit(number, title, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}" + (f" ({detail})" if detail else ""))
        assert ok, detail

    return emit


def _failed(checks):
    return sorted(c.name for c in checks if not c.passed)


def test_c01_axiom_suite(verdict):
    t0 = time.perf_counter()
    bad, worst = [], 0.0
    for name in GROUPS:
        H = builtin(name)
        for A in (H, dual(H), dr.drinfeld_double(H)):
            checks = verify_kac_axioms(A, 1e-9)
            worst = max(worst, max(c.residual for c in checks))
            bad += [f"{A.name}:{c}" for c in _failed(checks)]
    elapsed = time.perf_counter() - t0
    verdict(1, "Kac axioms for builtins, duals, doubles", not bad and elapsed < 10, f"max residual {worst:.1e}, {elapsed:.1f}s {bad[:3]}")


def test_c02_integral_normalization(verdict):
    errs = {}
    for name in GROUPS:
        H = builtin(name)
        errs[name] = abs(pair(H.haar, H.integral) - 1 / H.dim)
    verdict(2, "phi(h) = 1/n", max(errs.values()) < 1e-12, f"max error {max(errs.values()):.1e}")


def test_c03_fourier(verdict):
    worst_s, worst_d = 0.0, 0.0
    for name in GROUPS:
        H = builtin(name)
        Hd = dual(H)
        F = fourier_matrix(H)
        worst_s = max(worst_s, np.abs(fourier_matrix(Hd) @ F - H.antipode).max())
        for i in range(H.dim):
            x = H.basis(i)
            d = comultiply(H, x)
            lhs = sum(d[j, k] * multiply(Hd, F[:, j], F[:, k]) for j in range(H.dim) for k in range(H.dim))
            worst_d = max(worst_d, np.abs(lhs - H.delta * fourier(H, x)).max())
    verdict(3, "F_H* F_H = S and F(x1)F(x2) = delta F(x)", worst_s < 1e-9 and worst_d < 1e-9, f"{worst_s:.1e}, {worst_d:.1e}")


def test_c04_matrix_algebra(verdict):
    t0 = time.perf_counter()
    found = {}
    for name in ["Z2", "Z3", "Z4"]:
        H = builtin(name)
        found[name] = cm.block_decomposition(interval_algebra(H, 0, 1)).multiset
    elapsed = time.perf_counter() - t0
    ok = found == {"Z2": [2], "Z3": [3], "Z4": [4]} and elapsed < 30
    verdict(4, "H x| H* is a single n x n block", ok, f"{found}, {elapsed:.1f}s")


def test_c05_basic_constructions(verdict):
    t0 = time.perf_counter()
    Z2, Z3 = builtin("Z2"), builtin("Z3")
    k, p, q, l = -1, 0, 1, 2
    cases = [
        (jt.basic_1i(Z2, k, p, q, l), 2 ** (p + l - k - q)),
        (jt.basic_1ii(Z2, 1), 2 ** 2),
        (jt.basic_1iii(Z2, 1), 2 ** 2),
        (jt.basic_2(Z2, 1, 0), 4),
        (jt.basic_3(Z2, 1, 0), 4),
        (jt.basic_2(Z3, 1, 0), 9),
    ]
    bad = []
    for t, modulus in cases:
        bad += [f"{t.name}:{c}" for c in _failed(jt.basic_construction_check(t))]
        if abs(t.modulus - modulus) > 1e-9:
            bad.append(f"{t.name}: modulus {t.modulus} != {modulus}")
    elapsed = time.perf_counter() - t0
    verdict(5, "basic constructions and Markov moduli", not bad and elapsed < 120, f"{len(cases)} triples, {elapsed:.1f}s {bad[:3]}")


def test_c06_commuting_squares(verdict):
    Z2 = builtin("Z2")
    S = interval_algebra(Z2, -1, 2)
    Q = embedding_matrix(tensor_algebra(Z2, (-1, -1), (2, 2)), S)
    R = embedding_matrix(interval_algebra(Z2, 0, 1), S)
    bad = _failed(jt.commuting_square_check(S, S.one().reshape(-1, 1), Q, R))
    S2, P2, Q2, R2, _ = jt.comm_sq_instance(Z2, 1, 2, 5, 6)
    bad += _failed(jt.commuting_square_check(S2, P2, Q2, R2))
    verdict(6, "symmetric commuting squares", not bad, str(bad) if bad else "two squares")


@pytest.mark.slow
def test_c07_grid(verdict):
    g = jt.build_grid(builtin("Z2"), 2, 3)
    checks = jt.grid_checks(g, 1e-9, tl_top=4)
    kinds = {c.name.split("[")[0] for c in checks}
    bad = _failed(checks)
    ok = not bad and {"square_commutes", "basic", "up_carries_e", "TL"} <= kinds
    verdict(7, "grid squares, moduli, e-carrying, Temperley-Lieb", ok, f"{len(checks)} checks {bad[:3]}")


def test_c08_relative_commutants(verdict):
    t0 = time.perf_counter()
    dims, bad = {}, []
    for name in ["Z2", "Z3"]:
        H = builtin(name)
        for m in (1, 2, 3):
            Q = cm.q(m, H)
            dims[name, m] = Q.dim
            if Q.dim != H.dim ** (2 * (m - 1)):
                bad.append(f"{name} q({m}) dim {Q.dim}")
            gap = Q.same_space(cm.fixed_space(cm.averaging_operator(m, H)))
            if gap >= 1e-8:
                bad.append(f"{name} q({m}) vs fixed space {gap:.1e}")
    elapsed = time.perf_counter() - t0
    verdict(8, "dim q(m) and averaging fixed space", not bad and elapsed < 300, f"{dims}, {elapsed:.1f}s {bad}")


def test_c09_jones_projection_in_q(verdict):
    H = builtin("Z2")
    traces, bad = {}, []
    for m in (2, 3):
        e = cm.e_level(m, H)
        Q = cm.q(m, H)
        A = Q.ambient
        traces[m] = float(A.trace(e).real)
        if np.abs(A.mul(e, e) - e).max() > 1e-9 or np.abs(A.star(e) - e).max() > 1e-9:
            bad.append(f"e_{m} not a projection")
        if Q.residual(e) > 1e-8:
            bad.append(f"e_{m} not in q({m})")
        if abs(traces[m] - 1 / H.dim**2) > 1e-9:
            bad.append(f"trace e_{m} = {traces[m]}")
    verdict(9, "e_level is a projection of trace delta^-4", not bad, f"traces {traces} {bad}")


def test_c10_double_comparison(verdict):
    t0 = time.perf_counter()
    bad = []
    for name in ["Z2", "Z3", "Z4", "Z2xZ2"]:
        H = builtin(name)
        blocks = cm.block_decomposition(cm.q(2, H)).multiset
        if not blocks == [1] * H.dim**2 == double_blocks_oracle(name):
            bad.append(f"{name}: {blocks}")
    lv = dr.compare(builtin("S3"), 2).levels[1]
    oracle = double_blocks_oracle("S3")
    if lv.dim != 36 or lv.double_blocks != oracle or lv.blocks_match == "none":
        bad.append(f"S3: dim {lv.dim}, match {lv.blocks_match}")
    elapsed = time.perf_counter() - t0
    detail = (
        f"S3 q(2) blocks {lv.blocks} vs D(S3) oracle {oracle}: matches {lv.blocks_match}"
        f" (dual double {lv.dual_double_blocks}), {elapsed:.1f}s {bad}"
    )
    verdict(10, "q(2) against the Drinfeld double", not bad and elapsed < 600, detail)


def test_c11_determinism(verdict, tmp_path):
    outs = []
    for i in range(2):
        for args in (["double", "--group", "Z3", "--mmax", "2"], ["blocks", "--group", "S3"]):
            res = subprocess.run(
                [sys.executable, "-m", "kacdouble.cli", *args, "--seed", "3"], capture_output=True, check=False
            )
            outs.append((res.returncode, res.stdout))
    ok = outs[:2] == outs[2:] and all(code == 0 for code, _ in outs)
    verdict(11, "byte-identical reports across runs", ok, f"{sum(len(o) for _, o in outs[:2])} bytes compared")
