"""Command-line front end.

Exit codes: 0 all checks pass, 1 some check failed, 2 input error, 3 resource guard.
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import click
import numpy as np

from . import commutant as cm
from . import drinfeld as dr
from . import jones_tower as jt
from ._linalg import Check
from .algebra_zoo import BUILTIN_GROUPS, AlgebraFileError, builtin, load_algebra
from .crossed import interval_algebra
from .hopf_core import KacAlgebra, dual, verify_kac_axioms

EXIT_FAIL, EXIT_INPUT, EXIT_GUARD = 1, 2, 3
GUARDS = (jt.ResourceGuard, cm.ResourceGuard, dr.ResourceGuard)


class GuardExit(click.ClickException):
    exit_code = EXIT_GUARD


class InputExit(click.ClickException):
    exit_code = EXIT_INPUT


def _num(x):
    """Round floats to 15 significant digits so reports diff cleanly."""
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.15g}")
    if isinstance(x, complex):
        return [_num(x.real), _num(x.imag)]
    if isinstance(x, dict):
        return {str(k): _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    return x


def _check_json(c: Check) -> dict:
    return {"name": c.name, "status": c.status, "residual": _num(c.residual), "details": _num(c.details)}


def _emit(ctx: click.Context, checks: list[Check], tower: list | None = None, extra_config: dict | None = None) -> None:
    opts = ctx.obj
    config = {k: v for k, v in sorted(opts.items()) if k not in ("algebra",)}
    config["command"] = ctx.info_name
    config.update(extra_config or {})
    report = {"config": _num(config), "checks": [_check_json(c) for c in checks], "tower": _num(tower or [])}
    text = json.dumps(report, indent=2, sort_keys=False) + "\n"
    if opts.get("out"):
        Path(opts["out"]).write_text(text)
    else:
        click.echo(text, nl=False)
    failed = [c.name for c in checks if not c.passed]
    if failed:
        click.echo(f"{len(failed)} check(s) failed: {', '.join(failed[:10])}", err=True)
        ctx.exit(EXIT_FAIL)
    ctx.exit(0)


def _algebra(ctx: click.Context) -> KacAlgebra:
    opts = ctx.obj
    group, path = opts.get("group"), opts.get("file")
    if group and path:
        raise InputExit("give either --group or --file, not both")
    if path:
        try:
            A, _ = load_algebra(path)
        except FileNotFoundError:
            raise InputExit(f"no such file: {path}") from None
        except (AlgebraFileError, ValueError) as exc:
            raise InputExit(str(exc)) from None
        return A
    return builtin(group or "Z2")


def _guarded(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except GUARDS as exc:
        raise GuardExit(str(exc)) from None


_OPTIONS = [
    click.option("--group", type=click.Choice(sorted(BUILTIN_GROUPS)), help="Builtin group G; the algebra is C[G]."),
    click.option("--file", "file", type=click.Path(dir_okay=False), help="Algebra JSON file (structure constants)."),
    click.option("--mmax", default=2, show_default=True, type=click.IntRange(1, 6)),
    click.option("--kmax", default=2, show_default=True, type=click.IntRange(0, 6)),
    click.option("--nmax", default=3, show_default=True, type=click.IntRange(0, 8)),
    click.option("--tol", default=1e-9, show_default=True, type=float),
    click.option("--seed", default=0, show_default=True, type=int),
    click.option("--threads", default=1, show_default=True, type=click.IntRange(1, None), help="Recorded only; results do not depend on it."),
    click.option("--force", is_flag=True, help="Override the resource guards."),
    click.option("--out", type=click.Path(dir_okay=False), help="Write the JSON report here instead of stdout."),
    click.option("--dot", type=click.Path(dir_okay=False), help="Write a Bratteli diagram (tower command)."),
]


def _command(fn):
    """Register a subcommand carrying the shared options (stored on ctx.obj)."""

    @click.pass_context
    def wrapper(ctx, **opts):
        ctx.obj = opts
        return fn(ctx)

    wrapper.__doc__ = fn.__doc__
    wrapper.__name__ = fn.__name__
    for opt in reversed(_OPTIONS):
        wrapper = opt(wrapper)
    return main.command(name=fn.__name__)(wrapper)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main():
    """Kac algebra crossed-product towers, relative commutants and Drinfeld doubles."""


@_command
def axioms(ctx):
    """Verify the Kac algebra axioms."""
    A = _algebra(ctx)
    checks = verify_kac_axioms(A, ctx.obj["tol"])
    _emit(ctx, checks, extra_config={"algebra_name": A.name, "dim": A.dim})


def _bratteli(g: jt.Grid, seed: int) -> str:
    lines = ["digraph bratteli {", "  rankdir=TB;", "  node [shape=circle];"]
    decs = {}
    keys = [(k, n) for k in range(g.k_max + 1) for n in range(g.n_max + 1)]
    for k, n in keys:
        decs[k, n] = cm.block_decomposition(g.cell(k, n), seed=seed)
        names = [f"k{k}n{n}b{i}" for i in range(len(decs[k, n].sizes))]
        lines.append(f'  subgraph "cluster_{k}_{n}" {{ label="A[{k},{n}]";')
        for name, size in zip(names, decs[k, n].sizes):
            lines.append(f'    {name} [label="{size}"];')
        lines.append("  }")
    for k, n in keys:
        if (k, n + 1) not in decs:
            continue
        lam = cm.inclusion_matrix(decs[k, n], decs[k, n + 1], g.cell(k, n + 1), g.right_map(k, n))
        for i, j in zip(*np.nonzero(lam)):
            for _ in range(int(lam[i, j])):
                lines.append(f"  k{k}n{n}b{i} -> k{k}n{n + 1}b{j} [arrowhead=none];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _corner_square(g: jt.Grid, tol: float) -> list[Check]:
    S = g.cell(1, 1)
    P = S.one().reshape(-1, 1)
    Q = g.right_map(1, 0) @ np.eye(g.cell(1, 0).dim)
    R = g.up_map(0, 1)
    out = jt.commuting_square_check(S, P, Q, R, tol)
    for c in out:
        c.name = f"square[A00,A10,A01,A11]:{c.name}"
    return out


@_command
def tower(ctx):
    """Build the grid A_{k,n} and run the basic-construction, Markov, square and Temperley-Lieb checks."""
    opts = ctx.obj
    H = _algebra(ctx)
    tol = opts["tol"]
    g = _guarded(jt.build_grid, H, opts["kmax"], opts["nmax"], force=opts["force"])
    tl_top = 4 if opts["nmax"] < 4 and jt.cell_dim(H, 0, 4) <= 4096 else None
    checks = jt.grid_checks(g, tol, tl_top=tl_top)
    if opts["kmax"] >= 1 and opts["nmax"] >= 1:
        checks.extend(_corner_square(g, tol))
    cells = [
        {"k": k, "n": n, "slots": list(g.cell(k, n).slots), "dim": g.cell(k, n).dim}
        for k in range(g.k_max + 1)
        for n in range(g.n_max + 1)
    ]
    if opts.get("dot"):
        Path(opts["dot"]).write_text(_bratteli(g, opts["seed"]))
    _emit(ctx, checks, cells, {"algebra_name": H.name, "dim": H.dim})


@_command
def double(ctx):
    """Compare relative commutants q(m) with the Drinfeld double predictions."""
    opts = ctx.obj
    H = _algebra(ctx)
    D = dr.drinfeld_double(H)
    checks = [Check(f"double:{c.name}", c.residual, opts["tol"], c.details, c.passed) for c in verify_kac_axioms(D, opts["tol"])]
    report = _guarded(dr.compare, H, opts["mmax"], force=opts["force"])
    rows = []
    for lv in report.levels:
        checks.append(Check(f"dim q({lv.level}) = {lv.predicted_dim}", float(abs(lv.dim - lv.predicted_dim)), 0.5, {"dim": lv.dim}))
        if lv.blocks is not None:
            checks.append(
                Check(
                    f"blocks q({lv.level})",
                    0.0 if lv.blocks_match != "none" else 1.0,
                    0.5,
                    {"matches": lv.blocks_match},
                )
            )
        if lv.e_trace is not None:
            checks.append(Check(f"trace e_{lv.level} = 1/n^2", abs(lv.e_trace - 1.0 / H.dim**2), opts["tol"]))
        rows.append(
            {
                "level": lv.level,
                "dim": lv.dim,
                "predicted_dim": lv.predicted_dim,
                "blocks": lv.blocks,
                "double_blocks": lv.double_blocks,
                "dual_double_blocks": lv.dual_double_blocks,
                "blocks_match": lv.blocks_match,
                "e_trace": lv.e_trace,
                "passed": lv.passed,
            }
        )
    _emit(ctx, checks, rows, {"algebra_name": H.name, "dim": H.dim})


@_command
def commutant(ctx):
    """Relative commutants q(m): dimension, closure, averaging fixed points, second commutant."""
    opts = ctx.obj
    H = _algebra(ctx)
    tol = opts["tol"]
    for m in range(1, opts["mmax"] + 1):
        if not opts["force"] and not dr.level_allowed(H.dim, m):
            raise GuardExit(f"level {m} exceeds the size bound for dim H = {H.dim}")
    checks: list[Check] = []
    rows = []
    prev = None
    for m in range(1, opts["mmax"] + 1):
        Q = _guarded(cm.q, m, H, force=opts["force"])
        checks.extend(Q.closure_checks(1e-8))
        checks.append(Check(f"q({m}): displayed description", Q.same_space(_guarded(cm.q_direct, m, H, force=opts["force"])), 1e-8))
        F = cm.fixed_space(_guarded(cm.averaging_operator, m, H, force=opts["force"]))
        checks.append(Check(f"q({m}): averaging fixed space", Q.same_space(F), 1e-8, {"dim_fixed": F.dim}))
        checks.append(Check(f"dim q({m}) = n^(2(m-1))", float(abs(Q.dim - H.dim ** (2 * (m - 1)))), 0.5, {"dim": Q.dim}))
        second = cm.second_commutant_subspace(m, H, Q)
        if prev is not None:
            checks.append(Check(f"q({m - 1}) inside q({m})", Q.residual(cm.natural_inclusion(m - 1, H) @ prev.basis), 1e-8))
        if m >= 2 and H.dim ** (2 * m) <= 4096:
            e = cm.e_level(m, H)
            A = Q.ambient
            checks.append(Check(f"e_{m} in q({m})", Q.residual(e), 1e-8))
            checks.append(Check(f"e_{m} projection", max(float(np.abs(A.mul(e, e) - e).max()), float(np.abs(A.star(e) - e).max())), tol))
            checks.append(Check(f"trace e_{m} = 1/n^2", abs(A.trace(e) - 1.0 / H.dim**2), tol))
        rows.append({"level": m, "dim": Q.dim, "second_commutant_dim": second.dim, "fixed_space_dim": F.dim})
        prev = Q
    _emit(ctx, checks, rows, {"algebra_name": H.name, "dim": H.dim})


@_command
def blocks(ctx):
    """Block multisets of H, H*, D(H), D(H)*, H x| H* and q(2)."""
    opts = ctx.obj
    H = _algebra(ctx)
    seed = opts["seed"]
    D = dr.drinfeld_double(H)
    entries = {
        H.name: H,
        dual(H).name: dual(H),
        D.name: D,
        f"dual({D.name})": dual(D),
        "H x| H*": interval_algebra(H, 0, 1),
    }
    rows, checks = [], []
    for name, A in entries.items():
        dec = cm.block_decomposition(A, seed=seed)
        rows.append({"algebra": name, "blocks": dec.multiset})
        checks.append(Check(f"{name}: sum of squares = dim", float(abs(dec.dim - A.dim)), 0.5))
    checks.append(Check("H x| H* is a single matrix block", float(rows[-1]["blocks"] != [H.dim]), 0.5))
    if opts["mmax"] >= 2:
        if not opts["force"] and not dr.level_allowed(H.dim, 2):
            raise GuardExit(f"level 2 exceeds the size bound for dim H = {H.dim}")
        Q = cm.q(2, H, force=opts["force"])
        dec = cm.block_decomposition(Q, seed=seed)
        rows.append({"algebra": "q(2)", "blocks": dec.multiset})
        checks.append(Check("q(2): sum of squares = dim", float(abs(dec.dim - Q.dim)), 0.5))
    _emit(ctx, checks, rows, {"algebra_name": H.name, "dim": H.dim})


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
