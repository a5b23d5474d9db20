"""Small numerical helpers shared by the algebra modules."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

RANK_RTOL = 1e-8
RANK_ATOL = 1e-10  # entries are O(1); anything below this is roundoff


@dataclass
class Check:
    """One named verification with its worst residual."""

    name: str
    residual: float
    tol: float
    details: dict[str, Any] = field(default_factory=dict)
    passed: bool | None = None

    def __post_init__(self) -> None:
        if self.passed is None:
            self.passed = bool(np.isfinite(self.residual) and self.residual < self.tol)

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"


def maxabs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def _cut(s: np.ndarray, rtol: float) -> int:
    return int(np.sum(s > max(rtol * s[0], RANK_ATOL)))


def nullspace(mat: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis (columns) of the right nullspace, cutoff relative to the top singular value."""
    mat = np.asarray(mat)
    ncols = mat.shape[1]
    if mat.shape[0] == 0 or ncols == 0:
        return np.eye(ncols, dtype=complex)
    _, s, vh = np.linalg.svd(mat, full_matrices=mat.shape[0] < ncols)
    if s.size == 0 or s[0] == 0.0:
        return np.eye(ncols, dtype=complex)
    return vh[_cut(s, rtol):].conj().T


def orth(mat: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis (columns) of the column span."""
    mat = np.asarray(mat)
    if mat.size == 0:
        return np.zeros((mat.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((mat.shape[0], 0), dtype=complex)
    return u[:, :_cut(s, rtol)]


def rank(mat: np.ndarray, rtol: float = RANK_RTOL) -> int:
    mat = np.asarray(mat)
    if mat.size == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return _cut(s, rtol)


def inv_sqrt_psd(gram: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(gram)
    if w[0] <= 1e-12 * max(w[-1], 1.0):
        raise np.linalg.LinAlgError("Gram matrix is not positive definite")
    return (v / np.sqrt(w)) @ v.conj().T


def subspace_residual(inner: np.ndarray, outer: np.ndarray) -> float:
    """Largest distance of an orthonormal column of `inner` from span(outer) (outer orthonormal)."""
    if inner.shape[1] == 0:
        return 0.0
    if outer.shape[1] == 0:
        return float(np.max(np.linalg.norm(inner, axis=0)))
    proj = outer @ (outer.conj().T @ inner)
    return float(np.max(np.linalg.norm(inner - proj, axis=0)))
