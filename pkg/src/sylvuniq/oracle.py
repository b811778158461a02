"""Brute-force real-linear vectorization of a general system.

Each unknown ``X`` contributes ``2mn`` real columns, ``vec(Re X)`` then
``vec(Im X)`` (column-major ``vec``); each equation contributes ``2mn`` rows,
real parts first.  Uniqueness and solutions are read off an SVD.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from .exceptions import ShapeError
from .model import GeneralSystem, validate
from .numeric import DEFAULT_TOL, Tolerances, real_nullspace

__all__ = [
    "RealAssembly",
    "SolveStatus",
    "SolveResult",
    "vec",
    "unvec",
    "term_block",
    "assemble_real_system",
    "oracle_nonsingular",
    "oracle_solution_dimension",
    "solve",
]


def vec(X) -> np.ndarray:
    return np.asarray(X).reshape(-1, order="F")


def unvec(v, m: int, n: int) -> np.ndarray:
    return np.asarray(v).reshape((m, n), order="F")


@dataclass(frozen=True, eq=False)
class RealAssembly:
    R: np.ndarray
    unknown_order: List[int]
    rhs: Optional[np.ndarray] = None


def term_block(K: np.ndarray, conj: bool) -> np.ndarray:
    """Real ``2k x 2k`` matrix of ``z -> K z`` (or ``K conj(z)``) acting on ``(Re z, Im z)``."""
    Kr, Ki = K.real, K.imag
    if conj:
        return np.block([[Kr, Ki], [Ki, -Kr]])
    return np.block([[Kr, -Ki], [Ki, Kr]])


def assemble_real_system(sys: GeneralSystem) -> RealAssembly:
    """Stack the real representation of every equation.

    ``rhs`` is present when at least one equation has a right-hand side;
    missing right-hand sides count as zero.
    """
    violations = validate(sys)
    if violations:
        raise ShapeError("; ".join(str(v) for v in violations))
    m, n = sys.m, sys.n
    k = 2 * m * n
    order = sys.unknown_ids
    col = {u: j for j, u in enumerate(order)}
    R = np.zeros((k * len(sys.equations), k * len(order)))
    for i, eq in enumerate(sys.equations):
        rows = slice(i * k, (i + 1) * k)
        left = col[eq.left.index]
        right = col[eq.right.index]
        R[rows, left * k:(left + 1) * k] += term_block(np.kron(eq.B.T, eq.A), eq.left.conj)
        R[rows, right * k:(right + 1) * k] -= term_block(np.kron(eq.D.T, eq.C), eq.right.conj)
    rhs = None
    if sys.has_rhs():
        parts = []
        for eq in sys.equations:
            E = np.zeros((m, n), dtype=complex) if eq.E is None else eq.E
            parts.extend([vec(E.real), vec(E.imag)])
        rhs = np.concatenate(parts)
    return RealAssembly(R, order, rhs)


def oracle_solution_dimension(sys: GeneralSystem, tol: Tolerances = DEFAULT_TOL) -> int:
    """Real dimension of the solution space of the homogeneous system."""
    if not sys.equations:
        return 0
    nullity, _ = real_nullspace(assemble_real_system(sys).R, tol)
    return nullity


def oracle_nonsingular(sys: GeneralSystem, tol: Tolerances = DEFAULT_TOL) -> bool:
    """True when the homogeneous system has only the trivial solution."""
    return oracle_solution_dimension(sys, tol) == 0


class SolveStatus(str, enum.Enum):
    UNIQUE = "unique"
    INCONSISTENT = "inconsistent"
    UNDERDETERMINED = "underdetermined"


@dataclass
class SolveResult:
    status: SolveStatus
    nullity: int
    residual: float
    solutions: Optional[Dict[int, np.ndarray]] = None

    @property
    def particular(self) -> Optional[Dict[int, np.ndarray]]:
        return self.solutions if self.status is SolveStatus.UNDERDETERMINED else None


def solve(sys: GeneralSystem, tol: Tolerances = DEFAULT_TOL) -> SolveResult:
    """Solve the nonhomogeneous system through its real representation.

    The minimum-norm least-squares vector is computed from a truncated SVD;
    it is accepted as a solution when the residual is at most
    ``1e-8 * (1 + ||rhs||)``.  With a nontrivial null space it is returned as
    the particular solution.
    """
    asm = assemble_real_system(sys)
    R = asm.R
    rhs = asm.rhs if asm.rhs is not None else np.zeros(R.shape[0])
    m, n = sys.m, sys.n
    k = 2 * m * n

    u, s, vh = np.linalg.svd(R, full_matrices=False)
    threshold = tol.rank_rel * (s[0] if s.size else 0.0) * max(R.shape)
    keep = s > threshold if (s.size and s[0] > 0) else np.zeros(s.shape, dtype=bool)
    rank = int(np.count_nonzero(keep))
    coef = (u[:, keep].T @ rhs) / s[keep]
    v = vh[keep].T @ coef
    residual = float(np.linalg.norm(R @ v - rhs))
    nullity = R.shape[1] - rank

    if residual > 1e-8 * (1.0 + np.linalg.norm(rhs)):
        return SolveResult(SolveStatus.INCONSISTENT, nullity, residual)
    solutions = {}
    for j, uid in enumerate(asm.unknown_order):
        block = v[j * k:(j + 1) * k]
        solutions[uid] = unvec(block[:m * n], m, n) + 1j * unvec(block[m * n:], m, n)
    status = SolveStatus.UNIQUE if nullity == 0 else SolveStatus.UNDERDETERMINED
    return SolveResult(status, nullity, residual, solutions)
