"""Block pencils attached to periodic systems and formal matrix products.

Every pencil is stored as ``M + lambda*N``.  Block positions below are
0-based; coefficient lists are the 0-based ``A[0] .. A[r-1]`` of the
periodic system, so ``A[r-1]`` is the coefficient of the closing link.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from .exceptions import (InternalInconsistency, PreconditionError, ShapeError,
                         SpectralGroupingError)
from .model import PeriodicSystem
from .numeric import (DEFAULT_TOL, INF, Spectrum, Tolerances, chordal_matrix,
                      is_infinite, is_regular, pencil_eigenvalues)

__all__ = [
    "Variant",
    "Layout",
    "BlockPencil",
    "FormalProduct",
    "build_plain_pencils",
    "build_single_pencils",
    "build_doubled_system",
    "build_conj_pencils",
    "build_product_pencils",
    "formal_product_eigenvalues",
    "assemble_blocks",
]


class Variant(str, enum.Enum):
    MAIN = "main"
    ALT_I = "alt_i"
    ALT_II = "alt_ii"
    ALT_III = "alt_iii"


@dataclass(frozen=True)
class Layout:
    block_size: int
    block_count: int
    variant: str

    def to_json(self) -> dict:
        return {"block_size": self.block_size, "block_count": self.block_count,
                "variant": self.variant}


@dataclass(frozen=True, eq=False)
class BlockPencil:
    M: np.ndarray
    N: np.ndarray
    layout: Layout

    def __post_init__(self):
        expected = self.layout.block_size * self.layout.block_count
        if self.M.shape != (expected, expected) or self.N.shape != (expected, expected):
            raise ShapeError(f"pencil parts {self.M.shape}/{self.N.shape} do not match layout {self.layout}")

    @property
    def size(self) -> int:
        return self.M.shape[0]

    def __call__(self, lam) -> np.ndarray:
        return self.M + lam * self.N

    def reversal(self) -> "BlockPencil":
        return BlockPencil(self.N, self.M, self.layout)

    def is_regular(self, tol: Tolerances = DEFAULT_TOL) -> bool:
        return is_regular(self.M, self.N, tol)

    def eigenvalues(self, tol: Tolerances = DEFAULT_TOL) -> Spectrum:
        return pencil_eigenvalues(self.M, self.N, tol)

    def identical_to(self, other: "BlockPencil") -> bool:
        return np.array_equal(self.M, other.M) and np.array_equal(self.N, other.N)


Blocks = Dict[Tuple[int, int], np.ndarray]


def assemble_blocks(blocks: Blocks, count: int, size: int) -> np.ndarray:
    """Dense ``count x count`` block matrix with ``size x size`` blocks; absent blocks are zero."""
    out = np.zeros((count * size, count * size), dtype=complex)
    for (i, j), X in blocks.items():
        X = np.asarray(X)
        if X.shape != (size, size):
            raise ShapeError(f"block ({i}, {j}) has shape {X.shape}, expected {(size, size)}")
        out[i * size:(i + 1) * size, j * size:(j + 1) * size] += X
    return out


def _pencil(Mb: Blocks, Nb: Blocks, count: int, size: int, variant: str) -> BlockPencil:
    return BlockPencil(assemble_blocks(Mb, count, size), assemble_blocks(Nb, count, size),
                       Layout(size, count, variant))


def _cyclic_pencils(A, B, C, D, variant: Variant) -> Tuple[BlockPencil, BlockPencil]:
    r = len(A)
    m, n = A[0].shape[0], B[0].shape[0]
    tag = variant.value
    if variant is Variant.MAIN:
        P = _pencil({**{(k, k + 1): A[r - 1 - k] for k in range(r - 1)}, (r - 1, 0): A[0]},
                    {(k, k): C[r - 1 - k] for k in range(r)}, r, m, tag)
        Q = _pencil({**{(k, k + 1): D[r - 2 - k] for k in range(r - 1)}, (r - 1, 0): D[r - 1]},
                    {(k, k): B[r - 1 - k] for k in range(r)}, r, n, tag)
    elif variant is Variant.ALT_I:
        P = _pencil({**{(k, k - 1): A[k] for k in range(1, r)}, (0, r - 1): A[0]},
                    {(k, k): C[k] for k in range(r)}, r, m, tag)
        Q = _pencil({**{(k, k - 1): D[k - 1] for k in range(1, r)}, (0, r - 1): D[r - 1]},
                    {(k, k): B[k] for k in range(r)}, r, n, tag)
    elif variant in (Variant.ALT_II, Variant.ALT_III):
        P = _pencil({(k, k): A[k] for k in range(r)},
                    {**{(k, k + 1): C[k] for k in range(r - 1)}, (r - 1, 0): C[r - 1]}, r, m, tag)
        Q = _pencil({(k, k): D[k] for k in range(r)},
                    {**{(k, k + 1): B[k + 1] for k in range(r - 1)}, (r - 1, 0): B[0]}, r, n, tag)
        if variant is Variant.ALT_III:
            # reversal of the second alternate: lambda moves onto the A/D blocks
            P = BlockPencil(P.N, P.M, P.layout)
            Q = BlockPencil(Q.N, Q.M, Q.layout)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return P, Q


def build_plain_pencils(sys: PeriodicSystem, variant: Variant = Variant.MAIN
                        ) -> Tuple[BlockPencil, BlockPencil]:
    """Cyclic block pencils characterizing a plain periodic system with ``r >= 2``.

    ``Variant.MAIN`` is the reference layout; ``ALT_I`` and ``ALT_II`` are
    block permutations of it (same spectra) and ``ALT_III`` is the reversal of
    ``ALT_II`` (reciprocal spectra).
    """
    if sys.conj:
        raise PreconditionError("build_plain_pencils needs a plain terminal link")
    if sys.r < 2:
        raise PreconditionError("cyclic pencils need r >= 2; use build_single_pencils for r = 1")
    return _cyclic_pencils(sys.A, sys.B, sys.C, sys.D, Variant(variant))


def build_single_pencils(sys: PeriodicSystem) -> Tuple[BlockPencil, BlockPencil]:
    """``A - lambda*C`` and ``D - lambda*B`` for a single plain equation."""
    if sys.r != 1 or sys.conj:
        raise PreconditionError("build_single_pencils needs a plain system with r = 1")
    m, n = sys.m, sys.n
    return (BlockPencil(sys.A[0], -sys.C[0], Layout(m, 1, "single")),
            BlockPencil(sys.D[0], -sys.B[0], Layout(n, 1, "single")))


def build_doubled_system(sys: PeriodicSystem) -> PeriodicSystem:
    """Plain cycle of length ``2r``: the original links followed by their conjugates."""
    if not sys.conj:
        raise PreconditionError("doubling applies to a conjugated terminal link")
    return PeriodicSystem(
        list(sys.A) + [np.conj(X) for X in sys.A],
        list(sys.B) + [np.conj(X) for X in sys.B],
        list(sys.C) + [np.conj(X) for X in sys.C],
        list(sys.D) + [np.conj(X) for X in sys.D],
        conj=False,
    )


def _explicit_conj_main(sys: PeriodicSystem) -> Tuple[BlockPencil, BlockPencil]:
    # layout written out directly from the conjugate characterization
    r = sys.r
    A, B, C, D = sys.A, sys.B, sys.C, sys.D
    cA, cB, cC, cD = ([np.conj(X) for X in L] for L in (A, B, C, D))
    Pn = {k: cC[r - 1 - k] for k in range(r)}
    Pn.update({r + k: C[r - 1 - k] for k in range(r)})
    Pm = {(k, k + 1): cA[r - 1 - k] for k in range(r)}
    Pm.update({(r + k, r + k + 1): A[r - 1 - k] for k in range(r - 1)})
    Pm[(2 * r - 1, 0)] = A[0]
    Qn = {k: cB[r - 1 - k] for k in range(r)}
    Qn.update({r + k: B[r - 1 - k] for k in range(r)})
    Qm = {(k, k + 1): cD[r - 2 - k] for k in range(r - 1)}
    Qm[(r - 1, r)] = D[r - 1]
    Qm.update({(r + k, r + k + 1): D[r - 2 - k] for k in range(r - 1)})
    Qm[(2 * r - 1, 0)] = cD[r - 1]
    tag = Variant.MAIN.value
    P = _pencil(Pm, {(k, k): X for k, X in Pn.items()}, 2 * r, sys.m, tag)
    Q = _pencil(Qm, {(k, k): X for k, X in Qn.items()}, 2 * r, sys.n, tag)
    return P, Q


def build_conj_pencils(sys: PeriodicSystem, variant: Variant = Variant.MAIN
                       ) -> Tuple[BlockPencil, BlockPencil]:
    """Pencils for a periodic system whose closing link is conjugated.

    They are the plain cyclic pencils of the doubled system.  For the main
    variant the result is checked block-for-block against the explicit
    ``2r``-block layout.
    """
    if not sys.conj:
        raise PreconditionError("build_conj_pencils needs a conjugated terminal link")
    P, Q = _cyclic_pencils(*_unpack(build_doubled_system(sys)), Variant(variant))
    if Variant(variant) is Variant.MAIN:
        Pe, Qe = _explicit_conj_main(sys)
        if not (P.identical_to(Pe) and Q.identical_to(Qe)):
            raise InternalInconsistency("doubled-system pencils disagree with the explicit conjugate layout")
    return P, Q


def _unpack(sys: PeriodicSystem):
    return sys.A, sys.B, sys.C, sys.D


@dataclass(frozen=True, eq=False)
class FormalProduct:
    """``M_r N_r^{-1} ... M_1 N_1^{-1}``; ``Ms[0]`` is ``M_1``."""

    Ms: Tuple[np.ndarray, ...]
    Ns: Tuple[np.ndarray, ...]

    def __post_init__(self):
        Ms = tuple(np.asarray(X, dtype=complex) for X in self.Ms)
        Ns = tuple(np.asarray(X, dtype=complex) for X in self.Ns)
        if not Ms or len(Ms) != len(Ns):
            raise ShapeError("formal product needs equally many (>= 1) numerators and denominators")
        shape = Ms[0].shape
        if len(shape) != 2 or shape[0] != shape[1] or any(X.shape != shape for X in Ms + Ns):
            raise ShapeError("formal product factors must all be square of one size")
        object.__setattr__(self, "Ms", Ms)
        object.__setattr__(self, "Ns", Ns)

    @property
    def r(self) -> int:
        return len(self.Ms)

    @property
    def n(self) -> int:
        return self.Ms[0].shape[0]

    def dense(self) -> np.ndarray:
        """Explicit product; only meaningful when every ``N_i`` is invertible."""
        out = np.eye(self.n, dtype=complex)
        for Mi, Ni in zip(self.Ms, self.Ns):
            out = Mi @ np.linalg.solve(Ni, out)
        return out


def build_product_pencils(p: FormalProduct) -> Tuple[BlockPencil, BlockPencil]:
    """The two cyclic embeddings of a formal product.

    ``Q2`` has the ``r``-th roots of the product eigenvalues as spectrum and
    ``Q1`` their reciprocals.
    """
    r, n = p.r, p.n
    Ms, Ns = p.Ms, p.Ns
    q1m = {(k + 1, k): -Ns[r - 1 - k] for k in range(r - 1)}
    q1m[(0, r - 1)] = -Ns[0]
    Q1 = _pencil(q1m, {(k, k): Ms[r - 1 - k] for k in range(r)}, r, n, "q1")
    q2m = {(k, k + 1): -Ms[r - 2 - k] for k in range(r - 1)}
    q2m[(r - 1, 0)] = -Ms[r - 1]
    Q2 = _pencil(q2m, {(k, k): Ns[r - 1 - k] for k in range(r)}, r, n, "q2")
    return Q1, Q2


def _group_roots(powers: np.ndarray, r: int, group_tol: float) -> np.ndarray:
    left = list(range(powers.size))
    reps = []
    while left:
        i = left[0]
        d = chordal_matrix(powers[[i]], powers[left])[0]
        order = np.argsort(d, kind="stable")[:r]
        if d[order[-1]] > group_tol:
            raise SpectralGroupingError(
                f"could not gather {r} r-th-root siblings near {powers[i]}: "
                f"spread {d[order[-1]]:.3e} exceeds {group_tol:.1e}")
        members = powers[[left[k] for k in order]]
        finite = members[np.isfinite(members)]
        reps.append(INF if finite.size * 2 < members.size else finite.mean())
        for k in sorted(order, reverse=True):
            del left[k]
    return np.array(reps, dtype=complex)


def formal_product_eigenvalues(p: FormalProduct, tol: Tolerances = DEFAULT_TOL,
                               group_tol: float = 1e-6) -> Tuple[bool, Spectrum]:
    """Regularity and eigenvalues of a formal product via its ``Q2`` embedding.

    The ``rn`` eigenvalues of ``Q2`` are raised to the ``r``-th power and each
    group of ``r`` siblings is collapsed to one value, giving ``n``
    eigenvalues.  A singular product returns ``(False, empty spectrum)``.

    Raises
    ------
    SpectralGroupingError
        If the powers do not split into tight groups of ``r``.
    """
    _, Q2 = build_product_pencils(p)
    if not Q2.is_regular(tol):
        return False, Spectrum()
    roots = Q2.eigenvalues(tol).values
    powers = np.array([INF if is_infinite(z) else z ** p.r for z in roots], dtype=complex)
    return True, Spectrum(_group_roots(powers, p.r, group_tol))
