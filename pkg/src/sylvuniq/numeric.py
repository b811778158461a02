"""Dense pencil numerics on the extended complex plane.

Infinite eigenvalues are stored as the single value ``INF = complex(inf, 0)``;
every routine in this module normalizes other non-finite values to it, so
``is_infinite`` is the only test callers need.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Tuple

import numpy as np

from .exceptions import SingularPencilError

__all__ = [
    "INF",
    "Tolerances",
    "DEFAULT_TOL",
    "Spectrum",
    "to_extended",
    "is_infinite",
    "chordal_distance",
    "chordal_matrix",
    "pencil_eigenvalues",
    "is_regular",
    "spectra_disjoint",
    "spectrum_inverse",
    "real_nullspace",
    "is_invertible",
    "match_spectra",
]

INF = complex(math.inf, 0.0)

_N_SHIFTS = 16


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used by every rank, regularity and spectral decision.

    ``ambiguous_lo``/``ambiguous_hi`` bound the band of inter-spectra chordal
    gaps that are reported as indeterminate instead of forced to a boolean.
    """

    rank_rel: float = 1e-10
    sep_chordal: float = 1e-8
    inf_theta: float = 1e-10
    regular_rel: float = 1e-10
    ambiguous_lo: float = 1e-10
    ambiguous_hi: float = 1e-6

    def __post_init__(self):
        for name in ("rank_rel", "sep_chordal", "inf_theta", "regular_rel",
                     "ambiguous_lo", "ambiguous_hi"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be strictly positive, got {value!r}")
        if self.sep_chordal >= 1:
            raise ValueError("sep_chordal must be < 1")
        if self.ambiguous_lo > self.ambiguous_hi:
            raise ValueError("ambiguous_lo must not exceed ambiguous_hi")

    def is_ambiguous(self, gap: float) -> bool:
        return self.ambiguous_lo <= gap <= self.ambiguous_hi


DEFAULT_TOL = Tolerances()


def to_extended(z) -> complex:
    """Coerce a scalar to an extended-complex value (any non-finite -> INF)."""
    z = complex(z)
    if math.isfinite(z.real) and math.isfinite(z.imag):
        return z
    return INF


def is_infinite(z) -> bool:
    z = complex(z)
    return not (math.isfinite(z.real) and math.isfinite(z.imag))


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalue multiset; repeated entries encode multiplicity."""

    values: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def __post_init__(self):
        vals = np.array([to_extended(v) for v in np.ravel(self.values)], dtype=complex)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def total(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.total

    def __iter__(self) -> Iterator[complex]:
        return iter(complex(v) for v in self.values)

    @property
    def finite(self) -> np.ndarray:
        return self.values[np.isfinite(self.values)]

    @property
    def n_infinite(self) -> int:
        return int(np.count_nonzero(~np.isfinite(self.values)))

    def sorted(self) -> "Spectrum":
        finite = self.finite
        order = np.lexsort((finite.imag, finite.real))
        return Spectrum(np.concatenate([finite[order], np.full(self.n_infinite, INF)]))

    def to_json(self) -> list:
        """Finite values as ``[re, im]``, infinity as the string ``"inf"``."""
        return ["inf" if is_infinite(v) else [v.real, v.imag] for v in self.sorted()]


def _as_array(values) -> np.ndarray:
    if isinstance(values, Spectrum):
        return values.values
    return np.array([to_extended(v) for v in np.ravel(values)], dtype=complex)


def chordal_matrix(x, y) -> np.ndarray:
    """Pairwise chordal distances between two collections of extended values."""
    x = _as_array(x)[:, None]
    y = _as_array(y)[None, :]
    xin, yin = ~np.isfinite(x), ~np.isfinite(y)
    xf = np.where(xin, 0, x)
    yf = np.where(yin, 0, y)
    hx = np.hypot(1.0, np.abs(xf))
    hy = np.hypot(1.0, np.abs(yf))
    with np.errstate(over="ignore", invalid="ignore"):
        d = np.abs(xf - yf) / hx / hy
    d = np.where(xin & yin, 0.0, d)
    d = np.where(xin & ~yin, 1.0 / hy, d)
    d = np.where(~xin & yin, 1.0 / hx, d)
    return np.clip(d, 0.0, 1.0)


def chordal_distance(a, b) -> float:
    """Chordal distance between two points of the Riemann sphere.

    >>> chordal_distance(1, -1)
    1.0
    """
    a, b = to_extended(a), to_extended(b)
    ainf, binf = is_infinite(a), is_infinite(b)
    if ainf and binf:
        return 0.0
    if ainf:
        return 1.0 / math.hypot(1.0, abs(b))
    if binf:
        return 1.0 / math.hypot(1.0, abs(a))
    # inversion is an isometry of the chordal metric; use it to avoid overflow
    if abs(a) > 1.0 and abs(b) > 1.0:
        a, b = 1.0 / a, 1.0 / b
    d = abs(a - b) / (math.hypot(1.0, abs(a)) * math.hypot(1.0, abs(b)))
    return min(d, 1.0)


def _check_pencil(M, N) -> Tuple[np.ndarray, np.ndarray]:
    M = np.asarray(M, dtype=complex)
    N = np.asarray(N, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape != N.shape:
        raise ValueError(f"pencil parts must be square and equal-sized, got {M.shape} and {N.shape}")
    return M, N


def _balance_scale(M: np.ndarray, N: np.ndarray) -> float:
    nm, nn = np.linalg.norm(M, 2), np.linalg.norm(N, 2)
    if nm > 0 and nn > 0:
        return float(nm / nn)
    return 1.0


def _svd_ratio(X: np.ndarray) -> float:
    s = np.linalg.svd(X, compute_uv=False)
    if s.size == 0:
        return 1.0
    if s[0] == 0:
        return 0.0
    return float(s[-1] / s[0])


def _shift_candidates(scale: float, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    fixed = np.array([0, 1, -1, 1j, -1j], dtype=complex)
    phases = rng.uniform(0.0, 2 * np.pi, _N_SHIFTS - fixed.size)
    return scale * np.concatenate([fixed, np.exp(1j * phases)])


def pencil_eigenvalues(M, N, tol: Tolerances = DEFAULT_TOL, seed: int = 0) -> Spectrum:
    """Eigenvalues of the regular pencil ``M + lambda*N`` on the extended plane.

    The pencil is shifted to ``M + mu*N`` with ``mu`` chosen among sixteen
    candidates (scaled by ``||M||/||N||``) to maximize the reciprocal
    condition number; then ``theta = eig((M + mu*N)^{-1} N)`` and
    ``lambda = mu - 1/theta``, with ``theta`` below ``inf_theta * max|theta|``
    mapped to infinity.

    Raises
    ------
    SingularPencilError
        If no candidate shift gives an invertible ``M + mu*N``.
    """
    M, N = _check_pencil(M, N)
    n = M.shape[0]
    if n == 0:
        return Spectrum()
    best_mu, best_ratio = None, -1.0
    for mu in _shift_candidates(_balance_scale(M, N), seed):
        ratio = _svd_ratio(M + mu * N)
        if ratio > best_ratio:
            best_mu, best_ratio = mu, ratio
    if best_ratio <= tol.regular_rel:
        raise SingularPencilError(
            f"no shift gives an invertible M + mu*N (best reciprocal condition {best_ratio:.3e})")

    G = np.linalg.solve(M + best_mu * N, N)
    theta = np.linalg.eigvals(G)
    big = np.max(np.abs(theta))
    out = np.empty(n, dtype=complex)
    for k, t in enumerate(theta):
        if big == 0 or abs(t) < tol.inf_theta * big:
            out[k] = INF
        else:
            out[k] = best_mu - 1.0 / t
    return Spectrum(out)


def is_regular(M, N, tol: Tolerances = DEFAULT_TOL, seed: int = 0) -> bool:
    """Decide whether ``det(M + lambda*N)`` is not identically zero.

    The determinant has degree at most ``n``, so it is sampled at the ``n+1``
    roots of unity and one seeded random point (all scaled by
    ``||M||/||N||``); the pencil is regular when the best sample has
    ``sigma_min > regular_rel * sigma_max``.
    """
    M, N = _check_pencil(M, N)
    n = M.shape[0]
    if n == 0:
        return True
    if not (np.any(M) or np.any(N)):
        return False
    scale = _balance_scale(M, N)
    rng = np.random.default_rng(seed)
    pts = np.exp(2j * np.pi * np.arange(n + 1) / (n + 1))
    extra = rng.standard_normal() + 1j * rng.standard_normal()
    pts = scale * np.append(pts, extra)
    best = max(_svd_ratio(M + lam * N) for lam in pts)
    return best > tol.regular_rel


def spectra_disjoint(s1, s2, tol: Tolerances = DEFAULT_TOL
                     ) -> Tuple[bool, Optional[Tuple[complex, complex, float]]]:
    """Chordal-separation test; also returns the closest pair as evidence.

    Empty spectra are vacuously disjoint and come with ``None`` evidence.
    """
    a, b = _as_array(s1), _as_array(s2)
    if a.size == 0 or b.size == 0:
        return True, None
    d = chordal_matrix(a, b)
    i, j = np.unravel_index(np.argmin(d), d.shape)
    gap = float(d[i, j])
    return gap >= tol.sep_chordal, (complex(a[i]), complex(b[j]), gap)


def spectrum_inverse(s) -> Spectrum:
    """Map each eigenvalue to its reciprocal, with 1/0 = inf and 1/inf = 0."""
    vals = _as_array(s)
    out = np.empty_like(vals)
    for k, v in enumerate(vals):
        if is_infinite(v):
            out[k] = 0.0
        elif v == 0:
            out[k] = INF
        else:
            out[k] = 1.0 / v
    return Spectrum(out)


def real_nullspace(R, tol: Tolerances = DEFAULT_TOL) -> Tuple[int, np.ndarray]:
    """Numerical null space of a real matrix.

    Singular values below ``rank_rel * sigma_max * max(rows, cols)`` count as
    zero.  Returns the nullity and an orthonormal basis (columns).
    """
    R = np.atleast_2d(np.asarray(R, dtype=float))
    rows, cols = R.shape
    if R.size == 0:
        return cols, np.eye(cols)
    _, s, vh = np.linalg.svd(R, full_matrices=True)
    threshold = tol.rank_rel * (s[0] if s.size else 0.0) * max(rows, cols)
    rank = int(np.count_nonzero(s > threshold)) if s[0] > 0 else 0
    basis = vh[rank:].conj().T
    return cols - rank, basis


def is_invertible(X, tol: Tolerances = DEFAULT_TOL) -> bool:
    X = np.asarray(X)
    if X.size == 0:
        return True
    s = np.linalg.svd(X, compute_uv=False)
    return bool(s[0] > 0 and s[-1] > tol.rank_rel * s[0])


def match_spectra(s1, s2) -> np.ndarray:
    """Greedy minimal-chordal pairing of two equal-size multisets.

    Returns the chordal distances of the matched pairs, in the order they
    were picked (smallest first).
    """
    a, b = _as_array(s1), _as_array(s2)
    if a.size != b.size:
        raise ValueError(f"cannot pair multisets of sizes {a.size} and {b.size}")
    d = chordal_matrix(a, b)
    out = []
    for _ in range(a.size):
        i, j = np.unravel_index(np.argmin(d), d.shape)
        out.append(d[i, j])
        d[i, :] = np.inf
        d[:, j] = np.inf
    return np.array(out)
