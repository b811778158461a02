"""Fixtures and seeded generators of test systems."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import List, Optional, Tuple, Union

import numpy as np

from .exceptions import PreconditionError
from .model import GeneralEquation, GeneralSystem, PeriodicSystem, UnknownRef
from .numeric import DEFAULT_TOL, Tolerances, spectra_disjoint
from .oracle import oracle_solution_dimension
from .pencils import BlockPencil, Layout, assemble_blocks
from .reduction import reduce_system
from .uniqueness import ReasonKind, verdict_general

__all__ = [
    "GenSpec",
    "counterexample_fixture",
    "counterexample_periodic",
    "build_retracted_pencils",
    "random_system",
    "planted_singular",
    "draw_filtered",
    "Fact",
    "counterexample_facts",
]

ConjPattern = Union[str, Tuple[Tuple[bool, bool], ...]]


@dataclass(frozen=True)
class GenSpec:
    """Recipe for a seeded random system.

    ``conj`` is ``"plain"``, ``"terminal"`` (only the closing link
    conjugated), ``"random"`` or an explicit tuple of ``(s_i, t_i)`` flags per
    cycle equation.  ``plant="shared"`` duplicates coefficients (``C = A``,
    ``D = B``) so that equal unknowns solve the system.  ``chain`` appends
    that many equations hanging off the cycle, each introducing a fresh
    unknown that occurs once.  ``scramble`` relabels unknowns, shuffles the
    equations and flips the orientation of some of them.
    """

    m: int = 2
    n: int = 2
    r: int = 2
    conj: ConjPattern = "random"
    plant: Optional[str] = None
    chain: int = 0
    scramble: bool = False
    rhs: bool = False
    seed: int = 0

    def __post_init__(self):
        if min(self.m, self.n, self.r) < 1:
            raise ValueError("m, n and r must be at least 1")
        if self.chain < 0:
            raise ValueError("chain must be non-negative")
        if self.plant not in (None, "shared"):
            raise ValueError(f"unknown plant {self.plant!r}")
        if isinstance(self.conj, str):
            if self.conj not in ("plain", "terminal", "random"):
                raise ValueError(f"unknown conjugation pattern {self.conj!r}")
        elif len(self.conj) != self.r:
            raise ValueError("explicit conjugation pattern needs one (s, t) pair per cycle equation")


def _eye(k):
    return np.eye(k, dtype=complex)


def counterexample_fixture(variant: str = "first") -> GeneralSystem:
    """The two-link system with ``2 x 2`` nilpotent coefficients.

    ``"first"`` has a 4-dimensional (complex) solution space although the
    retracted pencils are regular with disjoint spectra; ``"second"`` swaps
    ``B_1`` and ``B_2`` and is uniquely solvable.
    """
    upper = np.array([[0, 1], [0, 0]], dtype=complex)
    lower = np.array([[0, 0], [1, 0]], dtype=complex)
    if variant == "first":
        B1, B2 = lower, upper
    elif variant == "second":
        B1, B2 = upper, lower
    else:
        raise ValueError(f"variant must be 'first' or 'second', got {variant!r}")
    I = _eye(2)
    D1 = np.diag([1, 0]).astype(complex)
    return GeneralSystem(2, 2, [
        GeneralEquation(I, B1, I, D1, UnknownRef(1), UnknownRef(2)),
        GeneralEquation(I, B2, I, I, UnknownRef(2), UnknownRef(1)),
    ])


def counterexample_periodic(variant: str = "first") -> PeriodicSystem:
    sys = counterexample_fixture(variant)
    eqs = sys.equations
    return PeriodicSystem([e.A for e in eqs], [e.B for e in eqs],
                          [e.C for e in eqs], [e.D for e in eqs], conj=False)


def build_retracted_pencils(sys: PeriodicSystem) -> Tuple[BlockPencil, BlockPencil]:
    """The withdrawn characterization: ``lambda*A_i`` / ``lambda*D_i`` on the diagonal,
    ``C_i`` / ``B_i`` on the superdiagonal with the last one in the corner.

    Kept only to exhibit its failure.
    """
    if sys.conj or sys.r < 2:
        raise PreconditionError("retracted pencils are defined for plain cycles with r >= 2")
    r, m, n = sys.r, sys.m, sys.n
    Pm = {(k, k + 1): sys.C[k] for k in range(r - 1)}
    Pm[(r - 1, 0)] = sys.C[r - 1]
    Qm = {(k, k + 1): sys.B[k] for k in range(r - 1)}
    Qm[(r - 1, 0)] = sys.B[r - 1]
    P = BlockPencil(assemble_blocks(Pm, r, m),
                    assemble_blocks({(k, k): sys.A[k] for k in range(r)}, r, m),
                    Layout(m, r, "retracted"))
    Q = BlockPencil(assemble_blocks(Qm, r, n),
                    assemble_blocks({(k, k): sys.D[k] for k in range(r)}, r, n),
                    Layout(n, r, "retracted"))
    return P, Q


def _gauss(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def _flags(spec: GenSpec, rng) -> List[Tuple[bool, bool]]:
    r = spec.r
    if spec.conj == "plain":
        return [(False, False)] * r
    if spec.conj == "terminal":
        return [(False, False)] * (r - 1) + [(False, True)]
    if spec.conj == "random":
        bits = rng.integers(0, 2, size=(r, 2)).astype(bool)
        return [(bool(s), bool(t)) for s, t in bits]
    return [(bool(s), bool(t)) for s, t in spec.conj]


def random_system(spec: GenSpec) -> GeneralSystem:
    """Seeded cycle-structured system with complex Gaussian coefficients.

    The cycle, the chain and the scrambling draw from independent streams of
    ``spec.seed``, so the same seed with ``chain=0`` reproduces the bare
    cycle of a chained instance.
    """
    cyc_rng, chain_rng, scr_rng, rhs_rng = (
        np.random.default_rng(s) for s in np.random.SeedSequence(spec.seed).spawn(4))
    m, n, r = spec.m, spec.n, spec.r

    eqs: List[GeneralEquation] = []
    A = [_gauss(cyc_rng, (m, m)) for _ in range(r)]
    B = [_gauss(cyc_rng, (n, n)) for _ in range(r)]
    C = [_gauss(cyc_rng, (m, m)) for _ in range(r)]
    D = [_gauss(cyc_rng, (n, n)) for _ in range(r)]
    if spec.plant == "shared":
        C, D = A, B
    flags = _flags(spec, cyc_rng)
    for i in range(r):
        s, t = flags[i]
        eqs.append(GeneralEquation(A[i], B[i], C[i], D[i],
                                   UnknownRef(i + 1, s), UnknownRef((i + 1) % r + 1, t)))

    prev = int(chain_rng.integers(1, r + 1)) if spec.chain else None
    for j in range(spec.chain):
        fresh = r + j + 1
        if spec.conj == "random":
            s, t = (bool(b) for b in chain_rng.integers(0, 2, size=2))
        else:
            s = t = False
        eqs.append(GeneralEquation(_gauss(chain_rng, (m, m)), _gauss(chain_rng, (n, n)),
                                   _gauss(chain_rng, (m, m)), _gauss(chain_rng, (n, n)),
                                   UnknownRef(fresh, s), UnknownRef(prev, t)))
        prev = fresh

    if spec.scramble:
        total = r + spec.chain
        labels = scr_rng.choice(np.arange(1, 3 * total + 1), size=total, replace=False)
        relabel = {k + 1: int(labels[k]) for k in range(total)}
        scrambled = []
        for eq in eqs:
            eq = GeneralEquation(eq.A, eq.B, eq.C, eq.D,
                                 UnknownRef(relabel[eq.left.index], eq.left.conj),
                                 UnknownRef(relabel[eq.right.index], eq.right.conj))
            if scr_rng.random() < 0.5:
                eq = eq.flipped()
            scrambled.append(eq)
        eqs = [scrambled[k] for k in scr_rng.permutation(len(scrambled))]

    if spec.rhs:
        eqs = [GeneralEquation(e.A, e.B, e.C, e.D, e.left, e.right, _gauss(rhs_rng, (m, n)))
               for e in eqs]
    return GeneralSystem(m, n, eqs)


def planted_singular(spec: GenSpec) -> GeneralSystem:
    """Random system with ``C_i = A_i`` and ``D_i = B_i`` on the cycle.

    Equal real unknowns on the cycle (extended through the chain) solve it,
    whatever the conjugation flags, so it is singular by construction.
    """
    if spec.plant != "shared":
        raise PreconditionError("planted_singular needs plant='shared'")
    return random_system(spec)


def _attempt_seed(seed: int, attempt: int) -> int:
    if attempt == 0:
        return seed
    return int(np.random.SeedSequence([seed, attempt]).generate_state(1)[0])


def draw_filtered(spec: GenSpec, tol: Tolerances = DEFAULT_TOL, max_attempts: int = 50,
                  accept=None) -> Tuple[GeneralSystem, int]:
    """Draw ``random_system(spec)``, redrawing with derived seeds while the
    instance is ambiguous.

    ``accept(system)`` decides acceptability; by default the main-variant
    verdict must not be indeterminate.  Returns the system and the number of
    attempts used.
    """
    if accept is None:
        def accept(system):
            return not verdict_general(system, tol).indeterminate
    for attempt in range(max_attempts):
        system = random_system(replace(spec, seed=_attempt_seed(spec.seed, attempt)))
        if accept(system):
            return system, attempt + 1
    raise RuntimeError(f"no unambiguous instance after {max_attempts} attempts for {spec}")


@dataclass
class Fact:
    name: str
    ok: bool
    detail: dict

    def __post_init__(self):
        self.ok = bool(self.ok)
        self.detail = {k: bool(v) if isinstance(v, np.bool_) else v for k, v in self.detail.items()}

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, **self.detail}


_SAMPLE_POINTS = (0.3, -1.7, 0.5 + 0.8j, 2j, -0.9 + 0.1j)


def _det_matches(pencil: BlockPencil, poly) -> Tuple[bool, float]:
    worst = 0.0
    for lam in _SAMPLE_POINTS:
        got = np.linalg.det(pencil(lam))
        want = poly(lam)
        worst = max(worst, abs(got - want) / (1.0 + abs(want)))
    return worst < 1e-10, worst


def counterexample_facts(first: Optional[GeneralSystem] = None,
                         second: Optional[GeneralSystem] = None,
                         tol: Tolerances = DEFAULT_TOL) -> List[Fact]:
    """Re-derive the facts that expose the retracted characterization.

    1. On the first system the retracted pencils are regular with disjoint
       spectra, with determinants ``(lam^2 - 1)^2`` and ``-lam^2``.
    2. The corrected criterion declares the first system non-unique because
       its second pencil is singular.
    3. The oracle finds an 8-dimensional real solution space.
    4. On the second system the retracted second pencil is singular, the
       corrected criterion declares uniqueness and the oracle agrees.
    """
    first = counterexample_fixture("first") if first is None else first
    second = counterexample_fixture("second") if second is None else second
    facts = []

    p1 = _as_periodic(first)
    P, Q = build_retracted_pencils(p1)
    regular = P.is_regular(tol) and Q.is_regular(tol)
    detail = {"regular": regular}
    ok = regular
    if regular:
        disjoint, pair = spectra_disjoint(P.eigenvalues(tol), Q.eigenvalues(tol), tol)
        okP, errP = _det_matches(P, lambda x: (x * x - 1) ** 2)
        okQ, errQ = _det_matches(Q, lambda x: -x * x)
        detail.update(disjoint=disjoint, gap=pair[2], det_first_err=errP, det_second_err=errQ)
        ok = disjoint and okP and okQ
    facts.append(Fact("first: retracted pencils regular, disjoint, det (l^2-1)^2 and -l^2", ok, detail))

    v1 = verdict_general(first, tol)
    ok = (not v1.unique and v1.reason.kind is ReasonKind.SINGULAR_PENCIL
          and v1.reason.detail.get("which") == "second")
    facts.append(Fact("first: corrected criterion says not unique (second pencil singular)", ok,
                      {"unique": v1.unique, "reason": v1.reason.to_json()}))

    dim1 = oracle_solution_dimension(first, tol)
    facts.append(Fact("first: oracle nullity is 8", dim1 == 8, {"nullity": dim1}))

    p2 = _as_periodic(second)
    _, Q2 = build_retracted_pencils(p2)
    v2 = verdict_general(second, tol)
    dim2 = oracle_solution_dimension(second, tol)
    ok = (not Q2.is_regular(tol)) and v2.unique and dim2 == 0
    facts.append(Fact("second: retracted second pencil singular, corrected says unique, oracle nullity 0",
                      ok, {"retracted_second_regular": Q2.is_regular(tol), "unique": v2.unique,
                           "nullity": dim2}))
    return facts


def _as_periodic(sys: GeneralSystem) -> PeriodicSystem:
    red = reduce_system(sys)
    outcome = red.outcomes[0]
    if len(red.outcomes) != 1 or outcome.system is None:
        raise PreconditionError("fixture does not reduce to a single periodic cycle")
    return outcome.system
