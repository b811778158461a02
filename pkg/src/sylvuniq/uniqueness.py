"""Uniqueness verdicts for periodic and general systems."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .exceptions import InternalInconsistency, PreconditionError, SingularPencilError
from .model import PeriodicSystem, GeneralSystem
from .numeric import (DEFAULT_TOL, Spectrum, Tolerances, is_infinite,
                      spectra_disjoint)
from .oracle import oracle_solution_dimension
from .pencils import (BlockPencil, Variant, build_conj_pencils, build_doubled_system,
                      build_plain_pencils, build_single_pencils)
from .reduction import OutcomeKind, ReductionTrace, reduce_system

__all__ = [
    "ReasonKind",
    "Reason",
    "PeriodicVerdict",
    "ComponentReport",
    "Verdict",
    "decide_pencils",
    "verdict_periodic_plain",
    "verdict_periodic_conj",
    "verdict_periodic",
    "verdict_general",
    "conjugate_product_criterion",
    "sign_flip_dimension_check",
]


class ReasonKind(str, enum.Enum):
    DISJOINT_SPECTRA = "disjoint_spectra"
    SHARED_EIGENVALUE = "shared_eigenvalue"
    SINGULAR_PENCIL = "singular_pencil"
    NONINVERTIBLE_PRUNED_COEFFICIENT = "noninvertible_pruned_coefficient"
    COUNT_MISMATCH = "count_mismatch"
    EMPTY_COMPONENT = "empty_component"


@dataclass(frozen=True)
class Reason:
    kind: ReasonKind
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"kind": self.kind.value, **_jsonable(self.detail)}


def _ext_json(z):
    return "inf" if is_infinite(z) else [z.real, z.imag]


def _jsonable(d: dict) -> dict:
    out = {}
    for k, v in d.items():
        out[k] = _ext_json(v) if isinstance(v, complex) else v
    return out


@dataclass
class PeriodicVerdict:
    unique: bool
    reason: Reason
    pencils: Tuple[BlockPencil, BlockPencil]
    spectra: Tuple[Optional[Spectrum], Optional[Spectrum]] = (None, None)
    gap: Optional[float] = None
    indeterminate: bool = False

    def to_json(self) -> dict:
        return {
            "unique": self.unique,
            "reason": self.reason.to_json(),
            "layouts": [p.layout.to_json() for p in self.pencils],
            "spectra": [None if s is None else s.to_json() for s in self.spectra],
            "gap": self.gap,
            "indeterminate": self.indeterminate,
        }


def decide_pencils(P: BlockPencil, Q: BlockPencil, tol: Tolerances = DEFAULT_TOL) -> PeriodicVerdict:
    """Unique iff both pencils are regular with chordally separated spectra."""
    for which, pencil in (("first", P), ("second", Q)):
        if not pencil.is_regular(tol):
            return PeriodicVerdict(False, Reason(ReasonKind.SINGULAR_PENCIL, {"which": which}), (P, Q))
    try:
        sP = P.eigenvalues(tol)
    except SingularPencilError:
        return PeriodicVerdict(False, Reason(ReasonKind.SINGULAR_PENCIL,
                                             {"which": "first", "stage": "shift"}), (P, Q))
    try:
        sQ = Q.eigenvalues(tol)
    except SingularPencilError:
        return PeriodicVerdict(False, Reason(ReasonKind.SINGULAR_PENCIL,
                                             {"which": "second", "stage": "shift"}), (P, Q))
    disjoint, pair = spectra_disjoint(sP, sQ, tol)
    gap = None if pair is None else pair[2]
    indeterminate = gap is not None and tol.is_ambiguous(gap)
    if disjoint:
        reason = Reason(ReasonKind.DISJOINT_SPECTRA, {} if gap is None else {"gap": gap})
    else:
        reason = Reason(ReasonKind.SHARED_EIGENVALUE,
                        {"first": pair[0], "second": pair[1], "distance": gap})
    return PeriodicVerdict(disjoint, reason, (P, Q), (sP, sQ), gap, indeterminate)


def verdict_periodic_plain(sys: PeriodicSystem, tol: Tolerances = DEFAULT_TOL,
                           variant: Variant = Variant.MAIN) -> PeriodicVerdict:
    """Plain periodic system: single-equation pencils for ``r = 1``, cyclic pencils otherwise."""
    if sys.conj:
        raise PreconditionError("verdict_periodic_plain needs a plain terminal link")
    if sys.r == 1:
        return decide_pencils(*build_single_pencils(sys), tol)
    return decide_pencils(*build_plain_pencils(sys, variant), tol)


def verdict_periodic_conj(sys: PeriodicSystem, tol: Tolerances = DEFAULT_TOL,
                          variant: Variant = Variant.MAIN,
                          cross_check: bool = True) -> PeriodicVerdict:
    """Periodic system with a conjugated closing link.

    With ``cross_check`` the doubled plain system is decided independently
    and must agree.

    Raises
    ------
    InternalInconsistency
        If the two routes disagree.
    """
    if not sys.conj:
        raise PreconditionError("verdict_periodic_conj needs a conjugated terminal link")
    verdict = decide_pencils(*build_conj_pencils(sys, variant), tol)
    if cross_check:
        other = verdict_periodic_plain(build_doubled_system(sys), tol, variant)
        if other.unique != verdict.unique:
            raise InternalInconsistency(
                f"conjugate pencils say unique={verdict.unique}, doubled system says {other.unique}")
    return verdict


def verdict_periodic(sys: PeriodicSystem, tol: Tolerances = DEFAULT_TOL,
                     variant: Variant = Variant.MAIN) -> PeriodicVerdict:
    if sys.conj:
        return verdict_periodic_conj(sys, tol, variant)
    return verdict_periodic_plain(sys, tol, variant)


@dataclass
class ComponentReport:
    kind: OutcomeKind
    trace: ReductionTrace
    unique: bool
    reason: Reason
    system: Optional[PeriodicSystem] = None
    periodic: Optional[PeriodicVerdict] = None

    @property
    def indeterminate(self) -> bool:
        return self.periodic is not None and self.periodic.indeterminate

    def to_json(self) -> dict:
        out = {
            "kind": self.kind.value,
            "unique": self.unique,
            "reason": self.reason.to_json(),
            "trace": self.trace.to_json(),
        }
        if self.periodic is not None:
            out["pencils"] = self.periodic.to_json()
        return out


@dataclass
class Verdict:
    unique: bool
    reason: Reason
    partition: List[List[int]]
    components: List[ComponentReport]

    @property
    def indeterminate(self) -> bool:
        return any(c.indeterminate for c in self.components)

    @property
    def traces(self) -> List[ReductionTrace]:
        return [c.trace for c in self.components]

    @property
    def min_gap(self) -> Optional[float]:
        gaps = [c.periodic.gap for c in self.components
                if c.periodic is not None and c.periodic.gap is not None]
        return min(gaps) if gaps else None

    def to_json(self) -> dict:
        return {
            "unique": self.unique,
            "reason": self.reason.to_json(),
            "indeterminate": self.indeterminate,
            "partition": self.partition,
            "components": [c.to_json() for c in self.components],
        }


def verdict_general(sys: GeneralSystem, tol: Tolerances = DEFAULT_TOL,
                    variant: Variant = Variant.MAIN) -> Verdict:
    """Decide uniqueness of a general system component by component.

    The system is unique exactly when every irreducible component is; the
    overall reason is that of the first failing component.
    """
    reduction = reduce_system(sys, tol)
    reports = []
    for outcome in reduction.outcomes:
        if outcome.kind is OutcomeKind.EMPTY_UNIQUE:
            reports.append(ComponentReport(outcome.kind, outcome.trace, True,
                                           Reason(ReasonKind.EMPTY_COMPONENT)))
        elif outcome.kind is OutcomeKind.EARLY_SINGULAR:
            reason = Reason(ReasonKind(outcome.early.kind), outcome.early.to_json())
            reports.append(ComponentReport(outcome.kind, outcome.trace, False, reason))
        else:
            pv = verdict_periodic(outcome.system, tol, variant)
            reports.append(ComponentReport(outcome.kind, outcome.trace, pv.unique, pv.reason,
                                           outcome.system, pv))
    failing = [c for c in reports if not c.unique]
    if failing:
        reason = failing[0].reason
    elif all(c.kind is OutcomeKind.EMPTY_UNIQUE for c in reports):
        reason = Reason(ReasonKind.EMPTY_COMPONENT)
    else:
        reason = Reason(ReasonKind.DISJOINT_SPECTRA)
    return Verdict(not failing, reason, reduction.partition, reports)


def conjugate_product_criterion(A, D, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Uniqueness for ``A X - conj(X) D = E`` from the spectra of ``conj(A) A`` and ``conj(D) D``."""
    A = np.asarray(A, dtype=complex)
    D = np.asarray(D, dtype=complex)
    disjoint, _ = spectra_disjoint(np.linalg.eigvals(np.conj(A) @ A),
                                   np.linalg.eigvals(np.conj(D) @ D), tol)
    return disjoint


def sign_flip_dimension_check(sys: PeriodicSystem, tol: Tolerances = DEFAULT_TOL) -> Tuple[int, int]:
    """Real solution dimensions of the minus- and plus-signed versions of ``sys``.

    Only defined for an even cycle with plain closing link or an odd cycle
    with conjugated closing link, where the two dimensions coincide.
    """
    if not ((sys.r % 2 == 0 and not sys.conj) or (sys.r % 2 == 1 and sys.conj)):
        raise PreconditionError(
            f"sign flip needs r even with plain link or r odd with conjugated link "
            f"(got r={sys.r}, conj={sys.conj})")
    return (oracle_solution_dimension(sys.to_general(-1), tol),
            oracle_solution_dimension(sys.to_general(+1), tol))
