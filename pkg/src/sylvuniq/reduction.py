"""Reduction of a general homogeneous system to periodic cycles.

Pipeline per irreducible component:

1. split the system into connected components of the equation/unknown
   incidence graph;
2. reject components whose equation and unknown counts differ;
3. repeatedly drop equations containing an unknown that occurs once,
   after checking the two coefficients multiplying that unknown are
   invertible;
4. walk the remaining cycle, orienting every equation so that it links
   cycle position ``i`` to ``i+1``;
5. substitute conjugated unknowns so that at most the closing link is
   conjugated.

Equation indices in traces are 0-based positions in the input system.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .exceptions import StructureError
from .model import GeneralEquation, GeneralSystem, PeriodicSystem
from .numeric import DEFAULT_TOL, Tolerances, is_invertible

__all__ = [
    "EarlySingular",
    "PrunedEquation",
    "Pruning",
    "RawCycle",
    "ReductionTrace",
    "OutcomeKind",
    "ComponentOutcome",
    "Reduction",
    "partition_irreducible",
    "prune_single_occurrence",
    "check_counts",
    "to_periodic",
    "normalize_conjugations",
    "reduce_system",
]


@dataclass(frozen=True)
class EarlySingular:
    """Why a component was found singular before any pencil was built.

    ``kind`` is ``"noninvertible_pruned_coefficient"`` (with ``equation`` and
    ``which``) or ``"count_mismatch"`` (with ``unknowns`` and ``equations``).
    """

    kind: str
    equation: Optional[int] = None
    which: Optional[str] = None
    unknowns: Optional[int] = None
    equations: Optional[int] = None

    def to_json(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}


@dataclass(frozen=True)
class PrunedEquation:
    equation: int
    unknown: int
    slot: str
    checks: Dict[str, bool]

    def to_json(self) -> dict:
        return {"equation": self.equation, "unknown": self.unknown,
                "slot": self.slot, "checks": dict(self.checks)}


@dataclass(frozen=True)
class Pruning:
    kept: List[int]
    removals: List[PrunedEquation]
    early: Optional[EarlySingular] = None

    @property
    def iterations(self) -> int:
        return len(self.removals)


@dataclass(frozen=True)
class RawCycle:
    """Cycle-ordered equations ``A_i X_i^{s_i} B_i - C_i X_{i+1}^{t_i} D_i``.

    ``order`` holds the component-local index of each cycle equation,
    ``swapped`` whether its two terms were exchanged, ``unknowns`` the
    original unknown id at each cycle position.
    """

    A: List[np.ndarray]
    B: List[np.ndarray]
    C: List[np.ndarray]
    D: List[np.ndarray]
    s: List[bool]
    t: List[bool]
    order: List[int]
    swapped: List[bool]
    unknowns: List[int]

    @property
    def r(self) -> int:
        return len(self.A)


@dataclass
class ReductionTrace:
    equations: List[int] = field(default_factory=list)
    pruned: List[PrunedEquation] = field(default_factory=list)
    cycle: List[int] = field(default_factory=list)
    swapped: List[bool] = field(default_factory=list)
    relabel: Dict[int, int] = field(default_factory=dict)
    conj_parities: List[bool] = field(default_factory=list)
    conjugated: List[bool] = field(default_factory=list)
    terminal_conj: Optional[bool] = None

    def to_json(self) -> dict:
        return {
            "equations": list(self.equations),
            "pruned": [p.to_json() for p in self.pruned],
            "cycle": list(self.cycle),
            "orientation_swapped": list(self.swapped),
            "relabel": {str(k): v for k, v in self.relabel.items()},
            "conj_parities": list(self.conj_parities),
            "conjugated": list(self.conjugated),
            "terminal": None if self.terminal_conj is None
            else ("conj" if self.terminal_conj else "plain"),
        }


class OutcomeKind(str, enum.Enum):
    PERIODIC = "periodic"
    EARLY_SINGULAR = "early_singular"
    EMPTY_UNIQUE = "empty_unique"


@dataclass
class ComponentOutcome:
    kind: OutcomeKind
    trace: ReductionTrace
    system: Optional[PeriodicSystem] = None
    early: Optional[EarlySingular] = None


@dataclass
class Reduction:
    partition: List[List[int]]
    outcomes: List[ComponentOutcome]


def _slots(eq: GeneralEquation):
    return ((eq.left.index, "left"), (eq.right.index, "right"))


def partition_irreducible(sys: GeneralSystem) -> Tuple[List[GeneralSystem], List[List[int]]]:
    """Split into connected components of the equation/unknown incidence graph.

    Components are listed by their smallest equation index; indices within a
    component are increasing.
    """
    parent: Dict[int, int] = {}

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for eq in sys.equations:
        for u in (eq.left.index, eq.right.index):
            parent.setdefault(u, u)
        a, b = find(eq.left.index), find(eq.right.index)
        if a != b:
            parent[max(a, b)] = min(a, b)

    groups: Dict[int, List[int]] = {}
    for i, eq in enumerate(sys.equations):
        groups.setdefault(find(eq.left.index), []).append(i)
    partition = sorted(groups.values(), key=lambda g: g[0])
    return [sys.subsystem(g) for g in partition], partition


def check_counts(component: GeneralSystem) -> Optional[EarlySingular]:
    """Count mismatch between unknowns and equations, if any.

    An irreducible component with more unknowns than equations always has a
    nontrivial solution; with more equations than unknowns it cannot be
    uniquely solvable for every right-hand side.
    """
    u, e = len(component.unknown_ids), len(component.equations)
    if u != e:
        return EarlySingular("count_mismatch", unknowns=u, equations=e)
    return None


def prune_single_occurrence(component: GeneralSystem, tol: Tolerances = DEFAULT_TOL) -> Pruning:
    """Drop equations holding a once-occurring unknown until none is left.

    Indices in the result refer to positions in ``component``.  The first
    failed invertibility check stops the pruning with an ``EarlySingular``.
    """
    alive = list(range(len(component.equations)))
    removals: List[PrunedEquation] = []
    while True:
        counts: Dict[int, int] = {}
        for i in alive:
            for u, _ in _slots(component.equations[i]):
                counts[u] = counts.get(u, 0) + 1
        hit = None
        for i in alive:
            for u, slot in _slots(component.equations[i]):
                if counts[u] == 1:
                    hit = (i, u, slot)
                    break
            if hit:
                break
        if hit is None:
            return Pruning(alive, removals)
        i, u, slot = hit
        eq = component.equations[i]
        names = ("A", "B") if slot == "left" else ("C", "D")
        checks = {name: is_invertible(getattr(eq, name), tol) for name in names}
        removals.append(PrunedEquation(i, u, slot, checks))
        for name in names:
            if not checks[name]:
                return Pruning(alive, removals,
                               EarlySingular("noninvertible_pruned_coefficient", equation=i, which=name))
        alive.remove(i)


def to_periodic(component: GeneralSystem) -> RawCycle:
    """Orient a component whose unknowns each occur exactly twice into a cycle.

    The walk starts at the smallest unknown id and takes the lower-indexed of
    its two equations first.  An equation met through its right slot is
    negated and its two terms exchanged.
    """
    eqs = component.equations
    r = len(eqs)
    occ: Dict[int, List[Tuple[int, str]]] = {}
    for i, eq in enumerate(eqs):
        for u, slot in _slots(eq):
            occ.setdefault(u, []).append((i, slot))
    if r == 0 or len(occ) != r or any(len(v) != 2 for v in occ.values()):
        raise StructureError("component is not a cycle: need r unknowns each occurring twice")

    start = min(occ)
    u = start
    used = set()
    cyc = RawCycle([], [], [], [], [], [], [], [], [])
    for _ in range(r):
        cands = sorted(i for i, _ in occ[u] if i not in used)
        if not cands:
            raise StructureError("cycle walk got stuck")
        i = cands[0]
        eq = eqs[i]
        swap = eq.left.index != u
        if swap:
            eq = eq.flipped()
        used.add(i)
        cyc.A.append(eq.A)
        cyc.B.append(eq.B)
        cyc.C.append(eq.C)
        cyc.D.append(eq.D)
        cyc.s.append(eq.left.conj)
        cyc.t.append(eq.right.conj)
        cyc.order.append(i)
        cyc.swapped.append(swap)
        cyc.unknowns.append(u)
        u = eq.right.index
    if u != start or len(used) != r:
        raise StructureError("component is not a single cycle")
    return cyc


def normalize_conjugations(raw: RawCycle) -> Tuple[PeriodicSystem, List[bool], List[bool]]:
    """Substitute ``Y_i = X_i`` or ``conj(X_i)`` so only the closing link may be conjugated.

    Returns the periodic system, the parities ``c_i`` (``Y_i = conj(X_i)``
    when set; ``c_1`` is always False) and which equations were conjugated.
    """
    A, B, C, D = [], [], [], []
    parities, conjugated = [], []
    c = False
    terminal = False
    for i in range(raw.r):
        parities.append(c)
        e = raw.s[i] ^ c
        t = raw.t[i]
        if e:
            A.append(np.conj(raw.A[i]))
            B.append(np.conj(raw.B[i]))
            C.append(np.conj(raw.C[i]))
            D.append(np.conj(raw.D[i]))
            t = not t
        else:
            A.append(raw.A[i])
            B.append(raw.B[i])
            C.append(raw.C[i])
            D.append(raw.D[i])
        conjugated.append(e)
        c = t
        terminal = t
    return PeriodicSystem(A, B, C, D, conj=terminal), parities, conjugated


def _reduce_component(sys: GeneralSystem, indices: List[int], tol: Tolerances,
                      pruned_so_far: List[PrunedEquation]) -> List[ComponentOutcome]:
    comp = sys.subsystem(indices)
    trace = ReductionTrace(equations=list(indices), pruned=list(pruned_so_far))

    early = check_counts(comp)
    if early is not None:
        return [ComponentOutcome(OutcomeKind.EARLY_SINGULAR, trace, early=early)]

    pruning = prune_single_occurrence(comp, tol)
    removals = [PrunedEquation(indices[p.equation], p.unknown, p.slot, p.checks)
                for p in pruning.removals]
    trace.pruned.extend(removals)
    if pruning.early is not None:
        e = pruning.early
        early = EarlySingular(e.kind, equation=indices[e.equation], which=e.which)
        return [ComponentOutcome(OutcomeKind.EARLY_SINGULAR, trace, early=early)]

    kept = [indices[i] for i in pruning.kept]
    if not kept:
        return [ComponentOutcome(OutcomeKind.EMPTY_UNIQUE, trace)]

    _, parts = partition_irreducible(sys.subsystem(kept))
    if len(parts) > 1:
        # defensive: removal of a leaf never disconnects, but do not rely on it
        out = []
        for part in parts:
            out.extend(_reduce_component(sys, [kept[i] for i in part], tol, trace.pruned))
        return out

    early = check_counts(sys.subsystem(kept))
    if early is not None:
        return [ComponentOutcome(OutcomeKind.EARLY_SINGULAR, trace, early=early)]

    raw = to_periodic(sys.subsystem(kept))
    periodic, parities, conjugated = normalize_conjugations(raw)
    trace.cycle = [kept[i] for i in raw.order]
    trace.swapped = list(raw.swapped)
    trace.relabel = {u: pos + 1 for pos, u in enumerate(raw.unknowns)}
    trace.conj_parities = parities
    trace.conjugated = conjugated
    trace.terminal_conj = periodic.conj
    return [ComponentOutcome(OutcomeKind.PERIODIC, trace, system=periodic)]


def reduce_system(sys: GeneralSystem, tol: Tolerances = DEFAULT_TOL) -> Reduction:
    """Run the full reduction on the homogeneous part of ``sys``."""
    sys = sys.homogeneous()
    if not sys.equations:
        return Reduction([], [ComponentOutcome(OutcomeKind.EMPTY_UNIQUE, ReductionTrace())])
    _, partition = partition_irreducible(sys)
    outcomes: List[ComponentOutcome] = []
    for part in partition:
        outcomes.extend(_reduce_component(sys, part, tol, []))
    return Reduction(partition, outcomes)
