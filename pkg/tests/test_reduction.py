from dataclasses import replace
from functools import reduce as fold
from operator import xor

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sylvuniq.exceptions import StructureError
from sylvuniq.instances import GenSpec, counterexample_fixture, random_system
from sylvuniq.model import GeneralSystem
from sylvuniq.oracle import oracle_solution_dimension
from sylvuniq.reduction import (OutcomeKind, check_counts, normalize_conjugations,
                                partition_irreducible, prune_single_occurrence, reduce_system,
                                to_periodic)
from sylvuniq.uniqueness import verdict_general

from helpers import scalar_eq, scalar_system


def _terminal_parity(sys):
    return fold(xor, (e.left.conj ^ e.right.conj for e in sys.equations), False)


class TestPartition:
    def test_disjoint_unknowns(self):
        sys = scalar_system(scalar_eq(1, 1, 1, 1, 1, 2), scalar_eq(1, 1, 1, 1, 3, 4))
        comps, part = partition_irreducible(sys)
        assert part == [[0], [1]] and len(comps) == 2

    def test_counterexample_is_one_component(self):
        _, part = partition_irreducible(counterexample_fixture("first"))
        assert part == [[0, 1]]

    def test_single_equation(self):
        _, part = partition_irreducible(scalar_system(scalar_eq(2, 1, 1, 3, 1, 1)))
        assert part == [[0]]

    def test_interleaved(self):
        sys = scalar_system(scalar_eq(1, 1, 1, 1, 1, 7), scalar_eq(1, 1, 1, 1, 3, 4),
                            scalar_eq(1, 1, 1, 1, 7, 1), scalar_eq(1, 1, 1, 1, 4, 3))
        _, part = partition_irreducible(sys)
        assert part == [[0, 2], [1, 3]]


class TestPrune:
    def test_chain(self):
        sys = scalar_system(scalar_eq(1, 1, 1, 1, 1, 2), scalar_eq(1, 1, 1, 1, 2, 3),
                            scalar_eq(1, 1, 1, 1, 3, 2))
        p = prune_single_occurrence(sys)
        assert p.early is None and p.kept == [1, 2]
        assert [(x.equation, x.unknown, x.slot) for x in p.removals] == [(0, 1, "left")]
        assert p.removals[0].checks == {"A": True, "B": True}

    def test_singular_pruned_coefficient(self):
        sys = scalar_system(scalar_eq(0, 1, 1, 1, 1, 2), scalar_eq(1, 1, 1, 1, 2, 3),
                            scalar_eq(1, 1, 1, 1, 3, 2))
        p = prune_single_occurrence(sys)
        assert p.early is not None
        assert (p.early.kind, p.early.equation, p.early.which) == ("noninvertible_pruned_coefficient", 0, "A")

    def test_right_slot_checks_C_and_D(self):
        sys = scalar_system(scalar_eq(1, 1, 1, 0, 2, 1), scalar_eq(1, 1, 1, 1, 2, 2))
        p = prune_single_occurrence(sys)
        assert p.early.which == "D"
        assert p.removals[0].slot == "right"

    def test_fixpoint(self):
        sys = counterexample_fixture("first")
        p = prune_single_occurrence(sys)
        assert p.removals == [] and p.kept == [0, 1]

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 5), st.integers(0, 5), st.integers(0, 2**32 - 1))
    def test_terminates_within_equation_count(self, r, chain, seed):
        sys = random_system(GenSpec(m=1, n=1, r=r, chain=chain, scramble=True, seed=seed))
        p = prune_single_occurrence(sys)
        assert p.iterations <= len(sys)
        assert p.early is None and len(p.kept) == r


class TestCounts:
    def test_balanced(self):
        assert check_counts(counterexample_fixture("first")) is None

    def test_overdetermined(self):
        sys = scalar_system(scalar_eq(1, 1, 1, 1, 1, 2), scalar_eq(1, 1, 1, 1, 2, 1),
                            scalar_eq(1, 1, 2, 1, 1, 2))
        e = check_counts(sys)
        assert e.kind == "count_mismatch" and (e.unknowns, e.equations) == (2, 3)

    def test_empty_system_is_empty_unique(self):
        red = reduce_system(GeneralSystem(1, 1, []))
        assert [o.kind for o in red.outcomes] == [OutcomeKind.EMPTY_UNIQUE]

    def test_underdetermined_counted_before_pruning(self):
        # one equation, two once-occurring unknowns: a free unknown, never unique
        red = reduce_system(scalar_system(scalar_eq(1, 1, 1, 1, 1, 2)))
        assert red.outcomes[0].kind is OutcomeKind.EARLY_SINGULAR
        assert red.outcomes[0].early.kind == "count_mismatch"


class TestCycle:
    def test_self_loop(self):
        raw = to_periodic(scalar_system(scalar_eq(2, 3, 5, 7, 1, 1)))
        assert raw.r == 1 and raw.swapped == [False]

    def test_backwards_equation_is_flipped(self):
        sys = scalar_system(scalar_eq(1, 2, 3, 4, 1, 2), scalar_eq(5, 6, 7, 8, 1, 2))
        raw = to_periodic(sys)
        assert raw.swapped == [False, True]
        assert raw.unknowns == [1, 2]
        # second equation walked as 7 x2 8 - 5 x1 6
        assert raw.A[1][0, 0] == 7 and raw.D[1][0, 0] == 6

    def test_counterexample(self):
        raw = to_periodic(counterexample_fixture("first"))
        assert raw.r == 2 and raw.swapped == [False, False] and raw.order == [0, 1]

    def test_not_a_cycle(self):
        sys = scalar_system(scalar_eq(1, 1, 1, 1, 1, 1), scalar_eq(1, 1, 1, 1, 2, 2))
        with pytest.raises(StructureError):
            to_periodic(sys)


class TestNormalize:
    def _raw(self, flags, r=2, seed=0):
        return to_periodic(random_system(GenSpec(m=2, n=2, r=r, conj=flags, seed=seed)))

    def test_all_plain_is_identity(self):
        raw = self._raw("plain", r=3)
        p, parities, conjugated = normalize_conjugations(raw)
        assert not p.conj and not any(parities) and not any(conjugated)
        for k in range(3):
            np.testing.assert_array_equal(p.A[k], raw.A[k])

    def test_single_equation_conjugated_left(self):
        sys = scalar_system(scalar_eq(1j, 2, 3 + 1j, 4, 1, 1, lconj=True))
        p, _, conjugated = normalize_conjugations(to_periodic(sys))
        assert conjugated == [True] and p.conj
        assert p.A[0][0, 0] == -1j and p.C[0][0, 0] == 3 - 1j

    def test_mixed_flags_follow_recurrence(self):
        # (s1, t1, s2, t2) = (plain, conj, conj, plain)
        flags = ((False, True), (True, False))
        raw = self._raw(flags)
        p, parities, conjugated = normalize_conjugations(raw)
        assert parities == [False, True]
        assert conjugated == [False, False]
        assert not p.conj
        sys = random_system(GenSpec(m=2, n=2, r=2, conj=flags, seed=0))
        assert oracle_solution_dimension(sys) == oracle_solution_dimension(p.to_general())

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 5), st.integers(0, 2**32 - 1))
    def test_terminal_is_parity(self, r, seed):
        sys = random_system(GenSpec(m=1, n=2, r=r, conj="random", scramble=True, seed=seed))
        out = reduce_system(sys).outcomes[0]
        assert out.trace.terminal_conj == _terminal_parity(sys)
        assert out.trace.conj_parities[0] is False
        assert sorted(out.trace.relabel.values()) == list(range(1, r + 1))


class TestPipeline:
    def test_solution_preservation(self):
        checked = early = 0
        for seed in range(120):
            rng = np.random.default_rng(seed)
            spec = GenSpec(m=int(rng.integers(1, 3)), n=int(rng.integers(1, 3)),
                           r=int(rng.integers(1, 4)), chain=int(rng.integers(0, 4)),
                           scramble=True, plant="shared" if seed % 4 == 0 else None, seed=seed)
            sys = random_system(spec)
            out = reduce_system(sys).outcomes
            assert len(out) == 1
            if out[0].kind is OutcomeKind.EARLY_SINGULAR:
                early += 1
                assert oracle_solution_dimension(sys) > 0
                continue
            assert len(out[0].trace.pruned) == spec.chain
            assert oracle_solution_dimension(sys) == oracle_solution_dimension(out[0].system.to_general())
            checked += 1
        assert checked >= 100

    def test_idempotent(self):
        for seed in range(30):
            sys = random_system(GenSpec(m=2, n=1, r=1 + seed % 4, chain=seed % 3, scramble=True,
                                        seed=seed))
            first = reduce_system(sys).outcomes[0].system
            again = reduce_system(first.to_general()).outcomes[0].system
            assert again == first

    def test_components_in_partition_order(self):
        sys = scalar_system(scalar_eq(1, 1, 1, 1, 3, 3), scalar_eq(2, 1, 1, 1, 1, 1, rconj=True))
        red = reduce_system(sys)
        assert red.partition == [[0], [1]]
        assert [o.system.conj for o in red.outcomes] == [False, True]

    def test_rhs_is_ignored(self):
        sys = scalar_system(scalar_eq(2, 1, 1, 1, 1, 1, rconj=True, e=3))
        assert reduce_system(sys).outcomes[0].kind is OutcomeKind.PERIODIC

    @pytest.mark.parametrize("seed", range(10))
    def test_verdict_independent_of_labels_and_orientation(self, seed):
        base = GenSpec(m=2, n=2, r=3, conj="random", seed=seed)
        plain = verdict_general(random_system(base)).unique
        assert verdict_general(random_system(replace(base, scramble=True))).unique == plain
        assert verdict_general(random_system(replace(base, plant="shared", scramble=True))).unique is False
