from dataclasses import replace

import numpy as np
import pytest

from sylvuniq.exceptions import PreconditionError
from sylvuniq.instances import (Fact, GenSpec, build_retracted_pencils, counterexample_facts,
                                counterexample_fixture, counterexample_periodic, draw_filtered,
                                planted_singular, random_system)
from sylvuniq.model import GeneralEquation, GeneralSystem
from sylvuniq.oracle import oracle_nonsingular, oracle_solution_dimension
from sylvuniq.reduction import reduce_system
from sylvuniq.uniqueness import ReasonKind, decide_pencils, verdict_general

from helpers import scalar_eq, scalar_periodic, scalar_system


class TestFixtures:
    def test_first_matrices(self):
        e1, e2 = counterexample_fixture("first").equations
        np.testing.assert_array_equal(e1.B, [[0, 0], [1, 0]])
        np.testing.assert_array_equal(e2.B, [[0, 1], [0, 0]])
        np.testing.assert_array_equal(e1.D, [[1, 0], [0, 0]])
        for X in (e1.A, e2.A, e1.C, e2.C, e2.D):
            np.testing.assert_array_equal(X, np.eye(2))

    def test_second_swaps_B(self):
        e1, e2 = counterexample_fixture("second").equations
        np.testing.assert_array_equal(e1.B, [[0, 1], [0, 0]])
        np.testing.assert_array_equal(e2.B, [[0, 0], [1, 0]])

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            counterexample_fixture("third")

    def test_retracted_determinants(self):
        P, Q = build_retracted_pencils(counterexample_periodic("first"))
        for lam in (0.3, -2.0, 1 + 1j):
            assert abs(np.linalg.det(P(lam)) - (lam ** 2 - 1) ** 2) < 1e-12
            assert abs(np.linalg.det(Q(lam)) + lam ** 2) < 1e-12
        assert decide_pencils(P, Q).unique
        assert oracle_solution_dimension(counterexample_fixture("first")) == 8

    def test_retracted_agrees_on_symmetric_instance(self):
        s = scalar_periodic([1, 1], [1, 1], [1, 1], [1, 1])
        assert not decide_pencils(*build_retracted_pencils(s)).unique
        assert not verdict_general(s.to_general()).unique

    def test_retracted_preconditions(self):
        with pytest.raises(PreconditionError):
            build_retracted_pencils(scalar_periodic([1], [1], [1], [1]))

    def test_facts_hold(self):
        facts = counterexample_facts()
        assert len(facts) == 4
        assert all(f.ok for f in facts), [f.to_json() for f in facts if not f.ok]
        assert all(type(f.ok) is bool for f in facts)

    def test_tampered_fixture_breaks_facts(self):
        e1, e2 = counterexample_fixture("first").equations
        tampered = GeneralSystem(2, 2, [e1, GeneralEquation(e2.A, e2.B, e2.C, 2 * e2.D, e2.left, e2.right)])
        assert not all(f.ok for f in counterexample_facts(first=tampered))
        assert not all(f.ok for f in counterexample_facts(second=counterexample_fixture("first")))

    def test_fact_json(self):
        f = Fact("x", np.bool_(True), {"flag": np.bool_(False)})
        assert f.to_json() == {"name": "x", "ok": True, "flag": False}


class TestRandom:
    def test_deterministic(self):
        spec = GenSpec(m=2, n=2, r=3, conj="random", seed=7)
        assert random_system(spec) == random_system(spec)
        assert not random_system(spec) == random_system(replace(spec, seed=8))

    def test_spec_validation(self):
        for kw in ({"m": 0}, {"chain": -1}, {"plant": "other"}, {"conj": "sometimes"},
                   {"r": 2, "conj": ((False, False),)}):
            with pytest.raises(ValueError):
                GenSpec(**kw)

    def test_terminal_single_equation(self):
        sys = random_system(GenSpec(m=1, n=1, r=1, conj="terminal", seed=3))
        (eq,) = sys.equations
        assert eq.left.index == eq.right.index == 1
        assert not eq.left.conj and eq.right.conj

    @pytest.mark.parametrize("seed", range(10))
    def test_chain_two(self, seed):
        spec = GenSpec(m=2, n=2, r=3, chain=2, scramble=True, seed=seed)
        sys = random_system(spec)
        red = reduce_system(sys)
        assert len(red.outcomes) == 1 and len(red.outcomes[0].trace.pruned) == 2
        bare = random_system(replace(spec, chain=0, scramble=False))
        assert verdict_general(sys).unique == verdict_general(bare).unique

    def test_chain_keeps_cycle_coefficients(self):
        spec = GenSpec(m=2, n=1, r=2, chain=3, seed=5)
        chained = random_system(spec)
        bare = random_system(replace(spec, chain=0))
        assert GeneralSystem(2, 1, chained.equations[:2]) == bare

    def test_singular_fraction_small(self):
        singular = 0
        for seed in range(1000):
            rng = np.random.default_rng(seed)
            spec = GenSpec(m=int(rng.integers(1, 5)), n=int(rng.integers(1, 5)),
                           r=int(rng.integers(1, 6)), seed=seed)
            singular += not oracle_nonsingular(random_system(spec))
        assert singular / 1000 < 0.05


class TestPlanted:
    def test_requires_plant(self):
        with pytest.raises(PreconditionError):
            planted_singular(GenSpec())

    def test_scalar_plain(self):
        sys = scalar_system(scalar_eq(2, 3, 2, 3, 1, 2), scalar_eq(5, 7, 5, 7, 2, 1))
        assert oracle_solution_dimension(sys) >= 2
        assert not verdict_general(sys).unique

    def test_scalar_conj(self):
        sys = scalar_system(scalar_eq(1, 1, 1, 1, 1, 1, rconj=True))
        assert oracle_solution_dimension(sys) == 1

    @pytest.mark.parametrize("seed", range(15))
    def test_planted_is_singular(self, seed):
        rng = np.random.default_rng(seed)
        spec = GenSpec(m=int(rng.integers(1, 4)), n=int(rng.integers(1, 4)), r=int(rng.integers(1, 5)),
                       plant="shared", chain=seed % 3, scramble=bool(seed % 2), seed=seed)
        sys = planted_singular(spec)
        assert not oracle_nonsingular(sys)
        v = verdict_general(sys)
        assert not v.unique
        assert v.reason.kind in (ReasonKind.SHARED_EIGENVALUE, ReasonKind.SINGULAR_PENCIL)

    def test_planted_solution_exhibited(self):
        sys = planted_singular(GenSpec(m=2, n=3, r=3, conj="random", plant="shared", seed=1))
        X = np.random.default_rng(0).standard_normal((2, 3))  # real, so conjugation is harmless
        for eq in sys.equations:
            np.testing.assert_allclose(eq.A @ X @ eq.B - eq.C @ X @ eq.D, 0, atol=1e-14)


class TestFiltered:
    def test_accepts_first_clean_draw(self):
        sys, attempts = draw_filtered(GenSpec(seed=3))
        assert attempts == 1 and sys == random_system(GenSpec(seed=3))

    def test_redraws_when_rejected(self):
        seen = []

        def accept(system):
            seen.append(system)
            return len(seen) == 3

        sys, attempts = draw_filtered(GenSpec(seed=3), accept=accept)
        assert attempts == 3 and sys is seen[-1]
        assert not seen[0] == seen[1]

    def test_gives_up(self):
        with pytest.raises(RuntimeError):
            draw_filtered(GenSpec(seed=3), max_attempts=2, accept=lambda s: False)
