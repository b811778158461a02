"""Seeded agreement trials: pencil verdicts against the vectorization oracle."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .instances import GenSpec, draw_filtered
from .model import GeneralSystem, system_to_json
from .numeric import DEFAULT_TOL, Tolerances, match_spectra, spectrum_inverse
from .oracle import oracle_nonsingular
from .pencils import Variant, build_conj_pencils, build_doubled_system, build_plain_pencils
from .uniqueness import Verdict, verdict_general, verdict_periodic_plain, verdict_periodic_conj

__all__ = ["TrialResult", "Summary", "trial_seed", "trial_spec", "run_trial", "run_verification"]

# fraction of trials per kind: index % 5 == 0 planted, == 1 chained, otherwise plain random
_KINDS = ("planted", "chain", "random", "random", "random")


def trial_seed(master: int, index: int) -> int:
    """Per-trial seed, independent of the trial count and evaluation order."""
    return int(np.random.SeedSequence(master, spawn_key=(index,)).generate_state(1)[0])


def trial_spec(index: int, master: int, max_m: int = 4, max_n: int = 4, max_r: int = 5) -> GenSpec:
    seed = trial_seed(master, index)
    rng = np.random.default_rng(seed)
    kind = _KINDS[index % len(_KINDS)]
    return GenSpec(
        m=int(rng.integers(1, max_m + 1)),
        n=int(rng.integers(1, max_n + 1)),
        r=int(rng.integers(1, max_r + 1)),
        conj="random",
        plant="shared" if kind == "planted" else None,
        chain=int(rng.integers(1, 4)) if kind == "chain" else 0,
        scramble=bool(kind == "chain" or rng.random() < 0.5),
        seed=seed,
    )


@dataclass
class TrialResult:
    index: int
    kind: str
    spec: GenSpec
    attempts: int
    oracle_unique: bool
    verdicts: Dict[str, bool]
    variants_agree: bool
    alt3_inverse_err: Optional[float]
    conj_components: int
    doubling_identical: bool
    doubling_agree: bool
    system: GeneralSystem = field(repr=False)

    @property
    def agree(self) -> bool:
        return self.verdicts[Variant.MAIN.value] == self.oracle_unique

    @property
    def ok(self) -> bool:
        alt3 = self.alt3_inverse_err is None or self.alt3_inverse_err < 1e-8
        return (self.agree and self.variants_agree and alt3
                and self.doubling_identical and self.doubling_agree)

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "kind": self.kind,
            "seed": self.spec.seed,
            "attempts": self.attempts,
            "oracle_unique": self.oracle_unique,
            "verdicts": self.verdicts,
            "variants_agree": self.variants_agree,
            "alt3_inverse_err": self.alt3_inverse_err,
            "conj_components": self.conj_components,
            "doubling_identical": self.doubling_identical,
            "doubling_agree": self.doubling_agree,
            "ok": self.ok,
        }


def _alt3_inverse_err(main: Verdict, alt3: Verdict) -> Optional[float]:
    worst = None
    for cm, c3 in zip(main.components, alt3.components):
        if cm.periodic is None or c3.periodic is None or cm.system is None:
            continue
        if cm.system.r == 1 and not cm.system.conj:
            continue  # single plain equation uses the same pencils for every variant
        for sm, s3 in zip(cm.periodic.spectra, c3.periodic.spectra):
            if sm is None or s3 is None:
                continue
            err = float(np.max(match_spectra(spectrum_inverse(sm), s3), initial=0.0))
            worst = err if worst is None else max(worst, err)
    return worst


def run_trial(index: int, master: int, max_m: int = 4, max_n: int = 4, max_r: int = 5,
              tol: Tolerances = DEFAULT_TOL) -> TrialResult:
    spec = trial_spec(index, master, max_m, max_n, max_r)
    last: Dict[Variant, Verdict] = {}

    def accept(system):
        last.clear()
        last.update({v: verdict_general(system, tol, v) for v in Variant})
        return not any(vd.indeterminate for vd in last.values())

    system, attempts = draw_filtered(spec, tol, accept=accept)
    verdicts = dict(last)
    main = verdicts[Variant.MAIN]

    conj_components = 0
    identical = agree = True
    for comp in main.components:
        psys = comp.system
        if psys is None or not psys.conj:
            continue
        conj_components += 1
        P, Q = build_conj_pencils(psys)
        Pd, Qd = build_plain_pencils(build_doubled_system(psys))
        identical &= P.identical_to(Pd) and Q.identical_to(Qd)
        direct = verdict_periodic_conj(psys, tol, cross_check=False)
        doubled = verdict_periodic_plain(build_doubled_system(psys), tol)
        agree &= direct.unique == doubled.unique

    return TrialResult(
        index=index,
        kind=_KINDS[index % len(_KINDS)],
        spec=spec,
        attempts=attempts,
        oracle_unique=oracle_nonsingular(system, tol),
        verdicts={v.value: vd.unique for v, vd in verdicts.items()},
        variants_agree=len({vd.unique for vd in verdicts.values()}) == 1,
        alt3_inverse_err=_alt3_inverse_err(main, verdicts[Variant.ALT_III]),
        conj_components=conj_components,
        doubling_identical=bool(identical),
        doubling_agree=bool(agree),
        system=system,
    )


@dataclass
class Summary:
    trials: List[TrialResult]

    @property
    def disagreements(self) -> List[TrialResult]:
        return [t for t in self.trials if not t.ok]

    @property
    def passed(self) -> bool:
        return not self.disagreements

    def counts(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for t in self.trials:
            out[t.kind] = out.get(t.kind, 0) + 1
        out["oracle_singular"] = sum(not t.oracle_unique for t in self.trials)
        out["conj_terminal_components"] = sum(t.conj_components for t in self.trials)
        out["disagreements"] = len(self.disagreements)
        return out

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "counts": self.counts(),
            "counterexamples": [
                {**t.to_json(), "system": system_to_json(t.system)} for t in self.disagreements
            ],
        }


def _run_one(args):
    return run_trial(*args)


def run_verification(trials: int, seed: int, max_m: int = 4, max_n: int = 4, max_r: int = 5,
                     tol: Tolerances = DEFAULT_TOL, jobs: int = 1) -> Summary:
    """Run ``trials`` seeded agreement trials; results are ordered by trial index."""
    args = [(i, seed, max_m, max_n, max_r, tol) for i in range(trials)]
    if jobs > 1 and trials > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, args))
    else:
        results = [_run_one(a) for a in args]
    return Summary(results)
