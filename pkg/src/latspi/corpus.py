"""Example corpus: process pairs with expected verdict classes.

Each case names two process sources, a relation, exploration bounds, a
rewriting theory preset, and the expected verdict class: exactly related,
related within bounds only, or distinguished.  The runner executes every
case, cross-checks distinguishing witnesses by replay, and produces a
deterministic machine-readable report.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass
from importlib import resources

from .games import Rel, Verdict, check, witness_replay
from .lts import ExplorationBounds
from .syntax import parse_process
from .terms import EMPTY_THEORY, Theory, dolev_yao

RELATED_EXACT = "RELATED_EXACT"
RELATED_BOUNDED = "RELATED_BOUNDED"
DISTINGUISHED = "DISTINGUISHED"


@dataclass(frozen=True)
class CorpusCase:
    name: str
    left: str
    right: str
    relation: Rel
    expected: str
    bounds: ExplorationBounds
    theory: str = "empty"  # "empty" or "dolev-yao"
    st_exhaustive: bool = False


def case_theory(case: CorpusCase) -> Theory:
    if case.theory == "dolev-yao":
        return dolev_yao()
    if case.theory == "empty":
        return EMPTY_THEORY
    raise ValueError(f"unknown theory preset: {case.theory}")


def bounds_from_dict(d: dict) -> ExplorationBounds:
    return ExplorationBounds(
        recipe_depth=d.get("recipe_depth", 2),
        static_depth=d.get("static_depth", 2),
        repl_unfold=d.get("repl_unfold", 2),
        game_depth=d.get("game_depth", 12),
        state_budget=d.get("state_budget", 100_000),
        extra_consts=tuple(d.get("extra_consts", ())),
    )


def case_from_dict(d: dict) -> CorpusCase:
    return CorpusCase(
        name=d["name"],
        left=d["left"],
        right=d["right"],
        relation=Rel(d["relation"]),
        expected=d["expected"],
        bounds=bounds_from_dict(d.get("bounds", {})),
        theory=d.get("theory", "empty"),
        st_exhaustive=d.get("st_exhaustive", False),
    )


def load_corpus(path: str | None = None) -> list[CorpusCase]:
    """The built-in corpus, or the cases stored in a JSON file."""
    if path is None:
        text = resources.files(__package__).joinpath("corpus_data/corpus.json").read_text()
    else:
        with open(path) as f:
            text = f.read()
    return [case_from_dict(d) for d in json.loads(text)["cases"]]


def verdict_class(v: Verdict) -> str:
    if not v.related:
        return DISTINGUISHED
    return RELATED_EXACT if v.exact else RELATED_BOUNDED


@dataclass
class CaseResult:
    name: str
    expected: str
    actual: str
    ok: bool
    replay_ok: bool | None
    seconds: float
    error: str | None = None


def run_case(case: CorpusCase) -> tuple[CaseResult, Verdict | None]:
    t0 = time.perf_counter()
    try:
        left = parse_process(case.left)
        right = parse_process(case.right)
        theory = case_theory(case)
        verdict = check(
            case.relation,
            left,
            right,
            case.bounds,
            theory,
            st_exhaustive=case.st_exhaustive,
        )
        actual = verdict_class(verdict)
        replay_ok = None
        if actual == DISTINGUISHED:
            replay_ok = witness_replay(verdict, left, right, theory)
        ok = actual == case.expected and replay_ok in (None, True)
        return (
            CaseResult(case.name, case.expected, actual, ok, replay_ok, time.perf_counter() - t0),
            verdict,
        )
    except Exception as exc:  # a broken case is a failure, not a crash
        return (
            CaseResult(
                case.name, case.expected, "ERROR", False, None, time.perf_counter() - t0, repr(exc)
            ),
            None,
        )


def run_corpus(path: str | None = None, names: set[str] | None = None) -> dict:
    """Run corpus cases and report pass/fail per case with timings."""
    cases = load_corpus(path)
    if names is not None:
        cases = [c for c in cases if c.name in names]
    results = []
    for case in cases:
        result, _ = run_case(case)
        results.append(result)
    return {
        "total": len(results),
        "passed": sum(1 for r in results if r.ok),
        "failed": sum(1 for r in results if not r.ok),
        "cases": [asdict(r) for r in results],
    }
