#!/usr/bin/env python3
"""Verify the diamond property over every process in the built-in corpus.

Builds the reachable labelled transition system for each corpus side and
checks that every pair of independent enabled events commutes to
structurally congruent states. Exits nonzero on the first violation.
"""

import sys

from latspi.corpus import case_theory, load_corpus
from latspi.games import build_signature
from latspi.lts import default_consts, diamond_check, reachable_lts
from latspi.syntax import from_process, parse_process, prime_bangs


def main() -> int:
    seen = set()
    total_states = 0
    for case in load_corpus():
        theory = case_theory(case)
        for src in (case.left, case.right):
            key = (src, case.bounds, case.theory)
            if key in seen:
                continue
            seen.add(key)
            p = prime_bangs(parse_process(src), case.bounds.repl_unfold)
            signature = build_signature(theory, p)
            consts = default_consts(p) | frozenset(case.bounds.extra_consts)
            g = reachable_lts(from_process(p), case.bounds, theory, signature, consts)
            violations = diamond_check(g, case.bounds, theory, signature, consts)
            total_states += len(g.states)
            status = "ok" if not violations else f"{len(violations)} VIOLATIONS"
            print(f"{case.name:<28} {len(g.states):>4} states  {status}")
            if violations:
                print(f"  first: {violations[0]}")
                return 1
    print(f"diamond property holds on all {len(seen)} systems ({total_states} states)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
