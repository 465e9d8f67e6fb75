"""Attacker knowledge: recipes, satisfaction, and static equivalence.

A recipe is a message built from disclosed aliases, public names, and the
signature's function symbols.  A frame satisfies an equality of recipes
when both sides normalise to the same message after substituting the frame.
Static equivalence of two frames (up to an alias bijection) is decided over
the finite recipe universe of a given depth by partitioning recipes by
their normal form on each side and comparing the partitions.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .terms import (
    Alias,
    AliasMap,
    App,
    Message,
    Symbol,
    Theory,
    Var,
    apply_msg_subst,
    msg_key,
)


def recipe_enum(
    aliases: frozenset[Alias],
    consts: frozenset[str],
    signature: tuple[Symbol, ...],
    depth: int,
    theory: Theory,
    limit: int = 200_000,
) -> list[Message]:
    """All recipes up to the given application depth, deduplicated modulo
    the theory (aliases treated as opaque constants).  The first recipe in
    enumeration order is kept as the representative of its class."""
    cache = theory.__dict__.setdefault("_recipe_cache", {})
    cache_key = (frozenset(aliases), frozenset(consts), tuple(signature), depth, limit)
    hit = cache.get(cache_key)
    if hit is not None:
        return hit
    atoms: list[Message] = sorted(aliases, key=msg_key)
    atoms += [Var(c) for c in sorted(consts)]
    seen: set = set()
    out: list[Message] = []

    def add(r: Message) -> None:
        nf = theory.normalize(r)
        if nf not in seen:
            seen.add(nf)
            out.append(r)
            if len(out) > limit:
                raise RecipeLimitExceeded(f"more than {limit} recipes at depth {depth}")

    for a in atoms:
        add(a)
    symbols = sorted(set(signature), key=lambda s: (s.name, s.arity))
    for _ in range(depth):
        start = len(out)
        pool = list(out)
        for sym in symbols:
            if sym.arity == 0:
                continue
            for args in product(pool, repeat=sym.arity):
                add(App(sym, args))
        if len(out) == start:
            break
    cache[cache_key] = out
    return out


class RecipeLimitExceeded(Exception):
    pass


def satisfies(frame, m: Message, n: Message, theory: Theory) -> bool:
    """Whether the frame satisfies the recipe equality ``m = n``."""
    return theory.equal(apply_msg_subst(m, frame), apply_msg_subst(n, frame))


@dataclass(frozen=True)
class StaticWitness:
    m: Message
    n: Message
    holds_left: bool
    holds_right: bool


def _scan(
    frame_a,
    frame_b,
    rho: AliasMap,
    recipes,
    theory: Theory,
    both_directions: bool,
) -> StaticWitness | None:
    rep_a: dict = {}
    rep_b: dict = {}
    for r in recipes:
        nf_a = theory.normalize(apply_msg_subst(r, frame_a))
        nf_b = theory.normalize(apply_msg_subst(rho(r), frame_b))
        prev = rep_a.get(nf_a)
        if prev is None:
            rep_a[nf_a] = (r, nf_b)
        elif prev[1] != nf_b:
            return StaticWitness(prev[0], r, True, False)
        if both_directions:
            prev = rep_b.get(nf_b)
            if prev is None:
                rep_b[nf_b] = (r, nf_a)
            elif prev[1] != nf_a:
                return StaticWitness(prev[0], r, False, True)
    return None


def static_equiv_witness(
    frame_a,
    frame_b,
    rho: AliasMap,
    consts: frozenset[str],
    signature: tuple[Symbol, ...],
    depth: int,
    theory: Theory,
) -> StaticWitness | None:
    """A recipe pair separating the frames up to ``rho``, or ``None`` when
    they are statically equivalent at this depth.  The witness is minimal in
    the deterministic enumeration order."""
    recipes = recipe_enum(frame_a.domain, consts, signature, depth, theory)
    return _scan(frame_a, frame_b, rho, recipes, theory, both_directions=True)


def static_impl_witness(
    frame_a,
    frame_b,
    rho: AliasMap,
    consts: frozenset[str],
    signature: tuple[Symbol, ...],
    depth: int,
    theory: Theory,
) -> StaticWitness | None:
    """One-directional variant: a pair satisfied by the left frame but not
    by the right, or ``None``."""
    recipes = recipe_enum(frame_a.domain, consts, signature, depth, theory)
    return _scan(frame_a, frame_b, rho, recipes, theory, both_directions=False)
