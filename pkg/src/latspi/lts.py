"""Located transition semantics for extended processes.

Transitions are computed in two layers.  The structural layer walks the
process term and produces prefix firings tagged with locations: a location
is a pair of a parallel prefix (a bitstring tracing the parallel structure)
and a choice part (a bitstring tracing guarded choices).  Internal steps
from synchronisation carry a pair of locations.  The top layer turns
structural firings into environment-facing events: output payloads are
hidden behind located aliases extending the frame, and channels and input
payloads become recipes over the frame domain and the public names.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from . import knowledge
from .terms import (
    Alias,
    Message,
    Symbol,
    Theory,
    Var,
    apply_msg_subst,
    free_aliases,
    free_vars,
    msg_key,
    rename_vars,
)
from .syntax import (
    Bang,
    ExtendedProcess,
    In,
    Match,
    Mismatch,
    New,
    Nil,
    Out,
    Par,
    Process,
    Sum,
    alpha_canonical,
    all_names,
    congruence_key,
    free_names,
    fresh_supply,
    struct_congruent,
    subst_proc,
)


# --- locations and events --------------------------------------------------


@dataclass(frozen=True)
class Location:
    """Parallel prefix plus choice part, both bitstrings."""

    prefix: str
    choice: str

    def __str__(self):
        return f"{self.prefix}[{self.choice}]"


@dataclass(frozen=True)
class PairLoc:
    """Location label of a synchronisation: one location per participant."""

    left: Location
    right: Location

    def __str__(self):
        return f"({self.left}, {self.right})"


LocationLabel = Location | PairLoc


@dataclass(frozen=True)
class OutLabel:
    chan: Message
    alias: Alias

    def __str__(self):
        return f"^{self.chan}({self.alias})"


@dataclass(frozen=True)
class InLabel:
    chan: Message
    payload: Message

    def __str__(self):
        return f"{self.chan}({self.payload})"


@dataclass(frozen=True)
class TauLabel:
    def __str__(self):
        return "tau"


ActionLabel = OutLabel | InLabel | TauLabel


def label_aliases(a: ActionLabel) -> frozenset[Alias]:
    """Free aliases of an action label.  The alias bound by an output is a
    binder of the label, not a free occurrence."""
    if isinstance(a, OutLabel):
        return free_aliases(a.chan)
    if isinstance(a, InLabel):
        return free_aliases(a.chan) | free_aliases(a.payload)
    return frozenset()


@dataclass(frozen=True)
class Event:
    action: ActionLabel
    loc: LocationLabel

    def __str__(self):
        return f"({self.action}, {self.loc})"


def loc_key(u: LocationLabel):
    if isinstance(u, Location):
        return (0, u.prefix, u.choice)
    return (1, (u.left.prefix, u.left.choice), (u.right.prefix, u.right.choice))


def action_key(a: ActionLabel):
    if isinstance(a, TauLabel):
        return (0,)
    if isinstance(a, InLabel):
        return (1, msg_key(a.chan), msg_key(a.payload))
    return (2, msg_key(a.chan), (a.alias.prefix, a.alias.stem))


def event_key(e: Event):
    return (loc_key(e.loc), action_key(e.action))


# --- bounds ----------------------------------------------------------------


@dataclass(frozen=True)
class ExplorationBounds:
    """Finitisation knobs for exploration and games.

    ``recipe_depth`` bounds recipes used as channels and input payloads,
    ``static_depth`` bounds recipes tried by static-equivalence tests,
    ``repl_unfold`` bounds unfoldings per replication occurrence,
    ``game_depth`` bounds the number of game rounds, and ``state_budget``
    bounds states visited during reachability.  ``extra_consts`` adds public
    names beyond the free names of the checked processes."""

    recipe_depth: int = 2
    static_depth: int = 2
    repl_unfold: int = 2
    game_depth: int = 12
    state_budget: int = 100_000
    extra_consts: tuple[str, ...] = ()


# --- structural transitions ------------------------------------------------


@dataclass(frozen=True)
class POut:
    chan: Message
    payload: Message
    loc: Location
    binders: tuple[str, ...]
    cont: Process
    phantom: bool = False


@dataclass(frozen=True)
class PIn:
    chan: Message
    binder: str
    loc: Location
    binders: tuple[str, ...]
    cont: Process
    phantom: bool = False


@dataclass(frozen=True)
class PTau:
    loc: LocationLabel
    binders: tuple[str, ...]
    cont: Process
    phantom: bool = False


def _push_loc(loc: LocationLabel, bit: str) -> LocationLabel:
    if isinstance(loc, Location):
        return Location(bit + loc.prefix, loc.choice)
    return PairLoc(_push_loc(loc.left, bit), _push_loc(loc.right, bit))


def _push(t, bit: str, cont: Process):
    return replace(t, loc=_push_loc(t.loc, bit), cont=cont)


def _push_choice(t, bit: str):
    loc = t.loc
    assert isinstance(loc, Location) and loc.prefix == ""
    return replace(t, loc=Location("", bit + loc.choice))


def _own_names(t) -> frozenset[str]:
    names = frozenset(t.binders) | all_names(t.cont)
    if isinstance(t, POut):
        names |= free_vars(t.chan) | free_vars(t.payload)
    elif isinstance(t, PIn):
        names |= free_vars(t.chan) | {t.binder}
    return names


def _freshen_binders(t, avoid: frozenset[str] | set[str]):
    """Rename a firing's extruded binders apart from surrounding context.

    Fresh names are chosen per subterm, so two sibling components can pick
    the same name; before their residuals are joined under one binder list
    the clash must be resolved."""
    clash = set(t.binders) & set(avoid)
    if not clash:
        return t
    supply = fresh_supply(set(avoid) | _own_names(t))
    ren = {x: Var(next(supply)) for x in sorted(clash)}
    binders = tuple(ren[x].name if x in ren else x for x in t.binders)
    cont = subst_proc(t.cont, ren)
    if isinstance(t, POut):
        # channels never mention extruded binders (blocked at the binding
        # restriction), payloads may
        return replace(t, binders=binders, cont=cont, payload=rename_vars(t.payload, ren))
    return replace(t, binders=binders, cont=cont)


def _close(o: POut, i: PIn) -> tuple[tuple[str, ...], Process]:
    """Deliver an output firing's payload to an input firing.

    The two firings extrude independent binder lists which may clash; the
    input side is renamed apart before the payload is substituted.  Returns
    the combined binder list and the input-side continuation."""
    clash = set(i.binders) & (set(o.binders) | free_vars(o.payload))
    w = list(i.binders)
    cont_i = i.cont
    if clash:
        avoid = (
            set(o.binders)
            | free_vars(o.payload)
            | all_names(o.cont)
            | set(i.binders)
            | all_names(cont_i)
        )
        supply = fresh_supply(avoid)
        ren = {x: Var(next(supply)) for x in sorted(clash)}
        cont_i = subst_proc(cont_i, ren)
        w = [ren[x].name if x in ren else x for x in w]
    body_i = subst_proc(cont_i, {i.binder: o.payload})
    return o.binders + tuple(w), body_i


def proc_transitions(p: Process, theory: Theory) -> tuple[tuple, bool]:
    """All structural firings of ``p``; the flag reports truncation from an
    exhausted replication budget."""
    cache = theory.__dict__.setdefault("_proc_trans_cache", {})
    hit = cache.get(p)
    if hit is not None:
        return hit
    result = _proc_transitions(p, theory)
    cache[p] = result
    return result


def _proc_transitions(p: Process, theory: Theory) -> tuple[tuple, bool]:
    if isinstance(p, Nil):
        return (), False
    if isinstance(p, In):
        return (PIn(theory.normalize(p.chan), p.binder, Location("", ""), (), p.body),), False
    if isinstance(p, Out):
        return (
            POut(theory.normalize(p.chan), theory.normalize(p.payload), Location("", ""), (), p.body),
        ), False
    if isinstance(p, Match):
        return proc_transitions(p.body, theory) if theory.equal(p.lhs, p.rhs) else ((), False)
    if isinstance(p, Mismatch):
        return proc_transitions(p.body, theory) if not theory.equal(p.lhs, p.rhs) else ((), False)
    if isinstance(p, Sum):
        lts, lt = proc_transitions(p.left, theory)
        rts, rt = proc_transitions(p.right, theory)
        out = [_push_choice(t, "0") for t in lts]
        out += [_push_choice(t, "1") for t in rts]
        return tuple(out), lt or rt
    if isinstance(p, Bang):
        if p.fuel is None:
            raise ValueError("replication explored without an unfolding budget")
        if p.fuel <= 0:
            # budget exhausted: expose one more unfolding as phantom firings,
            # usable only by a game follower, and taint the result
            ts, _ = proc_transitions(p.body, theory)
            out = tuple(
                replace(
                    t,
                    loc=_push_loc(t.loc, "0"),
                    cont=Par(t.cont, Bang(p.body, 0)),
                    phantom=True,
                )
                for t in ts
            )
            return out, True
        unfolded = Par(p.body, Bang(p.body, p.fuel - 1))
        return proc_transitions(unfolded, theory)
    if isinstance(p, New):
        avoid = all_names(p.body) | {p.name}
        z = next(fresh_supply(avoid))
        body = subst_proc(p.body, {p.name: Var(z)}) if p.name != z else p.body
        ts, taint = proc_transitions(body, theory)
        out = []
        for t in ts:
            if isinstance(t, (POut, PIn)) and z in free_vars(t.chan):
                continue  # private-channel actions stay internal
            t = _freshen_binders(t, {z})
            out.append(replace(t, binders=(z,) + t.binders))
        return tuple(out), taint
    if isinstance(p, Par):
        lts, ltaint = proc_transitions(p.left, theory)
        rts, rtaint = proc_transitions(p.right, theory)
        left_names = all_names(p.left)
        right_names = all_names(p.right)
        out = []
        for t in lts:
            t = _freshen_binders(t, right_names)
            out.append(_push(t, "0", Par(t.cont, p.right)))
        for t in rts:
            t = _freshen_binders(t, left_names)
            out.append(_push(t, "1", Par(p.left, t.cont)))
        for o in lts:
            if not isinstance(o, POut):
                continue
            for i in rts:
                if isinstance(i, PIn) and theory.equal(o.chan, i.chan):
                    loc = PairLoc(_push_loc(o.loc, "0"), _push_loc(i.loc, "1"))
                    binders, body_i = _close(o, i)
                    out.append(PTau(loc, binders, Par(o.cont, body_i), o.phantom or i.phantom))
        for i in lts:
            if not isinstance(i, PIn):
                continue
            for o in rts:
                if isinstance(o, POut) and theory.equal(o.chan, i.chan):
                    loc = PairLoc(_push_loc(i.loc, "0"), _push_loc(o.loc, "1"))
                    binders, body_i = _close(o, i)
                    out.append(PTau(loc, binders, Par(body_i, o.cont), o.phantom or i.phantom))
        return tuple(out), ltaint or rtaint
    raise TypeError(p)


# --- top-level transitions -------------------------------------------------


def _stem(i: int) -> str:
    return "l" + "'" * i


def fresh_alias(prefix: str, domain: frozenset[Alias]) -> Alias:
    i = 0
    while True:
        a = Alias(prefix, _stem(i))
        if a not in domain:
            return a
        i += 1


@dataclass(frozen=True)
class Step:
    event: Event
    target: ExtendedProcess
    phantom: bool = False


@dataclass
class TransitionSet:
    steps: list  # list[Step]
    tainted: bool

    @property
    def real_steps(self):
        return [s for s in self.steps if not s.phantom]


def enabled_transitions(
    A: ExtendedProcess,
    bounds: ExplorationBounds,
    theory: Theory,
    signature: tuple[Symbol, ...],
    consts: frozenset[str],
) -> TransitionSet:
    """Environment-facing transitions of an extended process.

    Channels and input payloads range over recipes up to
    ``bounds.recipe_depth``; each output extends the frame at an alias
    rooted at the firing location's parallel prefix."""
    cache = theory.__dict__.setdefault("_enabled_cache", {})
    key = (A, bounds, signature, consts)
    hit = cache.get(key)
    if hit is not None:
        return hit

    ts, tainted = proc_transitions(A.body, theory)
    recipes = knowledge.recipe_enum(
        A.frame.domain, consts, signature, bounds.recipe_depth, theory
    )
    images = [theory.normalize(apply_msg_subst(r, A.frame)) for r in recipes]

    def chan_recipes(chan: Message):
        chan_nf = theory.normalize(chan)
        return [r for r, img in zip(recipes, images) if img == chan_nf]

    steps: list[Step] = []
    for t in ts:
        if isinstance(t, POut):
            alias = fresh_alias(t.loc.prefix, A.frame.domain)
            frame2 = A.frame.extend(alias, theory.normalize(t.payload))
            residual = alpha_canonical(
                ExtendedProcess(A.binders + t.binders, frame2, t.cont)
            )
            for m in chan_recipes(t.chan):
                steps.append(Step(Event(OutLabel(m, alias), t.loc), residual, t.phantom))
        elif isinstance(t, PIn):
            for m in chan_recipes(t.chan):
                for n, img in zip(recipes, images):
                    body = subst_proc(t.cont, {t.binder: img})
                    residual = alpha_canonical(
                        ExtendedProcess(A.binders + t.binders, A.frame, body)
                    )
                    steps.append(Step(Event(InLabel(m, n), t.loc), residual, t.phantom))
        else:
            residual = alpha_canonical(
                ExtendedProcess(A.binders + t.binders, A.frame, t.cont)
            )
            steps.append(Step(Event(TauLabel(), t.loc), residual, t.phantom))

    steps.sort(key=lambda s: (s.phantom, event_key(s.event)))
    result = TransitionSet(steps, tainted)
    cache[key] = result
    return result


def default_consts(*procs: Process) -> frozenset[str]:
    consts: frozenset[str] = frozenset(("w0",))
    for p in procs:
        consts |= free_names(p)
    return consts


# --- reachability ----------------------------------------------------------


@dataclass
class LTSGraph:
    states: list[ExtendedProcess]
    edges: list[tuple[int, Event, int]]
    tainted: bool
    budget_exhausted: bool = False


def reachable_lts(
    A: ExtendedProcess,
    bounds: ExplorationBounds,
    theory: Theory,
    signature: tuple[Symbol, ...],
    consts: frozenset[str],
) -> LTSGraph:
    """Breadth-first exploration up to the state budget; states are merged
    up to structural congruence."""
    start = alpha_canonical(A)
    index = {congruence_key(start): 0}
    states = [start]
    edges: list[tuple[int, Event, int]] = []
    tainted = False
    exhausted = False
    frontier = [0]
    while frontier:
        next_frontier = []
        for sid in frontier:
            tset = enabled_transitions(states[sid], bounds, theory, signature, consts)
            tainted = tainted or tset.tainted
            for event, target in ((s.event, s.target) for s in tset.real_steps):
                key = congruence_key(target)
                tid = index.get(key)
                if tid is None:
                    if len(states) >= bounds.state_budget:
                        exhausted = True
                        tainted = True
                        continue
                    tid = len(states)
                    index[key] = tid
                    states.append(target)
                    next_frontier.append(tid)
                edges.append((sid, event, tid))
        frontier = next_frontier
    return LTSGraph(states, edges, tainted, exhausted)


# --- diamond property ------------------------------------------------------


@dataclass
class DiamondViolation:
    state: ExtendedProcess
    first: Event
    second: Event
    reason: str


def diamond_check(
    graph: LTSGraph,
    bounds: ExplorationBounds,
    theory: Theory,
    signature: tuple[Symbol, ...],
    consts: frozenset[str],
) -> list[DiamondViolation]:
    """Check that independent coinitial transitions commute to congruent
    endpoints across all states of an explored graph."""
    from .independence import indep_event

    violations = []
    for state in graph.states:
        steps = enabled_transitions(state, bounds, theory, signature, consts).real_steps
        pairs = [(s.event, s.target) for s in steps]
        for i, (e0, b0) in enumerate(pairs):
            for e1, b1 in pairs[i + 1 :]:
                if e0 == e1 or not indep_event(e0, e1):
                    continue
                b01 = _fire(b0, e1, bounds, theory, signature, consts)
                b10 = _fire(b1, e0, bounds, theory, signature, consts)
                if b01 is None or b10 is None:
                    violations.append(
                        DiamondViolation(state, e0, e1, "missing commuting transition")
                    )
                elif not struct_congruent(b01, b10):
                    violations.append(
                        DiamondViolation(state, e0, e1, "endpoints not congruent")
                    )
    return violations


def _fire(A, event, bounds, theory, signature, consts):
    for s in enabled_transitions(A, bounds, theory, signature, consts).real_steps:
        if s.event == event:
            return s.target
    return None
