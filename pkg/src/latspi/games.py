"""Game-based decision procedures for the behavioural relation spectrum.

Every relation is decided by a turn-based game over pairs of extended
processes.  A configuration carries the two states, an alias bijection
identifying the messages each side has disclosed, and a set of event pairs
remembered from earlier rounds.  The leader proposes a transition on one
side and the follower must answer with a transition on the other side whose
label agrees up to the alias bijection and which meets the relation's
independence constraints against the remembered pairs.  Frames are compared
by static tests at every configuration.

Relations differ in who may lead, in how the remembered pairs constrain
answers, and in whether an extra enabledness round (a failure test) is
available to the attacker.  Since every transition consumes a prefix or a
replication budget, the bounded game tree is finite and is explored by a
memoized AND-OR search.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .independence import indep_event, indep_loc
from .knowledge import StaticWitness, static_equiv_witness, static_impl_witness
from .lts import (
    Event,
    ExplorationBounds,
    InLabel,
    OutLabel,
    TauLabel,
    TransitionSet,
    default_consts,
    enabled_transitions,
    event_key,
)
from .syntax import (
    ExtendedProcess,
    Process,
    alpha_canonical,
    congruence_key,
    from_process,
    prime_bangs,
    symbols_of,
)
from .terms import AliasMap, ID_ALIAS, Symbol, Theory


class Rel(Enum):
    PRESIM_I = "presim-i"
    SIM_I = "sim-i"
    BISIM_I = "bisim-i"
    SIM_ST = "sim-st"
    BISIM_ST = "bisim-st"
    SIM_HP = "sim-hp"
    BISIM_HP = "bisim-hp"
    FSIM_ST = "fsim-st"
    FSIM_HP = "fsim-hp"
    SIM_ILOC = "sim-iloc"
    BISIM_ILOC = "bisim-iloc"
    SIM_IFULL = "sim-ifull"
    BISIM_IFULL = "bisim-ifull"

    @property
    def is_bisim(self) -> bool:
        return self in (Rel.BISIM_I, Rel.BISIM_ST, Rel.BISIM_HP, Rel.BISIM_ILOC, Rel.BISIM_IFULL)

    @property
    def has_failure_round(self) -> bool:
        return self in (Rel.FSIM_ST, Rel.FSIM_HP)

    @property
    def family(self) -> str:
        """Which pair-set discipline the relation uses: none, ST retention,
        HP forced partitions, or accumulated independence consistency."""
        if self in (Rel.PRESIM_I, Rel.SIM_I, Rel.BISIM_I):
            return "none"
        if self in (Rel.SIM_ST, Rel.BISIM_ST, Rel.FSIM_ST):
            return "st"
        if self in (Rel.SIM_HP, Rel.BISIM_HP, Rel.FSIM_HP):
            return "hp"
        return "ind"


@dataclass(frozen=True)
class GameConfig:
    left: ExtendedProcess
    right: ExtendedProcess
    rho: AliasMap
    pairs: frozenset  # frozenset of (left Event, right Event)


def _pairs_key(pairs):
    return tuple(sorted((event_key(a), event_key(b)) for a, b in pairs))


# --- witness trees ---------------------------------------------------------


@dataclass
class StaticNode:
    m: object
    n: object
    holds_left: bool
    holds_right: bool


@dataclass
class ReplyNode:
    event: Event
    child: object  # refutation of the configuration after this reply


@dataclass
class LeadNode:
    side: str  # "left" or "right"
    event: Event
    replies: list  # list[ReplyNode]; empty when no legal answer exists


@dataclass
class FailureNode:
    event: Event  # enabled on the right, not mirrorable on the left


@dataclass
class Verdict:
    relation: Rel
    related: bool
    exact: bool
    bounds: ExplorationBounds
    witness: object | None = None


# --- the checker -----------------------------------------------------------


class Checker:
    def __init__(
        self,
        rel: Rel,
        theory: Theory,
        bounds: ExplorationBounds,
        signature: tuple[Symbol, ...],
        consts: frozenset[str],
        st_exhaustive: bool = False,
    ):
        self.rel = rel
        self.theory = theory
        self.bounds = bounds
        self.signature = signature
        self.consts = consts
        self.st_exhaustive = st_exhaustive and rel.family == "st"
        self.memo: dict = {}
        self.stack: set = set()
        self.static_cache: dict = {}
        self.tainted = False

    # -- primitives --

    def transitions(self, state: ExtendedProcess) -> TransitionSet:
        tset = enabled_transitions(state, self.bounds, self.theory, self.signature, self.consts)
        if tset.tainted:
            self.tainted = True
        return tset

    def indep(self, e0: Event, e1: Event) -> bool:
        return indep_event(e0, e1)

    def cons_indep(self, e0: Event, e1: Event) -> bool:
        if self.rel in (Rel.SIM_ILOC, Rel.BISIM_ILOC):
            return indep_loc(e0.loc, e1.loc)
        return indep_event(e0, e1)

    def static_witness(self, cfg: GameConfig) -> StaticWitness | None:
        key = (cfg.left.frame, cfg.right.frame, cfg.rho.key())
        if key in self.static_cache:
            return self.static_cache[key]
        fn = static_impl_witness if self.rel is Rel.PRESIM_I else static_equiv_witness
        w = fn(
            cfg.left.frame,
            cfg.right.frame,
            cfg.rho,
            self.consts,
            self.signature,
            self.bounds.static_depth,
            self.theory,
        )
        self.static_cache[key] = w
        return w

    def match_label(self, left_action, right_action, rho: AliasMap) -> AliasMap | None:
        """Extension of ``rho`` under which the left label maps onto the
        right label, or ``None``."""
        if isinstance(left_action, TauLabel) and isinstance(right_action, TauLabel):
            return rho
        if isinstance(left_action, InLabel) and isinstance(right_action, InLabel):
            if rho(left_action.chan) == right_action.chan and rho(left_action.payload) == right_action.payload:
                return rho
            return None
        if isinstance(left_action, OutLabel) and isinstance(right_action, OutLabel):
            if rho(left_action.chan) != right_action.chan:
                return None
            try:
                return rho.extend(left_action.alias, right_action.alias)
            except ValueError:
                return None
        return None

    # -- round structure --

    def leader_contexts(self, cfg: GameConfig, side: str, event: Event):
        """Per-family context chosen by the leader alongside a transition."""
        j = 0 if side == "left" else 1
        family = self.rel.family
        if family == "none" or family == "ind":
            yield None
            return
        keep = frozenset(p for p in cfg.pairs if self.indep(p[j], event))
        if family == "st":
            if self.st_exhaustive:
                items = sorted(keep, key=lambda p: (event_key(p[0]), event_key(p[1])))
                for mask in range(1 << len(items)):
                    yield ("st", frozenset(items[i] for i in range(len(items)) if mask >> i & 1))
            else:
                yield ("st", keep)
        else:  # hp: the partition is forced
            yield ("hp", keep, cfg.pairs - keep)

    def reply_ok(self, cfg: GameConfig, side: str, ctx, pair) -> bool:
        """Whether a candidate answer meets the independence constraints."""
        k = 1 if side == "left" else 0  # the follower's side of each pair
        reply_event = pair[k]
        if ctx is None:
            if self.rel.family != "ind":
                return True
            for d in cfg.pairs:
                if self.cons_indep(pair[0], d[0]) != self.cons_indep(pair[1], d[1]):
                    return False
            return True
        if ctx[0] == "st":
            return all(self.indep(p[k], reply_event) for p in ctx[1])
        assert ctx[0] == "hp"
        return all(self.indep(p[k], reply_event) for p in ctx[1]) and all(
            not self.indep(p[k], reply_event) for p in ctx[2]
        )

    def next_pairs(self, cfg: GameConfig, ctx, pair) -> frozenset:
        family = self.rel.family
        if family == "none":
            return frozenset()
        if family == "ind":
            return cfg.pairs | {pair}
        return ctx[1] | {pair}

    def legal_replies(self, cfg: GameConfig, side: str, event: Event, target, ctx):
        """All follower answers to a leader move: pairs of the answering
        event and the successor configuration."""
        follower_state = cfg.right if side == "left" else cfg.left
        out = []
        # the follower may draw on phantom firings (beyond the replication
        # budget); the enclosing transition set is already tainted
        for event2, target2 in ((s.event, s.target) for s in self.transitions(follower_state).steps):
            if side == "left":
                rho2 = self.match_label(event.action, event2.action, cfg.rho)
                pair = (event, event2)
                left2, right2 = target, target2
            else:
                rho2 = self.match_label(event2.action, event.action, cfg.rho)
                pair = (event2, event)
                left2, right2 = target2, target
            if rho2 is None:
                continue
            if not self.reply_ok(cfg, side, ctx, pair):
                continue
            out.append((event2, GameConfig(left2, right2, rho2, self.next_pairs(cfg, ctx, pair))))
        return out

    def failure_witness(self, cfg: GameConfig) -> FailureNode | None:
        """Enabledness round of the failure similarities: find a constrained
        right transition whose label the left side cannot mirror."""
        right_steps = [(s.event, s.target) for s in self.transitions(cfg.right).real_steps]
        left_steps = [(s.event, s.target) for s in self.transitions(cfg.left).steps]
        for event_r, _ in right_steps:
            keep = frozenset(p for p in cfg.pairs if self.indep(p[1], event_r))
            if self.rel is Rel.FSIM_HP:
                drop = cfg.pairs - keep

                def ok(e_l):
                    return all(self.indep(p[0], e_l) for p in keep) and all(
                        not self.indep(p[0], e_l) for p in drop
                    )

            else:

                def ok(e_l):
                    return all(self.indep(p[0], e_l) for p in keep)

            mirrored = any(
                self.match_label(event_l.action, event_r.action, cfg.rho) is not None and ok(event_l)
                for event_l, _ in left_steps
            )
            if not mirrored:
                return FailureNode(event_r)
        return None

    # -- search --

    def run(self, cfg: GameConfig, depth: int = 0):
        """Refutation of the configuration, or ``None`` when related within
        bounds."""
        key = (
            congruence_key(cfg.left),
            congruence_key(cfg.right),
            cfg.rho.key(),
            _pairs_key(cfg.pairs),
        )
        if key in self.memo:
            return self.memo[key]
        if key in self.stack:
            return None
        if depth >= self.bounds.game_depth:
            self.tainted = True
            return None
        self.stack.add(key)
        try:
            node = self._decide(cfg, depth)
        finally:
            self.stack.discard(key)
        self.memo[key] = node
        return node

    def _decide(self, cfg: GameConfig, depth: int):
        w = self.static_witness(cfg)
        if w is not None:
            return StaticNode(w.m, w.n, w.holds_left, w.holds_right)
        if self.rel.has_failure_round:
            fnode = self.failure_witness(cfg)
            if fnode is not None:
                return fnode
        sides = ("left", "right") if self.rel.is_bisim else ("left",)
        for side in sides:
            leader_state = cfg.left if side == "left" else cfg.right
            for event, target in ((s.event, s.target) for s in self.transitions(leader_state).real_steps):
                for ctx in self.leader_contexts(cfg, side, event):
                    replies = self.legal_replies(cfg, side, event, target, ctx)
                    refutations = []
                    answered = False
                    for event2, cfg2 in replies:
                        child = self.run(cfg2, depth + 1)
                        if child is None:
                            answered = True
                            break
                        refutations.append(ReplyNode(event2, child))
                    if not answered:
                        return LeadNode(side, event, refutations)
        return None


# --- entry points ----------------------------------------------------------


def initial_config(p: Process, q: Process, bounds: ExplorationBounds) -> GameConfig:
    left = alpha_canonical(from_process(prime_bangs(p, bounds.repl_unfold)))
    right = alpha_canonical(from_process(prime_bangs(q, bounds.repl_unfold)))
    return GameConfig(left, right, ID_ALIAS, frozenset())


def build_signature(theory: Theory, *procs: Process) -> tuple[Symbol, ...]:
    syms = set(theory.symbols())
    for p in procs:
        syms |= symbols_of(p)
    return tuple(sorted(syms, key=lambda s: (s.name, s.arity)))


def check(
    rel: Rel,
    p: Process,
    q: Process,
    bounds: ExplorationBounds,
    theory: Theory,
    signature: tuple[Symbol, ...] | None = None,
    consts: frozenset[str] | None = None,
    st_exhaustive: bool = False,
) -> Verdict:
    """Decide whether ``p`` relates to ``q`` within the given bounds."""
    if signature is None:
        signature = build_signature(theory, p, q)
    if consts is None:
        consts = default_consts(p, q) | frozenset(bounds.extra_consts)
    checker = Checker(rel, theory, bounds, signature, consts, st_exhaustive)
    witness = checker.run(initial_config(p, q, bounds))
    # only Related verdicts are bound-qualified; a Distinguished verdict is
    # backed by its replayable witness
    exact = True if witness is not None else not checker.tainted
    return Verdict(
        relation=rel,
        related=witness is None,
        exact=exact,
        bounds=bounds,
        witness=witness,
    )


# --- replay ----------------------------------------------------------------


def witness_replay(
    verdict: Verdict,
    p: Process,
    q: Process,
    theory: Theory,
    signature: tuple[Symbol, ...] | None = None,
    consts: frozenset[str] | None = None,
) -> bool:
    """Re-verify a distinguishing witness against a fresh game: every node
    must correspond to a legal leader move whose recorded answers are
    exactly the legal follower answers."""
    if verdict.related or verdict.witness is None:
        return False
    bounds = verdict.bounds
    if signature is None:
        signature = build_signature(theory, p, q)
    if consts is None:
        consts = default_consts(p, q) | frozenset(bounds.extra_consts)
    checker = Checker(verdict.relation, theory, bounds, signature, consts)
    return _replay_node(checker, initial_config(p, q, bounds), verdict.witness)


def _replay_node(checker: Checker, cfg: GameConfig, node) -> bool:
    if isinstance(node, StaticNode):
        w = checker.static_witness(cfg)
        return (
            w is not None
            and w.m == node.m
            and w.n == node.n
            and w.holds_left == node.holds_left
            and w.holds_right == node.holds_right
        )
    if isinstance(node, FailureNode):
        if not checker.rel.has_failure_round or checker.static_witness(cfg) is not None:
            return False
        fnode = checker.failure_witness(cfg)
        return fnode is not None and fnode.event == node.event
    if isinstance(node, LeadNode):
        if checker.static_witness(cfg) is not None:
            return False
        if node.side == "right" and not checker.rel.is_bisim:
            return False
        leader_state = cfg.left if node.side == "left" else cfg.right
        for event, target in ((s.event, s.target) for s in checker.transitions(leader_state).real_steps):
            if event != node.event:
                continue
            for ctx in checker.leader_contexts(cfg, node.side, event):
                replies = checker.legal_replies(cfg, node.side, event, target, ctx)
                recorded = {event_key(r.event): r for r in node.replies}
                if {event_key(e) for e, _ in replies} != set(recorded):
                    continue
                if all(
                    _replay_node(checker, cfg2, recorded[event_key(e)].child)
                    for e, cfg2 in replies
                ):
                    return True
        return False
    return False
