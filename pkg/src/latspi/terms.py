"""Messages, substitutions, and equality modulo a convergent rewrite system.

Messages are first-order terms over a signature of function symbols,
variables, and located aliases.  An alias is a handle ``<prefix><stem>``
(prefix a bitstring, stem an identifier) standing for a message disclosed
to the environment.  Equality modulo the user-supplied equational theory is
decided by innermost rewriting to normal form; the user asserts that the
oriented rules are terminating and confluent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping


class RewriteBudgetExceeded(Exception):
    """Raised when a single normalization exceeds its step budget."""


class TheoryError(Exception):
    """Malformed theory file or rule."""


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int

    def __repr__(self):
        return f"{self.name}/{self.arity}"


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Alias:
    """A located alias: bitstring prefix plus stem, e.g. ``01l``."""

    prefix: str
    stem: str

    def __post_init__(self):
        if not set(self.prefix) <= {"0", "1"}:
            raise ValueError(f"alias prefix must be a bitstring: {self.prefix!r}")

    def __str__(self):
        return self.prefix + self.stem


@dataclass(frozen=True)
class App:
    fn: Symbol
    args: tuple

    def __post_init__(self):
        if len(self.args) != self.fn.arity:
            raise ValueError(f"{self.fn} applied to {len(self.args)} arguments")

    def __str__(self):
        return f"{self.fn.name}({', '.join(str(a) for a in self.args)})"


Message = Var | Alias | App


def app(name: str, *args: Message) -> App:
    return App(Symbol(name, len(args)), tuple(args))


def free_vars(m: Message) -> frozenset[str]:
    if isinstance(m, Var):
        return frozenset((m.name,))
    if isinstance(m, Alias):
        return frozenset()
    out: frozenset[str] = frozenset()
    for a in m.args:
        out |= free_vars(a)
    return out


def free_aliases(m: Message) -> frozenset[Alias]:
    if isinstance(m, Var):
        return frozenset()
    if isinstance(m, Alias):
        return frozenset((m,))
    out: frozenset[Alias] = frozenset()
    for a in m.args:
        out |= free_aliases(a)
    return out


def subterm_size(m: Message) -> int:
    if isinstance(m, App):
        return 1 + sum(subterm_size(a) for a in m.args)
    return 1


def msg_key(m: Message):
    """Deterministic total order on messages (for canonical enumeration)."""
    if isinstance(m, Var):
        return (0, m.name)
    if isinstance(m, Alias):
        return (1, m.prefix, m.stem)
    return (2, m.fn.name, m.fn.arity, tuple(msg_key(a) for a in m.args))


def rename_vars(m: Message, mapping: Mapping[str, Message]) -> Message:
    """Replace free variables by messages (variables are never binders here)."""
    if isinstance(m, Var):
        return mapping.get(m.name, m)
    if isinstance(m, Alias):
        return m
    return App(m.fn, tuple(rename_vars(a, mapping) for a in m.args))


@dataclass(frozen=True)
class RewriteRule:
    lhs: Message
    rhs: Message

    def __post_init__(self):
        if free_aliases(self.lhs) or free_aliases(self.rhs):
            raise TheoryError("rewrite rules must not mention aliases")
        if not free_vars(self.rhs) <= free_vars(self.lhs):
            raise TheoryError(f"free variables of rhs not contained in lhs: {self}")

    def __str__(self):
        return f"{self.lhs} -> {self.rhs}"


def _match(pattern: Message, term: Message, binding: dict) -> bool:
    if isinstance(pattern, Var):
        if pattern.name in binding:
            return binding[pattern.name] == term
        binding[pattern.name] = term
        return True
    if isinstance(pattern, Alias):
        return pattern == term
    if not isinstance(term, App) or term.fn != pattern.fn:
        return False
    return all(_match(p, t, binding) for p, t in zip(pattern.args, term.args))


class Theory:
    """An oriented convergent presentation of an equational theory.

    Normal forms are computed by innermost rewriting with a step budget
    guarding against non-terminating rule sets.
    """

    def __init__(self, rules: Iterable[RewriteRule], step_budget: int = 10_000):
        self.rules = tuple(rules)
        self.step_budget = step_budget
        self._cache: dict[Message, Message] = {}

    def symbols(self) -> frozenset[Symbol]:
        syms = set()
        for r in self.rules:
            for side in (r.lhs, r.rhs):
                syms |= _symbols_of(side)
        return frozenset(syms)

    def normalize(self, m: Message) -> Message:
        cached = self._cache.get(m)
        if cached is not None:
            return cached
        steps = [0]
        nf = self._norm(m, steps)
        self._cache[m] = nf
        return nf

    def _norm(self, m: Message, steps: list) -> Message:
        if not isinstance(m, App):
            return m
        cached = self._cache.get(m)
        if cached is not None:
            return cached
        term = App(m.fn, tuple(self._norm(a, steps) for a in m.args))
        while True:
            reduct = self._step(term)
            if reduct is None:
                self._cache[m] = term
                return term
            steps[0] += 1
            if steps[0] > self.step_budget:
                raise RewriteBudgetExceeded(
                    f"exceeded {self.step_budget} rewrite steps; rules likely non-terminating"
                )
            term = self._norm(reduct, steps)

    def _step(self, term: App) -> Message | None:
        for rule in self.rules:
            binding: dict = {}
            if _match(rule.lhs, term, binding):
                return rename_vars(rule.rhs, binding)
        return None

    def equal(self, m: Message, n: Message) -> bool:
        return self.normalize(m) == self.normalize(n)


def _symbols_of(m: Message) -> set[Symbol]:
    if not isinstance(m, App):
        return set()
    out = {m.fn}
    for a in m.args:
        out |= _symbols_of(a)
    return out


EMPTY_THEORY = Theory(())


# --- substitutions ---------------------------------------------------------


class Substitution:
    """A finite map from aliases to messages, applied in suffix form."""

    __slots__ = ("mapping",)

    def __init__(self, mapping: Mapping[Alias, Message] = ()):
        self.mapping: dict[Alias, Message] = {a: m for a, m in dict(mapping).items() if m != a}

    @property
    def domain(self) -> frozenset[Alias]:
        return frozenset(self.mapping)

    def __call__(self, m: Message) -> Message:
        return apply_msg_subst(m, self)

    def __eq__(self, other):
        return isinstance(other, Substitution) and self.mapping == other.mapping

    def __hash__(self):
        return hash(tuple(sorted(self.mapping.items(), key=lambda kv: msg_key(kv[0]))))

    def __bool__(self):
        return bool(self.mapping)

    def items(self):
        return sorted(self.mapping.items(), key=lambda kv: msg_key(kv[0]))

    def extend(self, alias: Alias, m: Message) -> "Substitution":
        """Frame composition with a singleton ``{alias -> m}``."""
        if alias in self.mapping:
            raise ValueError(f"alias {alias} already bound")
        new = dict(self.mapping)
        new[alias] = m
        return Substitution(new)

    def __str__(self):
        if not self.mapping:
            return "id"
        return " o ".join(f"{{{a} -> {m}}}" for a, m in self.items())


ID = Substitution()


def apply_msg_subst(m: Message, s: Substitution) -> Message:
    if isinstance(m, Var):
        return m
    if isinstance(m, Alias):
        return s.mapping.get(m, m)
    return App(m.fn, tuple(apply_msg_subst(a, s) for a in m.args))


def compose(s1: Substitution, s2: Substitution) -> Substitution:
    """Apply ``s1`` then ``s2``: ``m (s1 o s2) = (m s1) s2``."""
    out = {a: apply_msg_subst(m, s2) for a, m in s1.mapping.items()}
    for a, m in s2.mapping.items():
        out.setdefault(a, m)
    return Substitution(out)


def restrict(s: Substitution, dom: frozenset[Alias] | set[Alias]) -> Substitution:
    return Substitution({a: m for a, m in s.mapping.items() if a in dom})


class AliasMap:
    """A finite injective map from aliases to aliases."""

    __slots__ = ("mapping",)

    def __init__(self, mapping: Mapping[Alias, Alias] = ()):
        mapping = dict(mapping)
        if len(set(mapping.values())) != len(mapping):
            raise ValueError("alias map must be injective")
        self.mapping = mapping

    @property
    def domain(self) -> frozenset[Alias]:
        return frozenset(self.mapping)

    def __call__(self, m: Message) -> Message:
        if isinstance(m, Var):
            return m
        if isinstance(m, Alias):
            return self.mapping.get(m, m)
        return App(m.fn, tuple(self(a) for a in m.args))

    def __eq__(self, other):
        return isinstance(other, AliasMap) and self.mapping == other.mapping

    def __hash__(self):
        return hash(self.key())

    def key(self):
        return tuple(sorted(((a.prefix, a.stem), (b.prefix, b.stem)) for a, b in self.mapping.items()))

    def extend(self, a: Alias, b: Alias) -> "AliasMap":
        if a in self.mapping or b in set(self.mapping.values()):
            raise ValueError("extension breaks injectivity")
        new = dict(self.mapping)
        new[a] = b
        return AliasMap(new)

    def restrict(self, dom: frozenset[Alias]) -> "AliasMap":
        return AliasMap({a: b for a, b in self.mapping.items() if a in dom})

    def inverse(self) -> "AliasMap":
        return AliasMap({b: a for a, b in self.mapping.items()})

    def __str__(self):
        if not self.mapping:
            return "id"
        return ", ".join(f"{a}->{b}" for a, b in sorted(self.mapping.items(), key=lambda kv: msg_key(kv[0])))


ID_ALIAS = AliasMap()


# --- theory file parsing ---------------------------------------------------


def parse_message(text: str, arities: dict[str, int] | None = None) -> Message:
    """Parse ``f(a, g(b))`` style message text; lowercase identifiers are variables."""
    msg, rest = _parse_msg(text.strip(), arities if arities is not None else {})
    if rest.strip():
        raise TheoryError(f"trailing input after message: {rest!r}")
    return msg


def _parse_msg(text: str, arities: dict[str, int]):
    text = text.lstrip()
    i = 0
    while i < len(text) and (text[i].isalnum() or text[i] in "_'"):
        i += 1
    if i == 0:
        raise TheoryError(f"expected identifier at {text[:20]!r}")
    name, rest = text[:i], text[i:].lstrip()
    if not rest.startswith("("):
        return Var(name), rest
    rest = rest[1:]
    args = []
    while True:
        arg, rest = _parse_msg(rest, arities)
        args.append(arg)
        rest = rest.lstrip()
        if rest.startswith(","):
            rest = rest[1:]
            continue
        if rest.startswith(")"):
            rest = rest[1:]
            break
        raise TheoryError(f"expected ',' or ')' at {rest[:20]!r}")
    known = arities.get(name)
    if known is not None and known != len(args):
        raise TheoryError(f"symbol {name} used with arities {known} and {len(args)}")
    arities[name] = len(args)
    return App(Symbol(name, len(args)), tuple(args)), rest


def parse_theory(text: str, step_budget: int = 10_000) -> Theory:
    """Parse a theory file: one ``lhs -> rhs`` rule per line, ``#`` comments."""
    rules = []
    arities: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" not in line:
            raise TheoryError(f"line {lineno}: expected 'lhs -> rhs'")
        lhs_text, rhs_text = line.split("->", 1)
        try:
            lhs = parse_message(lhs_text, arities)
            rhs = parse_message(rhs_text, arities)
            rules.append(RewriteRule(lhs, rhs))
        except TheoryError as e:
            raise TheoryError(f"line {lineno}: {e}") from None
    return Theory(rules, step_budget=step_budget)


DOLEV_YAO_TEXT = """\
# symmetric encryption, pairing, hashing
dec(enc(x, y), y) -> x
fst(pair(x, y)) -> x
snd(pair(x, y)) -> y
"""


def dolev_yao() -> Theory:
    theory = parse_theory(DOLEV_YAO_TEXT)
    # hashing has no equations but belongs to the preset signature
    return theory


DOLEV_YAO_EXTRA_SYMBOLS = (Symbol("h", 1),)
