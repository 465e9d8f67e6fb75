"""Attacker knowledge: recipe enumeration, satisfaction, static equivalence."""

from latspi.knowledge import (
    recipe_enum,
    satisfies,
    static_equiv_witness,
    static_impl_witness,
)
from latspi.terms import (
    Alias,
    ID_ALIAS,
    Substitution,
    Symbol,
    Var,
    app,
    dolev_yao,
    EMPTY_THEORY,
)

L = Alias("", "l")
L0 = Alias("0", "l")
L1 = Alias("1", "l")
H = Symbol("h", 1)
PAIR = Symbol("pair", 2)


# --- recipe enumeration ----------------------------------------------------


def test_recipe_enum_counts_unary():
    # atoms {l, a}; one unary symbol: depth d adds 2 recipes per level
    rs = recipe_enum(frozenset({L}), frozenset({"a"}), (H,), 2, EMPTY_THEORY)
    assert len(rs) == 6
    assert set(map(str, rs)) == {"l", "a", "h(l)", "h(a)", "h(h(l))", "h(h(a))"}


def test_recipe_enum_dedups_modulo_theory():
    th = dolev_yao()
    sig = tuple(sorted(th.symbols(), key=lambda s: (s.name, s.arity)))
    rs = recipe_enum(frozenset(), frozenset({"a", "b"}), sig, 2, th)
    nfs = [th.normalize(r) for r in rs]
    assert len(nfs) == len(set(nfs))  # one representative per class
    assert Var("a") in nfs and Var("b") in nfs


def test_recipe_enum_deterministic():
    rs1 = recipe_enum(frozenset({L0, L1}), frozenset({"a"}), (H,), 1, EMPTY_THEORY)
    rs2 = recipe_enum(frozenset({L0, L1}), frozenset({"a"}), (H,), 1, EMPTY_THEORY)
    assert rs1 == rs2


# --- satisfaction ----------------------------------------------------------


def test_satisfaction_of_hash_link():
    # {0l -> x, 1l -> h(x)} under a restricted x satisfies h(0l) = 1l
    frame = Substitution({L0: Var("%0"), L1: app("h", Var("%0"))})
    assert satisfies(frame, app("h", L0), L1, EMPTY_THEORY)


def test_satisfaction_distinguishes_public_from_private():
    public = Substitution({L: Var("x")})
    private = Substitution({L: Var("%0")})
    assert satisfies(public, L, Var("x"), EMPTY_THEORY)
    assert not satisfies(private, L, Var("x"), EMPTY_THEORY)


def test_satisfaction_modulo_theory():
    th = dolev_yao()
    frame = Substitution({L: app("enc", Var("%0"), Var("%1")), L0: Var("%1")})
    assert satisfies(frame, app("dec", L, L0), Var("%0"), th)


# --- static equivalence ----------------------------------------------------


def test_static_witness_public_vs_private():
    left = Substitution({L: Var("x")})
    right = Substitution({L: Var("%0")})
    w = static_equiv_witness(left, right, ID_ALIAS, frozenset({"x"}), (), 1, EMPTY_THEORY)
    assert w is not None
    assert {str(w.m), str(w.n)} == {"l", "x"}
    assert w.holds_left and not w.holds_right


def test_static_witness_minimal_and_deterministic():
    left = Substitution({L: Var("x")})
    right = Substitution({L: Var("%0")})
    args = (left, right, ID_ALIAS, frozenset({"x"}), (H,), 2, EMPTY_THEORY)
    assert static_equiv_witness(*args) == static_equiv_witness(*args)


def test_static_implication_is_one_directional():
    # right satisfies l = x but left does not: implication left-to-right holds
    left = Substitution({L: Var("%0")})
    right = Substitution({L: Var("x")})
    assert static_impl_witness(left, right, ID_ALIAS, frozenset({"x"}), (), 1, EMPTY_THEORY) is None
    assert static_equiv_witness(left, right, ID_ALIAS, frozenset({"x"}), (), 1, EMPTY_THEORY) is not None


def test_random_nonce_indistinguishable_from_ciphertext():
    # a fresh name and an encryption under an unknown key cannot be separated
    th = dolev_yao()
    sig = tuple(sorted(th.symbols(), key=lambda s: (s.name, s.arity)))
    cipher = Substitution({L: app("enc", app("pair", Var("%0"), Var("hi")), Var("%1"))})
    nonce = Substitution({L: Var("%2")})
    assert static_equiv_witness(cipher, nonce, ID_ALIAS, frozenset({"hi"}), sig, 1, th) is None


def test_leaked_key_separates_ciphertext_from_nonce():
    th = dolev_yao()
    sig = tuple(sorted(th.symbols(), key=lambda s: (s.name, s.arity)))
    cipher = Substitution(
        {L: app("enc", app("pair", Var("%0"), Var("hi")), Var("%1")), L0: Var("%1")}
    )
    nonce = Substitution({L: Var("%2"), L0: Var("%3")})
    w = static_equiv_witness(cipher, nonce, ID_ALIAS, frozenset({"hi"}), sig, 2, th)
    assert w is not None
    assert w.holds_left != w.holds_right


def test_alias_bijection_applied_to_right():
    rho = ID_ALIAS.extend(L0, L1)
    left = Substitution({L0: Var("x")})
    right = Substitution({L1: Var("x")})
    assert static_equiv_witness(left, right, rho, frozenset({"x"}), (), 1, EMPTY_THEORY) is None
