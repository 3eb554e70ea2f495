from __future__ import annotations

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from loopmod.enumerate import cyclic
from loopmod.errors import DSLSyntaxError, EmptySide, NonlinearPoint, UnboundVariable, UnknownBuiltin
from loopmod.identities import (
    BUILTINS,
    Mul,
    Var,
    builtin,
    check_identity,
    compile_identity,
    compile_translation_word,
    default_point,
    evaluate,
    evaluate_word,
    make_identity,
    occurrences,
    parse_identity,
)
from loopmod.loop import LEFT, RIGHT, associativity_witness

x, y, z = Var("x"), Var("y"), Var("z")
KUNEN_LHS = Mul(Mul(Mul(x, y), z), y)
KUNEN_RHS = Mul(x, Mul(y, Mul(z, y)))


def test_parse_kunen():
    ident = parse_identity("((x*y)*z)*y = x*(y*(z*y))")
    assert (ident.lhs, ident.rhs) == (KUNEN_LHS, KUNEN_RHS)
    assert ident.variables == ("x", "y", "z")


def test_parse_trivial_and_associativity():
    t = parse_identity("x = x")
    assert (t.lhs, t.rhs, t.variables) == (x, x, ("x",))
    a = parse_identity("(x*y)*z = x*(y*z)")
    assert a.lhs == Mul(Mul(x, y), z) and a.rhs == Mul(x, Mul(y, z))


def test_parse_whitespace_and_outer_parens():
    assert parse_identity(" ( ( x * y ) * z )=x*( y*z )") == builtin("associativity")


@pytest.mark.parametrize(
    "text, offset",
    [("x*y*z = x", 3), ("(x*y = x", 5), ("X = x", 0), ("x = x y", 6), ("(x y) = x", 3)],
)
def test_syntax_errors_report_offset(text, offset):
    with pytest.raises(DSLSyntaxError) as info:
        parse_identity(text)
    assert info.value.offset == offset


@pytest.mark.parametrize("text", ["= x", "x =", "  =  "])
def test_empty_side(text):
    with pytest.raises(EmptySide):
        parse_identity(text)


def test_builtins():
    assert builtin("kunen") == parse_identity("((x*y)*z)*y = x*(y*(z*y))")
    assert builtin("moufang-right") == builtin("kunen")
    assert builtin("associativity") == parse_identity("(x*y)*z = x*(y*z)")
    assert builtin("flexible") == parse_identity("x*(y*x) = (x*y)*x")
    with pytest.raises(UnknownBuiltin):
        builtin("bogus")


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_round_trip_builtins(name):
    ident = builtin(name)
    assert parse_identity(str(ident)) == ident


def terms(names="xyzw"):
    leaf = st.sampled_from([Var(c) for c in names])
    return st.recursive(leaf, lambda kids: st.builds(Mul, kids, kids), max_leaves=8)


@given(terms(), terms())
def test_round_trip_random(lhs, rhs):
    ident = make_identity(lhs, rhs)
    assert parse_identity(str(ident)) == ident


@pytest.mark.parametrize("n", range(2, 9))
def test_groups_satisfy_every_builtin(n):
    G = cyclic(n)
    for name in BUILTINS:
        assert check_identity(G, builtin(name)).holds, name


def test_check_identity_counterexample(q5, c4, octo):
    assert check_identity(c4, builtin("associativity")).holds
    v = check_identity(q5, builtin("associativity"))
    assert not v.holds
    ce = v.counterexample
    assert ce.assignment == {"x": 1, "y": 1, "z": 2}
    assert associativity_witness(q5).triple == (1, 1, 2)
    ident = builtin("associativity")
    assert evaluate(q5, ident.lhs, ce.assignment) == ce.lhs
    assert evaluate(q5, ident.rhs, ce.assignment) == ce.rhs
    assert ce.lhs != ce.rhs


def test_octonions_are_moufang(octo):
    v = check_identity(octo, builtin("kunen"))
    assert v.holds and v.cases == 16 ** 3
    for name in ("moufang-left", "flexible"):
        assert check_identity(octo, builtin(name)).holds
    assert not check_identity(octo, builtin("associativity")).holds


def test_compile_kunen_sides():
    lw = compile_translation_word(KUNEN_LHS, "z")
    rw = compile_translation_word(KUNEN_RHS, "z")
    assert lw.factors == ((RIGHT, y), (LEFT, Mul(x, y)))
    assert rw.factors == ((LEFT, x), (LEFT, y), (RIGHT, y))
    assert compile_translation_word(z, "z").factors == ()


def test_compile_rejects_nonlinear_point():
    with pytest.raises(NonlinearPoint):
        compile_translation_word(KUNEN_LHS, "y")
    with pytest.raises(NonlinearPoint):
        compile_translation_word(Mul(x, y), "z")


def test_default_point():
    assert default_point(builtin("kunen")) == "z"
    assert default_point(builtin("associativity")) == "z"
    assert default_point(builtin("flexible")) == "y"
    with pytest.raises(NonlinearPoint):
        default_point(parse_identity("(x*x)*x = x*(x*x)"))


def test_evaluate_word(q5):
    lw = compile_translation_word(KUNEN_LHS, "z")
    assert evaluate_word(q5, lw, {"x": 1, "y": 1}).images == (1, 0, 3, 4, 2)
    assert evaluate_word(q5, compile_translation_word(z, "z"), {}).is_identity()
    with pytest.raises(UnboundVariable):
        evaluate_word(q5, lw, {"x": 1})


def test_kunen_words_agree_on_octonions(octo):
    lw, rw = compile_identity(builtin("kunen"), "z")
    for a, b in itertools.product(range(16), repeat=2):
        env = {"x": a, "y": b}
        assert evaluate_word(octo, lw, env) == evaluate_word(octo, rw, env)


def test_compiler_soundness(small_loops):
    sides = []
    for name in BUILTINS:
        ident = builtin(name)
        for side in (ident.lhs, ident.rhs):
            for v in ident.variables:
                if occurrences(side, v) == 1:
                    sides.append((side, v))
    for L in small_loops:
        for side, point in sides:
            word = compile_translation_word(side, point)
            params = sorted({c for c in "xyz" if occurrences(side, c)} - {point})
            for vals in itertools.product(L.elements, repeat=len(params)):
                env = dict(zip(params, vals))
                perm = evaluate_word(L, word, env)
                for p in L.elements:
                    assert perm[p] == evaluate(L, side, {**env, point: p})


def test_check_agrees_with_word_equality(small_loops):
    for L in small_loops:
        for name in ("associativity", "kunen", "moufang-left", "left-bol", "right-bol"):
            ident = builtin(name)
            lw, rw = compile_identity(ident)
            params = [v for v in ident.variables if v != lw.point]
            words_equal = all(
                evaluate_word(L, lw, dict(zip(params, vals))) == evaluate_word(L, rw, dict(zip(params, vals)))
                for vals in itertools.product(L.elements, repeat=len(params))
            )
            assert check_identity(L, ident).holds == words_equal
