from __future__ import annotations

import itertools
import random

import pytest

from loopmod.enumerate import Q5_ROWS, all_loops, cyclic
from loopmod.errors import EntryOutOfRange, IndexOutOfRange, NoIdentity, NotLatin, NotSquare, Unsupported
from loopmod.loop import (
    LEFT,
    RIGHT,
    LoopTable,
    Permutation,
    associativity_witness,
    canonical_form,
    compose,
    deviation,
    divide,
    format_loop,
    multiply,
    normalize,
    parse_loop,
    relabel,
    translation,
    validate_table,
)


def test_validate_trivial_loop():
    L = validate_table([[0]])
    assert (L.order, L.identity) == (1, 0)


def test_validate_cyclic_and_q5():
    L = validate_table([[(i + j) % 4 for j in range(4)] for i in range(4)])
    assert L.identity == 0
    q = validate_table(Q5_ROWS)
    assert q.identity == 0
    # direct inspection: each row and column is a permutation
    for i in range(5):
        assert sorted(Q5_ROWS[i]) == list(range(5))
        assert sorted(r[i] for r in Q5_ROWS) == list(range(5))


def test_identity_detected_when_not_zero():
    # cyclic 3 relabeled so that the identity is 2
    L = relabel(cyclic(3), [2, 0, 1])
    assert validate_table(L.rows()).identity == 2
    assert normalize(L).identity == 0


@pytest.mark.parametrize(
    "raw, exc, attr",
    [
        ([[0, 1], [1, 1]], NotLatin, ("row", 1)),
        ([[0, 1, 2], [1, 2, 0], [1, 0, 2]], NotLatin, ("column", 0)),
        ([[0, 2, 1], [2, 1, 0], [1, 0, 2]], NoIdentity, None),
        ([[0, 1], [1, 2]], EntryOutOfRange, None),
        ([[0, 1], [1]], NotSquare, None),
    ],
)
def test_validate_errors(raw, exc, attr):
    with pytest.raises(exc) as info:
        validate_table(raw)
    if attr:
        assert (info.value.kind, info.value.index) == attr


def test_identity_hint_checked():
    with pytest.raises(NoIdentity):
        validate_table([[(i + j) % 3 for j in range(3)] for i in range(3)], identity_hint=1)


def test_multiply(q5, c4):
    assert multiply(q5, 1, 2) == 3
    assert multiply(c4, 3, 2) == 1
    for x in range(5):
        assert multiply(q5, 0, x) == x
    with pytest.raises(IndexOutOfRange):
        multiply(q5, 5, 0)


def test_divide(q5):
    assert divide(q5, LEFT, 1, 2) == 4
    assert divide(q5, RIGHT, 1, 2) == 4
    for a, b in itertools.product(range(5), repeat=2):
        assert multiply(q5, a, divide(q5, LEFT, a, b)) == b
        assert multiply(q5, divide(q5, RIGHT, a, b), a) == b
        assert divide(q5, LEFT, 0, b) == b


def test_translation(q5):
    assert translation(q5, LEFT, 0).is_identity()
    assert translation(q5, LEFT, 1).images == (1, 0, 3, 4, 2)
    assert translation(q5, RIGHT, 1).images == tuple(r[1] for r in Q5_ROWS) == (1, 0, 3, 4, 2)


def test_translation_inverse_is_division(small_loops):
    for L in small_loops:
        for a in L.elements:
            li = translation(L, LEFT, a).inverse()
            ri = translation(L, RIGHT, a).inverse()
            for b in L.elements:
                assert li[b] == divide(L, LEFT, a, b)
                assert ri[b] == divide(L, RIGHT, a, b)


def test_permutation_rejects_non_bijection():
    with pytest.raises(ValueError):
        Permutation((0, 0, 1))


def test_deviation_examples(q5, c4):
    for a, b in itertools.product(range(4), repeat=2):
        assert deviation(c4, a, b).is_identity()
    for b in range(5):
        assert deviation(q5, 0, b).is_identity()
    assert deviation(q5, 1, 1).images == (0, 1, 4, 2, 3)


def test_deviation_factorization_exhaustive():
    for n in range(1, 7):
        loops = all_loops(n)
        if n == 6:
            loops = random.Random(6).sample(loops, 200)
        for L in loops:
            for a, b in itertools.product(L.elements, repeat=2):
                phi = deviation(L, a, b)
                ab = multiply(L, a, b)
                lhs = compose(translation(L, LEFT, a), translation(L, LEFT, b))
                assert lhs == compose(phi, translation(L, LEFT, ab))
                assert phi[ab] == ab


def test_associativity_witness(q5, c4, octo):
    assert associativity_witness(c4).associative
    w = associativity_witness(q5)
    assert w.triple == (1, 1, 2)
    assert (w.left_product, w.right_product) == (2, 4)
    a, b, c = w.triple
    assert multiply(q5, multiply(q5, a, b), c) == w.left_product
    assert multiply(q5, a, multiply(q5, b, c)) == w.right_product
    assert not associativity_witness(octo).associative


def test_witness_agrees_with_deviation(small_loops):
    for L in small_loops:
        trivial = all(deviation(L, a, b).is_identity() for a in L.elements for b in L.elements)
        assert associativity_witness(L).associative == trivial


def test_canonical_form_idempotent_and_relabel(c4, q5):
    swapped = relabel(c4, [0, 3, 2, 1])
    assert swapped == c4  # negation is an automorphism of Z4
    other = relabel(c4, [0, 2, 1, 3])
    assert other != c4 and canonical_form(other) == canonical_form(c4)
    assert canonical_form(swapped) == canonical_form(c4)
    for L in (c4, q5):
        cf = canonical_form(L)
        assert canonical_form(cf) == cf
        assert cf.identity == 0
    assert canonical_form(q5) != canonical_form(cyclic(5))


def test_canonical_form_invariant_under_random_relabeling(q5, c4):
    rng = random.Random(2024)
    for L in (q5, c4, cyclic(6), all_loops(6)[4321]):
        target = canonical_form(L)
        for _ in range(100):
            rest = list(range(1, L.order))
            rng.shuffle(rest)
            sigma = [0] + rest
            assert canonical_form(relabel(L, sigma)) == target


def test_canonical_form_handles_nonzero_identity():
    L = relabel(cyclic(4), [3, 1, 2, 0])
    assert L.identity == 3
    assert canonical_form(L) == canonical_form(cyclic(4))


def test_canonical_form_unsupported(octo):
    with pytest.raises(Unsupported):
        canonical_form(octo)


def test_order_one_maps_are_identity():
    L = validate_table([[0]])
    assert translation(L, LEFT, 0).is_identity()
    assert deviation(L, 0, 0).is_identity()
    assert canonical_form(L) == L


def test_text_format_round_trip(q5):
    text = format_loop(q5)
    assert text.splitlines()[0] == "5 0"
    assert parse_loop(text) == q5
    commented = "# Q5\n5\n" + "\n".join(" ".join(map(str, r)) for r in Q5_ROWS) + "\n"
    assert parse_loop(commented) == q5


def test_loop_table_is_immutable(q5):
    with pytest.raises(AttributeError):
        q5.order = 3
    assert isinstance(q5, LoopTable)
