from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qline.algebra import AlgebraElement, normal_order
from qline.exprparse import (Apply, Atom, EvalError, Neg, Num, ParseError, Power, Product, Sum,
                             canonical_text, evaluate, evaluate_text, parse, to_text)
from qline.params import Params

from strategies import words


@pytest.mark.parametrize("text, q, expected", [
    ("x*L", Fraction(3, 2), "3/2*L^1*x^1"),
    ("e1(x^3)", Fraction(2), "14*L^1*x^3"),
    ("star(L)", Fraction(3, 2), "L^-1"),
    ("star(star(x))", Fraction(3, 2), "x"),
    ("e1(L)", Fraction(3, 2), "0"),
    ("L*L^-1", Fraction(3, 2), "1"),
    ("x - x", Fraction(3, 2), "0"),
])
def test_canonical_examples(text, q, expected):
    assert canonical_text(evaluate_text(text, Params(q=q))) == expected


def test_differential_of_constant():
    assert canonical_text(evaluate_text("d(1)")) == "0 ⊗ theta"


@pytest.mark.parametrize("text, col", [("x*(", 4), ("x +* L", 4), ("x $ L", 3), ("foo(x)", 1)])
def test_parse_errors_carry_position(text, col):
    with pytest.raises(ParseError) as ei:
        parse(text)
    assert ei.value.line == 1
    assert ei.value.col == col


@pytest.mark.parametrize("text", ["d(x)*d(x)", "e1(d(x))", "d(x) + x", "(L + x)^-1"])
def test_eval_errors(text):
    with pytest.raises(EvalError):
        evaluate_text(text)


atoms = st.sampled_from([Atom("x"), Atom("L"), Atom("i")]) | st.builds(
    Num, st.fractions(min_value=1, max_value=9, max_denominator=5))


def _extend(children):
    return (st.builds(Power, atoms, st.integers(-3, 3))
            | st.builds(lambda fs: Product(tuple(fs)), st.lists(children, min_size=2, max_size=3))
            | st.builds(Neg, children)
            | st.builds(lambda ts: Sum(tuple(ts)),
                        st.lists(st.tuples(st.sampled_from("+-"), children), min_size=2, max_size=3)
                        .map(lambda ts: [("+", ts[0][1])] + ts[1:]))
            | st.builds(Apply, st.sampled_from(["e1", "eb1", "star"]), children))


asts = st.recursive(atoms, _extend, max_leaves=6)


@given(asts)
def test_print_parse_roundtrip(node):
    assert parse(to_text(node)) == node


@given(asts)
def test_evaluation_stable_under_reprinting(node):
    try:
        v = evaluate(node)
    except (EvalError, ZeroDivisionError):
        return
    assert evaluate_text(to_text(node)) == v


@given(words(derivatives=False))
def test_products_match_normal_order(word):
    names = {"L": "L", "Li": "L^-1", "x": "x", "xi": "x^-1"}
    text = "*".join(names[w] for w in word) or "1"
    assert evaluate_text(text) == normal_order(word, Fraction(3, 2))
