from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qline.algebra import (AlgebraElement, DoubledElement, NoExchangeRule, derive_e1,
                           derive_e1bar, derive_eR1, eliminate_derivatives, involute, lambda1,
                           lambda1bar, normal_order, partial1, partial1bar, rewrite_word, serialize)
from qline.exactnum import CplxRat, qint, z_of

from strategies import elements, words

Q = Fraction(3, 2)


def gen(name, q=Q, p=1):
    return AlgebraElement.gen(name, q, p)


def test_lambda_x(q):
    # x L = q L x
    assert gen("x", q) * gen("L", q) == q * gen("L", q) * gen("x", q)


@pytest.mark.parametrize("word, expected", [
    (["x", "L"], "3/2*L^1*x^1"),
    (["L", "Li"], "1"),
    (["xi", "L"], "2/3*L^1*x^-1"),
    (["d1", "x"], "1 + 3/2*x^1*d1^1"),
    (["db1", "x"], "1 + 2/3*x^1*db1^1"),
])
def test_normal_order_examples(word, expected):
    assert serialize(normal_order(word, Q)) == expected


@pytest.mark.parametrize("n", range(-4, 5))
def test_d1_on_powers(q, n):
    # d1 x^n = q^n x^n d1 + [n]_q x^(n-1), negative n via the geometric series
    lhs = normal_order(["d1", ("x", n)], q)
    qn = (q**n - 1) / (q - 1)
    rhs = q**n * AlgebraElement.monomial(q, 0, n, 1) + qn * AlgebraElement.monomial(q, 0, n - 1)
    assert lhs == rhs


@pytest.mark.parametrize("n", range(-4, 5))
def test_db1_on_powers(q, n):
    s = 1 / q
    lhs = normal_order(["db1", ("x", n)], q)
    rhs = s**n * AlgebraElement.monomial(q, 0, n, 0, 1) + (s**n - 1) / (s - 1) * AlgebraElement.monomial(q, 0, n - 1)
    assert lhs == rhs


@pytest.mark.parametrize("n", range(-4, 5))
def test_e1_closed_forms(q, n):
    z = z_of(q)
    xn = AlgebraElement.monomial(q, 0, n)
    assert derive_e1(xn) == (q**n - 1) / z * AlgebraElement.monomial(q, 1, n)
    assert derive_e1bar(xn) == (1 - q**-n) / z * AlgebraElement.monomial(q, -1, n)
    # derivations are inner
    assert derive_e1(xn) == lambda1(q) * xn - xn * lambda1(q)
    assert derive_e1bar(xn) == lambda1bar(q) * xn - xn * lambda1bar(q)


def test_e1_kills_L():
    assert derive_e1(gen("L")).is_zero()
    assert derive_e1bar(gen("L", Q, -1)).is_zero()


def test_no_exchange_rule():
    with pytest.raises(NoExchangeRule):
        normal_order(["db1", "d1"], Q)
    with pytest.raises(NoExchangeRule):
        rewrite_word(["db1", "x", "d1"], Q)


@given(words())
def test_normal_order_matches_rewriting(word):
    expected = normal_order(word, Q)
    assert rewrite_word(word, Q, "leftmost") == expected
    assert rewrite_word(word, Q, "rightmost") == expected


@given(words(derivatives=False), words(derivatives=False))
def test_concatenation_is_product(u, v):
    assert normal_order(u + v, Q) == normal_order(u, Q) * normal_order(v, Q)


@given(elements(Q), elements(Q), elements(Q))
def test_associative_distributive(f, g, h):
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h


@given(elements(Q), elements(Q))
def test_involution(f, g):
    assert involute(involute(f)) == f
    assert involute(f * g) == involute(g) * involute(f)
    i = AlgebraElement.scalar(CplxRat(0, 1), Q)
    assert involute(i * f) == involute(f) * (-i)


@given(elements(Q), elements(Q))
def test_leibniz(f, g):
    for e in (derive_e1, derive_e1bar):
        assert e(f * g) == e(f) * g + f * e(g)


@given(elements(Q))
def test_reality_of_derivations(f):
    assert involute(derive_e1(f)) == derive_e1bar(involute(f))
    F = DoubledElement(f, f * 2 + 1)
    assert derive_eR1(F).star() == derive_eR1(F.star())


@given(elements(Q), elements(Q))
def test_doubled_star(f, g):
    F, G = DoubledElement(f, g), DoubledElement(g + 1, f)
    assert F.star().star() == F
    assert (F * G).star() == G.star() * F.star()


@pytest.mark.parametrize("beta, betabar", [(1, -1), (2, 3), (CplxRat(2, 1), CplxRat(-1, 3))])
def test_eliminated_derivatives_obey_commutation(q, beta, betabar):
    d1, db1 = partial1(q, beta), partial1bar(q, betabar)
    x, L = gen("x", q), gen("L", q)
    one = AlgebraElement.one(q)
    assert d1 * x - q * x * d1 == one
    assert db1 * x - (1 / q) * x * db1 == one
    assert d1 * L == (1 / q) * L * d1
    assert db1 * L == (1 / q) * L * db1


def test_eliminate_mode_handles_mixed_order():
    f = normal_order(["db1", "d1"], Q, mode="eliminate", beta=1, betabar=-1)
    assert f == partial1bar(Q, -1) * partial1(Q, 1)
    assert not f.has_derivatives()
    g = normal_order(["d1", "x"], Q, mode="eliminate", beta=1, betabar=-1)
    assert g == eliminate_derivatives(normal_order(["d1", "x"], Q), 1, -1)


@pytest.mark.parametrize("beta", [0, CplxRat(0)])
def test_zero_beta_rejected(beta):
    with pytest.raises(ValueError):
        partial1(Q, beta)


def test_inverse_and_powers():
    m = AlgebraElement.monomial(Q, 2, -1, coeff=3)
    assert m * m.inverse() == AlgebraElement.one(Q)
    assert m ** -2 == (m * m).inverse()
    with pytest.raises(ValueError):
        (gen("L") + gen("x")).inverse()


@pytest.mark.parametrize("f, text", [
    (AlgebraElement.zero(Q), "0"),
    (gen("x"), "x"),
    (-gen("x"), "-x"),
    (gen("L", Q, 2), "L^2"),
    (gen("L") - gen("x"), "-x + L"),
    (AlgebraElement.scalar(CplxRat(1, 1), Q) * gen("x"), "(1+i)*x^1"),
])
def test_serialize(f, text):
    assert serialize(f) == text


def test_band():
    f = normal_order(["L", "L", "d1", "db1"], Q)
    assert f.band() == 4
