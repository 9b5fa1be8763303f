from __future__ import annotations

import pickle
from fractions import Fraction

import pytest

from wavedecay.decay_calculus.exponents import Exp, Q, emax, emin, to_q

SIGMA = Q(1, 10)


def test_to_q_refuses_floats():
    with pytest.raises(TypeError):
        to_q(0.1)
    assert to_q("3/4") == Fraction(3, 4)
    assert to_q(2) == 2


def test_tilt_breaks_exact_collision():
    # 5/2 + 5 sigma hits 3 exactly at sigma = 1/10; the tilt keeps it below
    x = Exp.of(Q(5, 2)) + Exp.sigma(SIGMA, 5)
    assert x.value == 3
    assert x < 3
    assert x != 3
    assert x.same_value(3)


def test_tilt_cancels():
    s = Exp.sigma(SIGMA)
    x = (Exp.of(2) + s) - s
    assert x == 2
    assert hash(x) == hash(Exp.of(2))


def test_ordering_is_lexicographic():
    s = Exp.sigma(SIGMA)
    # sigma sits just below 1/10, so 1/5 - sigma sits just above 1/10
    assert Exp.of(Q(1, 5)) - s > Exp.of(Q(1, 10))
    assert Exp.of(Q(3, 10)) > Exp.of(Q(1, 5)) + s
    assert emin(Exp.of(1), Exp.of(1) + s) == Exp.of(1)
    assert emax(Exp.of(1), Exp.of(1) + s) == Exp.of(1) + s


def test_arithmetic_and_text():
    x = Exp.of("1/2") + 1 - Exp.of(Q(1, 3))
    assert x.value == Q(7, 6)
    assert x.text() == "7/6"
    assert (-x).value == Q(-7, 6)
    assert 1 - Exp.of(Q(1, 4)) == Exp.of(Q(3, 4))
    assert float(Exp.of(Q(1, 4))) == 0.25


def test_value_and_tilt_round_trip():
    x = Exp.sigma(Q(1, 14), 3) + Q(1, 2)
    assert x.value == Q(1, 2) + Q(3, 14)
    assert x.tilt == 3
    y = pickle.loads(pickle.dumps(x))
    assert y == x and y.tilt == 3


def test_immutable():
    x = Exp.of(1)
    with pytest.raises(AttributeError):
        x.foo = 2
