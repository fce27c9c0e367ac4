from fractions import Fraction

import mpmath as mp
import pytest

from bautin_lab.errors import UsageError
from bautin_lab.scalars import (
    RATIONAL,
    BigRealDomain,
    LinearForm,
    parse_rational,
    scalar_is_zero,
    scalar_to_str,
)


def test_parse_rational_forms():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational("-7") == Fraction(-7)
    assert parse_rational("0.25") == Fraction(1, 4)
    assert parse_rational(" -0.125 ") == Fraction(-1, 8)
    with pytest.raises(UsageError):
        parse_rational("abc")
    with pytest.raises(UsageError):
        parse_rational("1/0")


def test_rational_domain_coerce():
    assert RATIONAL.coerce(3) == Fraction(3)
    assert RATIONAL.coerce("2/5") == Fraction(2, 5)
    assert RATIONAL.is_negligible(Fraction(0))
    assert not RATIONAL.is_negligible(Fraction(1, 10**50))


def test_bigreal_domain():
    dom = BigRealDomain(dps=40)
    x = dom.coerce("1/3")
    with dom.context():
        assert abs(x * 3 - 1) < mp.mpf(10) ** -38
    assert dom.is_negligible(dom.coerce("1e-25"))
    assert not dom.is_negligible(dom.coerce("1e-15"))
    assert dom.widened().dps == 80
    with pytest.raises(UsageError):
        BigRealDomain(dps=10)


def test_linear_form_arithmetic():
    u = LinearForm.unknown((3, 0), Fraction(1))
    v = LinearForm.unknown((2, 1), Fraction(1))
    f = 2 * u + 3 * v + Fraction(1, 2)
    assert f.const == Fraction(1, 2)
    assert f.coefficient((3, 0)) == 2
    assert f.coefficient((0, 3)) == 0
    g = (f - u) / 2
    assert g.coefficient((3, 0)) == Fraction(1, 2)
    assert g.coefficient((2, 1)) == Fraction(3, 2)
    assert (f - f).is_zero()
    assert f.evaluate({(3, 0): Fraction(1), (2, 1): Fraction(-1)}) == Fraction(-1, 2)


def test_linear_form_rejects_unknown_products():
    u = LinearForm.unknown((3, 0))
    v = LinearForm.unknown((2, 1))
    with pytest.raises(UsageError):
        u * v
    # a form that is actually constant multiplies fine
    assert (LinearForm(Fraction(2)) * u).coefficient((3, 0)) == 2
    with pytest.raises(UsageError):
        u / v


def test_linear_form_zero_pruning():
    f = LinearForm(Fraction(0), {(1, 1): Fraction(0), (2, 0): Fraction(1)})
    assert (1, 1) not in f.coeffs
    assert not f.is_zero()
    assert (f - LinearForm.unknown((2, 0), Fraction(1))).is_zero()
    assert scalar_is_zero(f - LinearForm.unknown((2, 0), Fraction(1)), RATIONAL)


def test_scalar_to_str_lossless():
    assert scalar_to_str(Fraction(3, 8), RATIONAL) == "3/8"
    dom = BigRealDomain(dps=40)
    s = scalar_to_str(dom.coerce("0.1"), dom)
    with dom.context():
        assert abs(mp.mpf(s) - dom.coerce("0.1")) < mp.mpf(10) ** -38
