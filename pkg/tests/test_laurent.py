"""Exact integer Laurent polynomial arithmetic."""

import pytest

from branchknot.errors import NonUnitRemainder
from branchknot.laurent import LaurentPolynomial

T = LaurentPolynomial.t


def test_zero_and_one():
    zero = LaurentPolynomial.zero()
    one = LaurentPolynomial.one()
    assert zero.is_zero()
    assert not zero
    assert one
    assert one.is_unit()
    assert str(zero) == "0"
    assert str(one) == "1"


def test_dropped_zero_coefficients():
    p = LaurentPolynomial({2: 0, 1: 3, 0: 0})
    assert p.coeffs == {1: 3}
    assert p[0] == 0 and p[1] == 3


def test_arithmetic():
    p = T(1) + T(0, 2)          # t + 2
    q = T(-1) - T(0)            # t^-1 - 1
    assert (p * q).coeffs == {-1: 2, 0: -1, 1: -1}
    assert (p - p).is_zero()
    assert (-q).coeffs == {-1: -1, 0: 1}
    assert p.shift(3).coeffs == {4: 1, 3: 2}


def test_degree_window():
    p = T(-2, 5) + T(3)
    assert p.min_exp == -2
    assert p.max_exp == 3
    with pytest.raises(ValueError):
        LaurentPolynomial.zero().min_exp


def test_reciprocal_and_symmetry():
    trefoil = T(-1) - T(0) + T(1)   # t^-1 - 1 + t
    assert trefoil.is_symmetric()
    assert trefoil.reciprocal() == trefoil
    skew = T(2) + T(0)
    assert not skew.is_symmetric()
    assert skew.reciprocal().coeffs == {-2: 1, 0: 1}


def test_divide_exact():
    # (1 - t^6) / (1 - t^2) = 1 + t^2 + t^4, exactly.
    num = LaurentPolynomial({0: 1, 6: -1})
    den = LaurentPolynomial({0: 1, 2: -1})
    assert num.divide_exact(den).coeffs == {0: 1, 2: 1, 4: 1}
    with pytest.raises(NonUnitRemainder):
        LaurentPolynomial({0: 1, 5: -1}).divide_exact(den)
    with pytest.raises(ZeroDivisionError):
        num.divide_exact(LaurentPolynomial.zero())
    # Laurent shifts divide out as well.
    assert num.shift(-3).divide_exact(den.shift(2)).coeffs == {-5: 1, -3: 1, -1: 1}


def test_normalize_unit_centers_and_fixes_sign():
    # Even window: centered around exponent zero.
    p = LaurentPolynomial({0: 1, 1: -1, 2: 1})
    assert p.normalize_unit().coeffs == {-1: 1, 0: -1, 1: 1}
    # Unit multiples collapse to the same representative.
    q = -p.shift(5)
    assert q.normalize_unit() == p.normalize_unit()
    # Odd window: anchored at exponent zero with positive lowest coefficient.
    r = LaurentPolynomial({3: -2, 4: 1})
    assert r.normalize_unit().coeffs == {0: 2, 1: -1}


def test_evaluation():
    p = T(-1) - T(0) + T(1)
    assert p(2.0) == pytest.approx(2.0 - 1 + 0.5)
    assert p(1.0) == pytest.approx(1.0)


def test_str_formatting():
    assert str(T(-1) - T(0) + T(1)) == "t^-1 - 1 + t"
    assert str(T(0, -3) + T(2, 2)) == "-3 + 2*t^2"
    assert str(T(1, -1)) == "-t"
