"""Braid words, Burau/Alexander, cyclic comparison, and band forms."""

import random

import pytest

from branchknot.braids import (
    BandRepresentation,
    BraidWord,
    alexander_of_closure,
    band_representation_matches,
    cyclically_equal,
    reduced_burau,
    require_band_match,
    torus_alexander,
)
from branchknot.errors import ParseError, TemplateMismatch, ValidationError
from branchknot.laurent import LaurentPolynomial


def word(text, strands):
    return BraidWord.from_text(text, strands)


def test_word_validation():
    with pytest.raises(ValidationError):
        BraidWord(1, ())
    with pytest.raises(ValidationError):
        BraidWord(3, ((3, 1),))
    with pytest.raises(ValidationError):
        BraidWord(3, ((1, 2),))


def test_text_round_trip():
    w = word("s1 s2^-1 s1 s1^-1", 3)
    assert w.to_text() == "s1 s2^-1 s1 s1^-1"
    assert BraidWord.from_text(w.to_text(), 3) == w
    assert word("", 4).letters == ()
    with pytest.raises(ParseError):
        word("sigma1", 3)
    with pytest.raises(ParseError):
        word("s1^2", 3)


def test_algebra():
    a = word("s1 s2", 3)
    b = word("s2^-1", 3)
    assert (a * b).to_text() == "s1 s2 s2^-1"
    assert (a * b).free_reduce() == word("s1", 3)
    assert a.inverse().to_text() == "s2^-1 s1^-1"
    assert (a * a.inverse()).free_reduce().letters == ()
    assert a.power(3) == a * a * a
    assert a.power(-2) == a.inverse() * a.inverse()
    assert word("s1 s1 s2^-1", 3).exponent_sum() == 1


def test_permutation_and_closure():
    assert word("s1", 2).permutation() == (2, 1)
    # entry i-1 is the final position of the strand that starts at position i
    assert word("s1 s2", 3).permutation() == (3, 1, 2)
    assert word("s1 s1", 2).permutation() == (1, 2)
    assert word("s1 s1 s1", 2).closure_components() == 1
    assert word("s1 s1", 2).closure_components() == 2
    assert word("", 3).closure_components() == 3
    assert word("s1 s2 s3", 4).is_knot_closure()


def test_burau_braid_relation():
    # sigma_1 sigma_2 sigma_1 = sigma_2 sigma_1 sigma_2 must hold in any
    # matrix representation of B_3.
    lhs = reduced_burau(word("s1 s2 s1", 3))
    rhs = reduced_burau(word("s2 s1 s2", 3))
    assert lhs == rhs


def test_burau_far_generators_commute():
    lhs = reduced_burau(word("s1 s3", 4))
    rhs = reduced_burau(word("s3 s1", 4))
    assert lhs == rhs


def test_burau_inverse_gives_identity():
    w = word("s1 s2^-1 s3 s2 s1^-1", 4)
    mat = reduced_burau(w * w.inverse())
    one, zero = LaurentPolynomial.one(), LaurentPolynomial.zero()
    for i, row in enumerate(mat):
        for j, entry in enumerate(row):
            assert entry == (one if i == j else zero)


def test_burau_is_a_homomorphism_random():
    rng = random.Random(917)
    for _ in range(50):
        strands = rng.randint(2, 5)
        letters_a = [(rng.randint(1, strands - 1), rng.choice((-1, 1))) for _ in range(6)]
        letters_b = [(rng.randint(1, strands - 1), rng.choice((-1, 1))) for _ in range(6)]
        a = BraidWord(strands, tuple(letters_a))
        b = BraidWord(strands, tuple(letters_b))
        ma, mb = reduced_burau(a), reduced_burau(b)
        prod = [
            [
                sum((ma[i][k] * mb[k][j] for k in range(len(mb))), LaurentPolynomial.zero())
                for j in range(len(mb))
            ]
            for i in range(len(ma))
        ]
        assert prod == reduced_burau(a * b)


def test_alexander_frozen_values():
    assert alexander_of_closure(word("s1", 2)) == LaurentPolynomial.one()
    trefoil = LaurentPolynomial({-1: 1, 0: -1, 1: 1})
    assert alexander_of_closure(word("s1 s1 s1", 2)) == trefoil
    # Mirror trefoil: Alexander cannot tell the two apart.
    assert alexander_of_closure(word("s1^-1 s1^-1 s1^-1", 2)) == trefoil
    # Unit-normalized so the lowest coefficient is positive.
    figure_eight = LaurentPolynomial({-1: 1, 0: -3, 1: 1})
    assert alexander_of_closure(word("s1 s2^-1 s1 s2^-1", 3)) == figure_eight
    # Cinquefoil = (2,5) torus knot.
    assert alexander_of_closure(word("s1 s1 s1 s1 s1", 2)) == torus_alexander(2, 5)


def test_torus_alexander_closed_form_matches_braids():
    # The (n, m) torus knot is the closure of (s1 ... s_{n-1})^m.
    for n, m in ((2, 3), (2, 7), (3, 4), (3, 5)):
        twist = BraidWord(n, tuple((k, 1) for k in range(1, n)))
        assert alexander_of_closure(twist.power(m)) == torus_alexander(n, m)
        assert torus_alexander(n, m).is_symmetric()


def test_cyclically_equal_basics():
    a = word("s1 s2 s1", 3)
    assert cyclically_equal(a, word("s2 s1 s1", 3))       # rotation
    assert cyclically_equal(a, word("s1 s2 s2^-1 s2 s1", 3))  # free insertion
    assert not cyclically_equal(a, word("s1 s2", 3))
    assert not cyclically_equal(a, a.inverse())
    assert cyclically_equal(word("", 3), word("s1 s1^-1", 3))


def test_cyclically_equal_commutation():
    # Distant generators commute, also across the cyclic seam.
    assert cyclically_equal(word("s1 s3", 4), word("s3 s1", 4))
    assert cyclically_equal(word("s2 s4 s1 s3", 5), word("s1 s3 s2 s4", 5))
    assert not cyclically_equal(word("s1 s2", 3), word("s2^-1 s1", 3))


def test_band_representation_expansion():
    conj = word("s2 s1", 3)
    rep = BandRepresentation(
        strands=3,
        sign=1,
        even_block=(2,),
        odd_block=(1,),
        bands=((conj, 1, 1),),
    )
    expanded = rep.expansion()
    assert expanded.to_text() == "s2 s1 s2 s1 s1 s1 s1^-1 s2^-1"
    assert rep.euler_characteristic() == 3 - (2 + 2)
    assert rep.genus() == 1
    assert band_representation_matches(rep, expanded)
    # Any cyclic rotation still certifies.
    rotated = BraidWord(3, expanded.letters[3:] + expanded.letters[:3])
    assert band_representation_matches(rep, rotated)
    require_band_match(rep, rotated)
    with pytest.raises(TemplateMismatch):
        require_band_match(rep, word("s1 s2", 3))


def test_band_representation_validation():
    with pytest.raises(ValidationError):
        BandRepresentation(3, 1, even_block=(1,), odd_block=(), bands=())
    with pytest.raises(ValidationError):
        BandRepresentation(3, 1, even_block=(), odd_block=(2,), bands=())
    with pytest.raises(ValidationError):
        BandRepresentation(3, 2, even_block=(), odd_block=(1,), bands=())
    with pytest.raises(ValidationError):
        BandRepresentation(3, 1, (), (1,), ((word("", 3), 1, 2),))
