"""Braid words on N strands and the invariants of their closures.

A word is a sequence of letters (k, e) with 1 <= k <= N-1 and e = +-1,
meaning the Artin generator sigma_k or its inverse.  Positions are counted
from 1 at the top strand.  The module provides free reduction, the induced
strand permutation, closure component count, the reduced Burau matrix over
exact integer Laurent polynomials, the Alexander polynomial of a knot
closure, and the block-and-band decomposition emitted by the tracing stage.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import NotAKnot, ParseError, TemplateMismatch, ValidationError
from .laurent import LaurentPolynomial

Letter = tuple[int, int]  # (generator index, +1 or -1)


@dataclass(frozen=True)
class BraidWord:
    """A word in the braid group on `strands` strands."""

    strands: int
    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        if self.strands < 2:
            raise ValidationError(f"braid words need at least 2 strands, got {self.strands}")
        letters = tuple((int(k), int(e)) for k, e in self.letters)
        for k, e in letters:
            if not 1 <= k <= self.strands - 1:
                raise ValidationError(
                    f"generator index {k} outside 1..{self.strands - 1}"
                )
            if e not in (-1, 1):
                raise ValidationError(f"letter sign must be +-1, got {e}")
        object.__setattr__(self, "letters", letters)

    # -- basic algebra -----------------------------------------------------

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        if other.strands != self.strands:
            raise ValidationError("cannot concatenate words on different strand counts")
        return BraidWord(self.strands, self.letters + other.letters)

    def inverse(self) -> "BraidWord":
        return BraidWord(self.strands, tuple((k, -e) for k, e in reversed(self.letters)))

    def power(self, n: int) -> "BraidWord":
        base = self if n >= 0 else self.inverse()
        return BraidWord(self.strands, base.letters * abs(n))

    def free_reduce(self) -> "BraidWord":
        """Cancel adjacent sigma_k sigma_k^-1 pairs until none remain."""
        stack: list[Letter] = []
        for k, e in self.letters:
            if stack and stack[-1] == (k, -e):
                stack.pop()
            else:
                stack.append((k, e))
        return BraidWord(self.strands, tuple(stack))

    def exponent_sum(self) -> int:
        return sum(e for _, e in self.letters)

    def permutation(self) -> tuple[int, ...]:
        """perm[i-1] is the final position of the strand starting at position i."""
        n = self.strands
        pos = list(range(n))  # pos[p] = strand currently at position p (0-based)
        for k, _ in self.letters:
            pos[k - 1], pos[k] = pos[k], pos[k - 1]
        final = [0] * n
        for p, strand in enumerate(pos):
            final[strand] = p + 1
        return tuple(final)

    def closure_components(self) -> int:
        """Number of components of the closed braid."""
        perm = self.permutation()
        seen = [False] * self.strands
        count = 0
        for i in range(self.strands):
            if seen[i]:
                continue
            count += 1
            j = i
            while not seen[j]:
                seen[j] = True
                j = perm[j] - 1
        return count

    def is_knot_closure(self) -> bool:
        return self.closure_components() == 1

    # -- text format -------------------------------------------------------

    def to_text(self) -> str:
        """Whitespace-separated tokens: s<k> for sigma_k, s<k>^-1 for its inverse."""
        return " ".join(f"s{k}" if e == 1 else f"s{k}^-1" for k, e in self.letters)

    @staticmethod
    def from_text(text: str, strands: int) -> "BraidWord":
        letters: list[Letter] = []
        for i, token in enumerate(text.split()):
            m = re.fullmatch(r"s(\d+)(\^-1)?", token)
            if m is None:
                raise ParseError(f"bad braid token {token!r} (position {i + 1})")
            letters.append((int(m.group(1)), -1 if m.group(2) else 1))
        return BraidWord(strands, tuple(letters))


# -- reduced Burau representation -----------------------------------------


def _burau_generator(k: int, strands: int, inverse: bool) -> list[list[LaurentPolynomial]]:
    """Reduced Burau matrix of sigma_k^(+-1), size (strands-1) x (strands-1)."""
    n = strands - 1
    zero, one = LaurentPolynomial.zero(), LaurentPolynomial.one()
    t = LaurentPolynomial.t(1)
    tinv = LaurentPolynomial.t(-1)
    m = [[one if i == j else zero for j in range(n)] for i in range(n)]
    i = k - 1
    if not inverse:
        m[i][i] = LaurentPolynomial.t(1, -1)  # -t
        if i > 0:
            m[i - 1][i] = t
        if i < n - 1:
            m[i + 1][i] = one
    else:
        m[i][i] = LaurentPolynomial.t(-1, -1)  # -1/t
        if i > 0:
            m[i - 1][i] = one
        if i < n - 1:
            m[i + 1][i] = tinv
    return m


def _mat_mul(a, b):
    n = len(a)
    return [
        [sum((a[i][k] * b[k][j] for k in range(n)), LaurentPolynomial.zero()) for j in range(n)]
        for i in range(n)
    ]


def _mat_det(m) -> LaurentPolynomial:
    """Cofactor expansion; fine for the matrix sizes used here (N <= ~8)."""
    n = len(m)
    if n == 1:
        return m[0][0]
    det = LaurentPolynomial.zero()
    for j in range(n):
        if m[0][j].is_zero():
            continue
        minor = [[m[i][jj] for jj in range(n) if jj != j] for i in range(1, n)]
        term = m[0][j] * _mat_det(minor)
        det = det + term if j % 2 == 0 else det - term
    return det


def reduced_burau(word: BraidWord) -> list[list[LaurentPolynomial]]:
    """Reduced Burau matrix of the word over Z[t, 1/t].

    The generator images follow the usual reduced convention, e.g. sigma_1
    on two strands maps to the 1x1 matrix (-t).  The map is a homomorphism:
    the matrix of a concatenation is the product of the matrices.
    """
    n = word.strands - 1
    zero, one = LaurentPolynomial.zero(), LaurentPolynomial.one()
    out = [[one if i == j else zero for j in range(n)] for i in range(n)]
    for k, e in word.letters:
        out = _mat_mul(out, _burau_generator(k, word.strands, inverse=(e == -1)))
    return out


def alexander_of_closure(word: BraidWord) -> LaurentPolynomial:
    """Alexander polynomial of the knot closure, unit-normalized.

    Computed as det(burau(word) - I) * (1 - t) / (1 - t^N), then normalized
    so exponents are symmetric about 0 and the lowest coefficient is
    positive.  Raises NotAKnot if the closure has several components.
    """
    if not word.is_knot_closure():
        raise NotAKnot(
            f"closure has {word.closure_components()} components; Alexander "
            "polynomial of a link closure is not computed here"
        )
    n = word.strands - 1
    m = reduced_burau(word)
    one = LaurentPolynomial.one()
    for i in range(n):
        m[i][i] = m[i][i] - one
    det = _mat_det(m)
    numer = det * (one - LaurentPolynomial.t(1))
    denom = one - LaurentPolynomial.t(word.strands)
    return numer.divide_exact(denom).normalize_unit()


def torus_alexander(p: int, q: int) -> LaurentPolynomial:
    """Closed-form Alexander polynomial of the (p, q) torus knot, normalized.

    (1 - t)(1 - t^{pq}) / ((1 - t^p)(1 - t^q)), computed by exact division.
    """
    one = LaurentPolynomial.one()
    numer = (one - LaurentPolynomial.t(1)) * (one - LaurentPolynomial.t(p * q))
    step = numer.divide_exact(one - LaurentPolynomial.t(p))
    return step.divide_exact(one - LaurentPolynomial.t(q)).normalize_unit()


# -- cyclic and commutation equivalence ------------------------------------


def _commutation_normal_form(word: BraidWord) -> BraidWord:
    """Stable bubble sort of letters on distant generators, interleaved with
    free reduction, iterated to a fixed point.

    Letters (j, *) and (k, *) commute when |j - k| >= 2; sorting maximal
    commuting runs by generator index gives a canonical representative good
    enough for the equality checks used here.
    """
    current = word.free_reduce()
    while True:
        letters = list(current.letters)
        changed = True
        while changed:
            changed = False
            for i in range(len(letters) - 1):
                (j, _), (k, _) = letters[i], letters[i + 1]
                if abs(j - k) >= 2 and j > k:
                    letters[i], letters[i + 1] = letters[i + 1], letters[i]
                    changed = True
        reduced = BraidWord(current.strands, tuple(letters)).free_reduce()
        if reduced.letters == current.letters:
            return reduced
        current = reduced


def _cyclic_free_reduce(word: BraidWord) -> BraidWord:
    """Free reduction plus cancellation of inverse first/last letters."""
    letters = list(word.free_reduce().letters)
    while (
        len(letters) >= 2
        and letters[0][0] == letters[-1][0]
        and letters[0][1] == -letters[-1][1]
    ):
        letters = letters[1:-1]
    return BraidWord(word.strands, tuple(letters))


def cyclically_equal(a: BraidWord, b: BraidWord) -> bool:
    """Equality up to cyclic rotation, free reduction and distant-generator
    commutation (the doubling trick: b is a factor of a * a).

    Rotations are taken on the raw cyclically-reduced word — the sorted
    normal form is not rotation-compatible — and each window is normalized
    before comparing.
    """
    if a.strands != b.strands:
        return False
    ra = _cyclic_free_reduce(a)
    rb = _cyclic_free_reduce(b)
    if len(ra) != len(rb):
        return False
    if not ra.letters:
        return True
    target = rb.letters
    norm_target = _commutation_normal_form(rb).letters
    doubled = ra.letters * 2
    for off in range(len(ra)):
        window = doubled[off : off + len(target)]
        if window == target:
            return True
        rot = _commutation_normal_form(BraidWord(a.strands, window))
        if rot.letters == norm_target:
            return True
    return False


# -- block-and-band decomposition ------------------------------------------


@dataclass(frozen=True)
class BandRepresentation:
    """Braid word shaped as two crossing blocks plus one band per double point.

    even_block / odd_block list the generator indices of the two block
    clusters (all sharing the regime sign); each band is a conjugate
    b * sigma_k^(2 eps) * b^-1 recording one detour around a double point.
    """

    strands: int
    sign: int  # regime sign s shared by every block letter
    even_block: tuple[int, ...]
    odd_block: tuple[int, ...]
    bands: tuple[tuple[BraidWord, int, int], ...]  # (conjugator, k, eps)

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValidationError("regime sign must be +-1")
        for k in self.even_block:
            if k % 2 != 0:
                raise ValidationError(f"even block holds sigma_{k}")
        for k in self.odd_block:
            if k % 2 != 1:
                raise ValidationError(f"odd block holds sigma_{k}")
        for _, k, eps in self.bands:
            if not 1 <= k <= self.strands - 1 or eps not in (-1, 1):
                raise ValidationError("band has bad generator or sign")

    def expansion(self) -> BraidWord:
        """even block, odd block, then the conjugated bands in stored order."""
        word = BraidWord(self.strands, tuple((k, self.sign) for k in self.even_block))
        word = word * BraidWord(self.strands, tuple((k, self.sign) for k in self.odd_block))
        for conj, k, eps in self.bands:
            core = BraidWord(self.strands, ((k, eps), (k, eps)))
            word = word * conj * core * conj.inverse()
        return word

    def euler_characteristic(self) -> int:
        """chi of the banded surface: N discs minus the block and band half-twists."""
        return self.strands - (len(self.even_block) + len(self.odd_block) + 2 * len(self.bands))

    def genus(self) -> Fraction:
        """Genus of the banded surface when the boundary is a knot."""
        return Fraction(1 - self.euler_characteristic(), 2)


def band_representation_matches(rep: BandRepresentation, word: BraidWord) -> bool:
    """True when the expanded band form equals the word up to cyclic moves."""
    return cyclically_equal(rep.expansion(), word)


def require_band_match(rep: BandRepresentation, word: BraidWord) -> None:
    if not band_representation_matches(rep, word):
        raise TemplateMismatch(
            "band form does not reproduce the traced word:\n"
            f"  expanded: {rep.expansion().free_reduce().to_text()}\n"
            f"  traced:   {word.free_reduce().to_text()}"
        )
