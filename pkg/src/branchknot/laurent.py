"""Exact Laurent polynomials in one variable t with integer coefficients.

Kept deliberately small: the braid invariants in this package need exact
addition, multiplication, division and unit-normalization, nothing more.
Coefficients are Python ints, so there is no overflow and no float fuzz.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NonUnitRemainder


@dataclass(frozen=True)
class LaurentPolynomial:
    """Integer Laurent polynomial, stored as {exponent: coefficient}."""

    coeffs: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {e: c for e, c in self.coeffs.items() if c != 0}
        object.__setattr__(self, "coeffs", cleaned)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "LaurentPolynomial":
        return LaurentPolynomial({})

    @staticmethod
    def one() -> "LaurentPolynomial":
        return LaurentPolynomial({0: 1})

    @staticmethod
    def t(exponent: int = 1, coefficient: int = 1) -> "LaurentPolynomial":
        """The monomial coefficient * t**exponent."""
        return LaurentPolynomial({exponent: coefficient})

    # -- queries -----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_unit(self) -> bool:
        """True for +-t**j."""
        return len(self.coeffs) == 1 and abs(next(iter(self.coeffs.values()))) == 1

    @property
    def min_exp(self) -> int:
        if self.is_zero():
            raise ValueError("zero polynomial has no degree")
        return min(self.coeffs)

    @property
    def max_exp(self) -> int:
        if self.is_zero():
            raise ValueError("zero polynomial has no degree")
        return max(self.coeffs)

    def __getitem__(self, exponent: int) -> int:
        return self.coeffs.get(exponent, 0)

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return LaurentPolynomial(out)

    def __neg__(self) -> "LaurentPolynomial":
        return LaurentPolynomial({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        return self + (-other)

    def __mul__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        out: dict[int, int] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPolynomial(out)

    def shift(self, j: int) -> "LaurentPolynomial":
        """Multiply by t**j."""
        return LaurentPolynomial({e + j: c for e, c in self.coeffs.items()})

    def reciprocal(self) -> "LaurentPolynomial":
        """Substitute t -> 1/t."""
        return LaurentPolynomial({-e: c for e, c in self.coeffs.items()})

    def divide_exact(self, divisor: "LaurentPolynomial") -> "LaurentPolynomial":
        """Exact division; raises NonUnitRemainder if the remainder is nonzero."""
        if divisor.is_zero():
            raise ZeroDivisionError("division by zero Laurent polynomial")
        if self.is_zero():
            return LaurentPolynomial.zero()
        # Shift both to ordinary polynomials with constant term at exponent 0.
        ns, ds = self.min_exp, divisor.min_exp
        num = _to_list(self.shift(-ns))
        den = _to_list(divisor.shift(-ds))
        quot, rem = _polydiv(num, den)
        if any(rem):
            raise NonUnitRemainder(
                f"inexact Laurent division: remainder has {sum(1 for c in rem if c)} terms"
            )
        out = {i + ns - ds: c for i, c in enumerate(quot) if c != 0}
        return LaurentPolynomial(out)

    def __call__(self, value: complex) -> complex:
        """Evaluate at a nonzero complex number."""
        return sum(c * value**e for e, c in self.coeffs.items())

    # -- presentation ------------------------------------------------------

    def is_symmetric(self) -> bool:
        """True if p(t) == p(1/t) coefficientwise."""
        return self.coeffs == self.reciprocal().coeffs

    def normalize_unit(self) -> "LaurentPolynomial":
        """Canonical representative of the class {+-t**j * p}.

        Centers the exponent window around 0 when its width is even,
        otherwise anchors the lowest exponent at 0; then fixes the sign so
        the lowest-degree coefficient is positive.
        """
        if self.is_zero():
            return self
        lo, hi = self.min_exp, self.max_exp
        if (hi - lo) % 2 == 0:
            p = self.shift(-(lo + hi) // 2)
        else:
            p = self.shift(-lo)
        if p[p.min_exp] < 0:
            p = -p
        return p

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for e in sorted(self.coeffs):
            c = self.coeffs[e]
            if e == 0:
                term = str(abs(c))
            else:
                base = "t" if e == 1 else f"t^{e}"
                term = base if abs(c) == 1 else f"{abs(c)}*{base}"
            parts.append(("- " if c < 0 else "+ ") + term)
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


def _to_list(p: LaurentPolynomial) -> list[int]:
    """Coefficient list c[0..deg] for a polynomial with min_exp == 0."""
    out = [0] * (p.max_exp + 1)
    for e, c in p.coeffs.items():
        out[e] = c
    return out


def _polydiv(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    """Integer polynomial long division (ascending coefficient lists)."""
    num = list(num)
    dd = len(den) - 1
    lead = den[-1]
    if len(num) - 1 < dd:
        return [0], num
    quot = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c == 0:
            continue
        if c % lead != 0:
            # Not divisible over the integers; report via remainder.
            return quot, num
        q = c // lead
        quot[i - dd] = q
        for j, d in enumerate(den):
            num[i - dd + j] -= q * d
    return quot, num
