import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

Rational = Fraction | int

_SQRT2 = math.sqrt(2.0)
_TERM = re.compile(r"[+-]?[^+-]+")


def _sign(x: Fraction, y: Fraction) -> int:
    """Exact sign of x + y*sqrt(2)."""
    sx = (x > 0) - (x < 0)
    sy = (y > 0) - (y < 0)
    if sy == 0:
        return sx
    if sx == 0 or sx == sy:
        return sy
    # opposite signs: compare x^2 with 2 y^2, never equal for rational y != 0
    lhs, rhs = x * x, 2 * y * y
    return sx if lhs > rhs else sy


@total_ordering
@dataclass(frozen=True, slots=True)
class ExactReal:
    """A number a + b*sqrt(2) with rational a, b.

    Catalogue parameters need to be decided rational or irrational exactly, which
    floating point cannot do. Every rational is an ExactReal with b == 0.
    """

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    @classmethod
    def of(cls, value: "ExactReal | Rational | float | str") -> "ExactReal":
        if isinstance(value, ExactReal):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        if isinstance(value, float):
            if not math.isfinite(value):
                raise ValueError(f"Cannot represent {value} exactly")
            return cls(Fraction(value))
        return cls(Fraction(value))

    @classmethod
    def parse(cls, token: str) -> "ExactReal":
        """Parse tokens such as '1/2', '0.3', 'sqrt2/2', '-1+sqrt2', '3*sqrt2/4'."""
        text = token.replace(" ", "").replace("√2", "sqrt2")
        if not text:
            raise ValueError("Empty number token")
        a = Fraction(0)
        b = Fraction(0)
        for term in _TERM.findall(text):
            sign = -1 if term.startswith("-") else 1
            body = term.lstrip("+-")
            try:
                if "sqrt2" in body:
                    coeff = body.replace("*sqrt2", "").replace("sqrt2*", "").replace("sqrt2", "1")
                    b += sign * _parse_rational(coeff)
                else:
                    a += sign * _parse_rational(body)
            except (ValueError, ZeroDivisionError) as e:
                raise ValueError(f"Invalid number token {token!r}: {e}") from e
        return cls(a, b)

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def sign(self) -> int:
        return _sign(self.a, self.b)

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * _SQRT2

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return ExactReal(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return ExactReal(-self.a, -self.b)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return ExactReal(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return ExactReal(
            self.a * other.a + 2 * self.b * other.b,
            self.a * other.b + self.b * other.a,
        )

    __rmul__ = __mul__

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self.a == other.a and self.b == other.b

    def __lt__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return (self - other).sign() < 0

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b))

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        root = "sqrt2" if self.b == 1 else f"{self.b}*sqrt2"
        if self.a == 0:
            return root
        joiner = "" if root.startswith("-") else "+"
        return f"{self.a}{joiner}{root}"


def _parse_rational(text: str) -> Fraction:
    if "*" in text:
        left, right = text.split("*", 1)
        return _parse_rational(left) * _parse_rational(right)
    return Fraction(text)


def _coerce(value) -> ExactReal:
    if isinstance(value, ExactReal):
        return value
    if isinstance(value, (int, Fraction)):
        return ExactReal(Fraction(value))
    return NotImplemented
