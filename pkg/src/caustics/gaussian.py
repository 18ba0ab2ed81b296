"""Exact arithmetic in Q(i), the field of Gaussian rationals.

Every coefficient in this package ultimately reduces to a GaussianRational.
Elements are kept in canonical form: a common positive denominator with
gcd(a, b, den) == 1, so equality and hashing are structural.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


class GaussianRational:
    """a/den + (b/den)*i with integers a, b and den > 0, gcd(a, b, den) == 1."""

    __slots__ = ("a", "b", "den")

    def __init__(self, a=0, b=0, den=1):
        if den == 0:
            raise ZeroDivisionError("GaussianRational with zero denominator")
        if den < 0:
            a, b, den = -a, -b, -den
        g = gcd(gcd(a if a >= 0 else -a, b if b >= 0 else -b), den)
        if g > 1:
            a //= g
            b //= g
            den //= g
        self.a = a
        self.b = b
        self.den = den

    @classmethod
    def from_rational(cls, q):
        """Build from an int, Fraction or GaussianRational."""
        if isinstance(q, GaussianRational):
            return q
        if isinstance(q, int):
            return cls(q)
        if isinstance(q, Fraction):
            return cls(q.numerator, 0, q.denominator)
        raise TypeError("cannot coerce %r into Q(i)" % (q,))

    @property
    def re(self) -> Fraction:
        return Fraction(self.a, self.den)

    @property
    def im(self) -> Fraction:
        return Fraction(self.b, self.den)

    def is_zero(self):
        return self.a == 0 and self.b == 0

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __eq__(self, other):
        if isinstance(other, int):
            return self.b == 0 and self.den == 1 and self.a == other
        if isinstance(other, GaussianRational):
            return (self.a == other.a and self.b == other.b
                    and self.den == other.den)
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(Fraction(self.a, self.den))
        return hash((self.a, self.b, self.den))

    def __neg__(self):
        return GaussianRational(-self.a, -self.b, self.den)

    def __add__(self, other):
        if isinstance(other, int):
            return GaussianRational(self.a + other * self.den, self.b, self.den)
        if not isinstance(other, GaussianRational):
            return NotImplemented
        return GaussianRational(self.a * other.den + other.a * self.den,
                                self.b * other.den + other.b * self.den,
                                self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            return GaussianRational(self.a - other * self.den, self.b, self.den)
        if not isinstance(other, GaussianRational):
            return NotImplemented
        return GaussianRational(self.a * other.den - other.a * self.den,
                                self.b * other.den - other.b * self.den,
                                self.den * other.den)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, int):
            return GaussianRational(self.a * other, self.b * other, self.den)
        if not isinstance(other, GaussianRational):
            return NotImplemented
        return GaussianRational(self.a * other.a - self.b * other.b,
                                self.a * other.b + self.b * other.a,
                                self.den * other.den)

    __rmul__ = __mul__

    def inverse(self):
        """Multiplicative inverse; raises ZeroDivisionError on 0."""
        n = self.a * self.a + self.b * self.b
        if n == 0:
            raise ZeroDivisionError("inverse of zero in Q(i)")
        # 1/(a+bi) = (a-bi)/(a^2+b^2), then restore the denominator
        return GaussianRational(self.a * self.den, -self.b * self.den, n)

    def __truediv__(self, other):
        if isinstance(other, int):
            return GaussianRational(self.a, self.b, self.den * other)
        if not isinstance(other, GaussianRational):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = QI_ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self):
        return GaussianRational(self.a, -self.b, self.den)

    def __repr__(self):
        return "GaussianRational(%d, %d, %d)" % (self.a, self.b, self.den)

    def __str__(self):
        re, im = Fraction(self.a, self.den), Fraction(self.b, self.den)
        if im == 0:
            return str(re)
        if re == 0:
            return "%s*i" % im if im != 1 else "i"
        sign = "+" if im > 0 else "-"
        mag = abs(im)
        return "%s %s %s" % (re, sign, "%s*i" % mag if mag != 1 else "i")


QI_ZERO = GaussianRational(0)
QI_ONE = GaussianRational(1)
QI_I = GaussianRational(0, 1)
