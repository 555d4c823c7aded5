"""Exact scalars for the rational numeric mode.

Coordinates in rational mode are ``int``, ``fractions.Fraction``, or
``SqrtExt`` (an element a + b*sqrt(d) of a real quadratic field).  Floats are
the separate fast mode; a value is either exact or float, never a blend, and
helpers here let callers branch on that without isinstance ladders everywhere.
"""

from __future__ import annotations

import math
from fractions import Fraction

# floats closer than this to an integer are treated as sitting on the
# integer boundary (truncation refuses to guess; see geometry.truncated_distance)
FLOAT_INTEGER_GUARD = 1e-9

ExactScalar = int | Fraction  # SqrtExt joins via duck typing
Scalar = int | float | Fraction


def _is_square(n: int) -> bool:
    r = math.isqrt(n)
    return r * r == n


class SqrtExt:
    """a + b*sqrt(d) with a, b rational, b != 0, d a positive non-square int.

    Arithmetic collapses back to Fraction whenever the irrational part
    cancels, so set/dict members stay comparable across the two types.
    Comparisons are exact (integer sign tests, no floats).
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        if d <= 0 or _is_square(d):
            raise ValueError(f"radicand must be a positive non-square integer, got {d}")
        b = Fraction(b)
        if b == 0:
            raise ValueError("irrational part is zero; use Fraction instead")
        self.a = Fraction(a)
        self.b = b
        self.d = d

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def make(a, b, d: int):
        """a + b*sqrt(d), collapsed to Fraction when b == 0."""
        b = Fraction(b)
        if b == 0:
            return Fraction(a)
        return SqrtExt(a, b, d)

    def _coerce(self, other):
        """Return (a, b) parts of other in this value's field, or None."""
        if isinstance(other, SqrtExt):
            if other.d != self.d:
                return None
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return None

    # -- ring operations ------------------------------------------------------

    def __add__(self, other):
        parts = self._coerce(other)
        if parts is None:
            return NotImplemented
        oa, ob = parts
        return SqrtExt.make(self.a + oa, self.b + ob, self.d)

    __radd__ = __add__

    def __sub__(self, other):
        parts = self._coerce(other)
        if parts is None:
            return NotImplemented
        oa, ob = parts
        return SqrtExt.make(self.a - oa, self.b - ob, self.d)

    def __rsub__(self, other):
        parts = self._coerce(other)
        if parts is None:
            return NotImplemented
        oa, ob = parts
        return SqrtExt.make(oa - self.a, ob - self.b, self.d)

    def __mul__(self, other):
        parts = self._coerce(other)
        if parts is None:
            return NotImplemented
        oa, ob = parts
        return SqrtExt.make(
            self.a * oa + self.b * ob * self.d, self.a * ob + self.b * oa, self.d
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        parts = self._coerce(other)
        if parts is None:
            return NotImplemented
        oa, ob = parts
        # multiply by conjugate; norm oa^2 - ob^2 d is nonzero unless other == 0
        nrm = oa * oa - ob * ob * self.d
        if nrm == 0:
            raise ZeroDivisionError("division by zero")
        return SqrtExt.make(
            (self.a * oa - self.b * ob * self.d) / nrm,
            (self.b * oa - self.a * ob) / nrm,
            self.d,
        )

    def __rtruediv__(self, other):
        parts = self._coerce(other)
        if parts is None:
            return NotImplemented
        oa, ob = parts
        nrm = self.a * self.a - self.b * self.b * self.d
        return SqrtExt.make(
            (oa * self.a - ob * self.b * self.d) / nrm,
            (ob * self.a - oa * self.b) / nrm,
            self.d,
        )

    def __neg__(self):
        return SqrtExt(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self._sign() < 0 else self

    # -- order ----------------------------------------------------------------

    def _sign(self) -> int:
        a, b = self.a, self.b
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: |a| vs |b|*sqrt(d), squared (never equal: d non-square)
        lhs = a * a
        rhs = b * b * self.d
        if a > 0:
            return 1 if lhs > rhs else -1
        return 1 if rhs > lhs else -1

    def _cmp(self, other) -> int | None:
        parts = self._coerce(other)
        if parts is None:
            return None
        diff = self - other
        if isinstance(diff, Fraction):
            return (diff > 0) - (diff < 0)
        return diff._sign()

    def __eq__(self, other):
        c = self._cmp(other)
        return False if c is None else c == 0

    def __lt__(self, other):
        c = self._cmp(other)
        if c is None:
            return NotImplemented
        return c < 0

    def __le__(self, other):
        c = self._cmp(other)
        if c is None:
            return NotImplemented
        return c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        if c is None:
            return NotImplemented
        return c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        if c is None:
            return NotImplemented
        return c >= 0

    def __hash__(self):
        return hash(("SqrtExt", self.a, self.b, self.d))

    def __bool__(self):
        return True  # b != 0 means the value is irrational, hence nonzero

    # -- conversions ----------------------------------------------------------

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __floor__(self) -> int:
        n = math.floor(float(self))
        # float approximation is within 1 ulp of tiny; fix up exactly
        while self < n:
            n -= 1
        while self >= n + 1:
            n += 1
        return n

    def __repr__(self):
        return f"SqrtExt({self.a}, {self.b}, {self.d})"

    def __str__(self):
        return f"{self.a}+{self.b}*sqrt({self.d})"


def is_exact(x) -> bool:
    """True for scalars of the exact mode (int, Fraction, SqrtExt)."""
    return isinstance(x, (int, Fraction, SqrtExt))


def exact_div(n, d):
    """n / d that keeps int/int exact instead of degrading to float."""
    if isinstance(n, int) and isinstance(d, int):
        return Fraction(n, d)
    return n / d


def exact_floor(x) -> int:
    """Floor of an exact scalar. Floats are rejected: callers must guard them."""
    if isinstance(x, float):
        raise TypeError("exact_floor got a float; use guarded_floor")
    return math.floor(x)


def guarded_floor(x, *, what: str = "value"):
    """Floor with boundary refusal for floats.

    Exact scalars floor exactly.  A float within FLOAT_INTEGER_GUARD of an
    integer cannot be trusted to sit on either side, so raise instead of
    silently picking one.
    """
    if isinstance(x, float):
        nearest = round(x)
        if abs(x - nearest) < FLOAT_INTEGER_GUARD:
            raise BoundaryAmbiguityError(
                f"{what} = {x!r} is within {FLOAT_INTEGER_GUARD} of integer {nearest}; "
                "use rational mode or perturb the input"
            )
        return math.floor(x)
    return math.floor(x)


class BoundaryAmbiguityError(ValueError):
    """A float sits too close to an integer for truncation to be meaningful."""


def fractional_part(x):
    """x - floor(x), preserving the scalar type (exact stays exact)."""
    if isinstance(x, float):
        return x - math.floor(x)
    return x - math.floor(x)


def format_scalar(x) -> str | float:
    """JSON form: exact rationals as 'num/den' strings, floats as numbers."""
    if isinstance(x, bool):
        raise TypeError("bool is not a coordinate")
    if isinstance(x, int):
        return f"{x}/1"
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        return x
    raise TypeError(f"cannot serialize scalar {x!r}")


def parse_scalar(v) -> Scalar:
    """Inverse of format_scalar: 'num/den' -> Fraction, number -> float."""
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, bool):
        raise TypeError("bool is not a coordinate")
    if isinstance(v, (int, float)):
        return float(v)
    raise TypeError(f"cannot parse scalar {v!r}")
