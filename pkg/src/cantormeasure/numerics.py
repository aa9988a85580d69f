"""Exact rational arithmetic and certified interval arithmetic.

Rationals are plain :class:`fractions.Fraction` values (arbitrary precision,
always in lowest terms with positive denominator).  All geometry — map
ratios, offsets, island endpoints, lake lengths — stays rational and exact.

Irrational quantities (the dimension, measures, densities) are carried as
:class:`CertifiedReal` values: closed intervals ``[lo, hi]`` of MPFR floats
with outward rounding, so the mathematically exact value is guaranteed to
lie inside the interval after every operation.  The working mantissa is a
module-level setting (default 128 bits) that escalation loops may raise up
to a hard cap of 1024 bits; a comparison that stays inconclusive at the cap
raises :class:`PrecisionExhausted` rather than guessing.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterator, Union

import gmpy2

Rational = Fraction
RationalLike = Union[Fraction, int]

DEFAULT_PRECISION = 128
MAX_PRECISION = 1024


class PrecisionExhausted(ArithmeticError):
    """A required decision stayed inconclusive at the precision cap."""


class BracketError(ValueError):
    """The bracket handed to a root finder does not straddle the root."""


class ConvergenceError(ArithmeticError):
    """Root finding stopped early; ``best`` holds the tightest bracket found."""

    def __init__(self, message: str, best: "CertifiedReal"):
        super().__init__(message)
        self.best = best


_precision = DEFAULT_PRECISION
_context_cache: dict[int, tuple] = {}


def _contexts(bits: int):
    try:
        return _context_cache[bits]
    except KeyError:
        pair = (
            gmpy2.context(precision=bits, round=gmpy2.RoundDown),
            gmpy2.context(precision=bits, round=gmpy2.RoundUp),
        )
        _context_cache[bits] = pair
        return pair


def get_precision() -> int:
    return _precision


def set_precision(bits: int) -> None:
    global _precision
    if bits < 2:
        raise ValueError("precision must be at least 2 bits")
    _precision = bits


class working_precision:
    """Context manager that temporarily switches the working mantissa."""

    def __init__(self, bits: int):
        self.bits = bits
        self._saved = None

    def __enter__(self):
        self._saved = get_precision()
        set_precision(self.bits)
        return self

    def __exit__(self, *exc):
        set_precision(self._saved)
        return False


def escalation_ladder(start: int | None = None, cap: int = MAX_PRECISION) -> Iterator[int]:
    """Yield doubling precisions from ``start`` (default: current) up to ``cap``."""
    bits = start if start is not None else get_precision()
    while True:
        yield min(bits, cap)
        if bits >= cap:
            return
        bits *= 2


# ---------------------------------------------------------------------------
# rational parsing / serialization ("p/q" strings)


def parse_rational(text: str) -> Fraction:
    """Parse 'p/q' (or a bare integer / decimal string) into an exact Fraction."""
    text = text.strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {text!r}") from exc


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def decimal_string(q: Fraction, digits: int, direction: str) -> str:
    """Decimal rendering of an exact rational with *directed* rounding.

    ``direction`` is "floor" or "ceil"; the printed value is guaranteed to be
    on the safe side, so serialized interval endpoints keep their enclosure
    property.
    """
    if direction not in ("floor", "ceil"):
        raise ValueError("direction must be 'floor' or 'ceil'")
    q = Fraction(q)
    scale = 10 ** digits
    scaled = q * scale
    n, d = scaled.numerator, scaled.denominator
    if direction == "floor":
        units = n // d
    else:
        units = -((-n) // d)
    sign = "-" if units < 0 else ""
    units = abs(units)
    whole, frac = divmod(units, scale)
    return f"{sign}{whole}.{frac:0{digits}d}"


# ---------------------------------------------------------------------------
# certified interval reals


def _mpfr(value, ctx):
    return gmpy2.mpfr(value, 0, ctx)


class CertifiedReal:
    """Closed interval ``[lo, hi]`` of MPFR values containing the true result.

    Instances are immutable and safe to share.  Arithmetic uses outward
    rounding at the current working precision; inclusion monotonicity holds:
    widening any operand can only widen the result.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        if not (lo <= hi):
            raise ValueError(f"invalid interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, *a):  # pragma: no cover - immutability guard
        raise AttributeError("CertifiedReal is immutable")

    # -- construction -------------------------------------------------

    @staticmethod
    def from_rational(q: RationalLike) -> "CertifiedReal":
        dn, up = _contexts(get_precision())
        q = Fraction(q)
        return CertifiedReal(_mpfr(q, dn), _mpfr(q, up))

    @staticmethod
    def from_pair(lo: RationalLike, hi: RationalLike) -> "CertifiedReal":
        dn, up = _contexts(get_precision())
        return CertifiedReal(_mpfr(Fraction(lo), dn), _mpfr(Fraction(hi), up))

    @staticmethod
    def exact_int(n: int) -> "CertifiedReal":
        v = gmpy2.mpfr(n)
        return CertifiedReal(v, v)

    # -- inspection ---------------------------------------------------

    def as_fractions(self) -> tuple[Fraction, Fraction]:
        ln, ld = self.lo.as_integer_ratio()
        hn, hd = self.hi.as_integer_ratio()
        return Fraction(int(ln), int(ld)), Fraction(int(hn), int(hd))

    def width(self) -> Fraction:
        lo, hi = self.as_fractions()
        return hi - lo

    def midpoint(self) -> Fraction:
        lo, hi = self.as_fractions()
        return (lo + hi) / 2

    def contains(self, q: RationalLike) -> bool:
        return self.lo <= Fraction(q) <= self.hi

    def is_point(self) -> bool:
        return self.lo == self.hi

    def __repr__(self):
        return f"CertifiedReal[{self.lo}, {self.hi}]"

    # -- arithmetic ---------------------------------------------------

    @staticmethod
    def _coerce(other) -> "CertifiedReal":
        if isinstance(other, CertifiedReal):
            return other
        if isinstance(other, (int, Fraction)):
            return CertifiedReal.from_rational(other)
        raise TypeError(f"cannot mix CertifiedReal with {type(other)!r}")

    def __add__(self, other):
        other = self._coerce(other)
        dn, up = _contexts(get_precision())
        return CertifiedReal(dn.add(self.lo, other.lo), up.add(self.hi, other.hi))

    __radd__ = __add__

    def __neg__(self):
        return CertifiedReal(-self.hi, -self.lo)

    def __sub__(self, other):
        other = self._coerce(other)
        dn, up = _contexts(get_precision())
        return CertifiedReal(dn.sub(self.lo, other.hi), up.sub(self.hi, other.lo))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        dn, up = _contexts(get_precision())
        corners = (
            (self.lo, other.lo),
            (self.lo, other.hi),
            (self.hi, other.lo),
            (self.hi, other.hi),
        )
        lo = min(dn.mul(a, b) for a, b in corners)
        hi = max(up.mul(a, b) for a, b in corners)
        return CertifiedReal(lo, hi)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("divisor interval contains zero")
        dn, up = _contexts(get_precision())
        corners = (
            (self.lo, other.lo),
            (self.lo, other.hi),
            (self.hi, other.lo),
            (self.hi, other.hi),
        )
        lo = min(dn.div(a, b) for a, b in corners)
        hi = max(up.div(a, b) for a, b in corners)
        return CertifiedReal(lo, hi)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    # -- certified comparisons (False means "not certain") -------------

    def certainly_lt(self, other) -> bool:
        other = self._coerce(other)
        return self.hi < other.lo

    def certainly_le(self, other) -> bool:
        other = self._coerce(other)
        return self.hi <= other.lo

    def certainly_gt(self, other) -> bool:
        other = self._coerce(other)
        return self.lo > other.hi

    def certainly_ge(self, other) -> bool:
        other = self._coerce(other)
        return self.lo >= other.hi

    def overlaps(self, other) -> bool:
        other = self._coerce(other)
        return not (self.hi < other.lo or other.hi < self.lo)

    def hull(self, other: "CertifiedReal") -> "CertifiedReal":
        return CertifiedReal(min(self.lo, other.lo), max(self.hi, other.hi))


def cr_min(values) -> CertifiedReal:
    values = list(values)
    if not values:
        raise ValueError("cr_min of empty sequence")
    lo = min(v.lo for v in values)
    hi = min(v.hi for v in values)
    return CertifiedReal(lo, hi)


def cr_max(values) -> CertifiedReal:
    values = list(values)
    if not values:
        raise ValueError("cr_max of empty sequence")
    lo = max(v.lo for v in values)
    hi = max(v.hi for v in values)
    return CertifiedReal(lo, hi)


def cr_sum(values) -> CertifiedReal:
    dn, up = _contexts(get_precision())
    lo = gmpy2.mpfr(0)
    hi = gmpy2.mpfr(0)
    for v in values:
        lo = dn.add(lo, v.lo)
        hi = up.add(hi, v.hi)
    return CertifiedReal(lo, hi)


# ---------------------------------------------------------------------------
# elementary functions


def log_rational(q: Fraction) -> CertifiedReal:
    """Certified natural log of an exact positive rational."""
    if q <= 0:
        raise ValueError("log of non-positive rational")
    dn, up = _contexts(get_precision())
    return CertifiedReal(dn.log(_mpfr(q, dn)), up.log(_mpfr(q, up)))


def cr_exp(x: CertifiedReal) -> CertifiedReal:
    dn, up = _contexts(get_precision())
    return CertifiedReal(dn.exp(x.lo), up.exp(x.hi))


def cr_log(x: CertifiedReal) -> CertifiedReal:
    if not (x.lo > 0):
        raise ValueError("log of interval touching zero")
    dn, up = _contexts(get_precision())
    return CertifiedReal(dn.log(x.lo), up.log(x.hi))


def pow_certified(base: RationalLike, exponent) -> CertifiedReal:
    """Certified enclosure of ``base ** exponent`` for an exact rational base > 0.

    The exponent may be a Fraction or a CertifiedReal.  Integer exponents are
    evaluated exactly in rational arithmetic before the final conversion.
    """
    base = Fraction(base)
    if base <= 0:
        raise ValueError("pow_certified requires base > 0")
    if base == 1:
        return CertifiedReal.exact_int(1)
    if isinstance(exponent, (int, Fraction)) and Fraction(exponent).denominator == 1:
        n = int(Fraction(exponent))
        return CertifiedReal.from_rational(base ** n)
    if isinstance(exponent, (int, Fraction)):
        exponent = CertifiedReal.from_rational(exponent)
    if exponent.is_point() and gmpy2.is_integer(exponent.lo):
        return CertifiedReal.from_rational(base ** int(exponent.lo))
    return cr_exp(exponent * log_rational(base))


def cr_pow(base: CertifiedReal, exponent: CertifiedReal) -> CertifiedReal:
    """Certified ``base ** exponent`` for a strictly positive base interval."""
    if base.lo == base.hi:
        frac = base.as_fractions()[0]
        return pow_certified(frac, exponent)
    return cr_exp(exponent * cr_log(base))


# ---------------------------------------------------------------------------
# monotone root finding


def solve_monotone_root(
    f: Callable[[Fraction], CertifiedReal],
    bracket: tuple[RationalLike, RationalLike],
    tol: RationalLike,
    max_iterations: int = 400,
) -> CertifiedReal:
    """Bisection for the unique root of a strictly decreasing certified function.

    ``f`` must satisfy ``f(lo) > 0 > f(hi)`` on the given bracket; it is
    expected to honour the module working precision, which this routine
    raises (doubling, up to the cap) whenever a sign test at the midpoint
    comes back inconclusive.  Returns an interval of width <= ``tol``
    containing the root.

    Raises :class:`BracketError` when the bracket shows no sign change and
    :class:`ConvergenceError` (carrying the best interval) when the iteration
    cap or the precision cap blocks further progress.
    """
    lo = Fraction(bracket[0])
    hi = Fraction(bracket[1])
    tol = Fraction(tol)
    if not lo < hi:
        raise BracketError("empty bracket")

    def certainly_positive(value: CertifiedReal):
        if value.lo > 0:
            return True
        if value.hi < 0:
            return False
        return None

    def sign_at(x: Fraction):
        for bits in escalation_ladder():
            with working_precision(bits):
                s = certainly_positive(f(x))
            if s is not None:
                return s
        return None

    s_lo = sign_at(lo)
    s_hi = sign_at(hi)
    if s_lo is not True or s_hi is not False:
        raise BracketError(
            "no sign change: need f(lo) > 0 > f(hi) on the bracket"
        )

    iterations = 0
    while hi - lo > tol:
        iterations += 1
        if iterations > max_iterations:
            raise ConvergenceError(
                f"no convergence within {max_iterations} iterations",
                CertifiedReal.from_pair(lo, hi),
            )
        width = hi - lo
        decided = False
        # if the sign at the plain midpoint is undecidable (root too close),
        # probe slightly off-centre points before giving up
        for num, den in ((1, 2), (5, 11), (6, 11)):
            mid = lo + width * num / den
            s = sign_at(mid)
            if s is True:
                lo = mid
                decided = True
                break
            if s is False:
                hi = mid
                decided = True
                break
        if not decided:
            if hi - lo <= tol:
                break
            raise ConvergenceError(
                "sign undecidable at precision cap near the root",
                CertifiedReal.from_pair(lo, hi),
            )
    return CertifiedReal.from_pair(lo, hi)
