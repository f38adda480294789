"""Midpoint-radius ball arithmetic on MPFR floats.

Every real number computed by this library is carried as an
:class:`Enclosure`: a midpoint, a nonnegative radius and an optional exact
plus-infinity flag.  The contract is that the true value v of the quantity
being represented always satisfies ``mid - rad <= v <= mid + rad`` (or
``v = +inf`` exactly when ``upper_infinite`` is set).

Midpoints are rounded to nearest at the working precision; every rounding
error and every propagated input radius is pushed outward into the radius,
which is itself maintained with upward rounding in a fixed 64-bit context.
Soundness therefore never depends on the working precision, only tightness
does.

One gmpy2 pitfall shapes the code below: bare ``-x`` and ``abs(x)`` on an
mpfr round through the *current thread context* (53 bits by default), so
all sign operations go through an explicit context.
"""

from __future__ import annotations

from fractions import Fraction

import gmpy2

__all__ = ["Enclosure", "ball_context", "zeta_ball", "pi_ball"]

# Radii are small and only ever need an upper bound, so a fixed modest
# precision with upward rounding is enough.
_RUP = gmpy2.context(precision=64, round=gmpy2.RoundUp)
_RDN = gmpy2.context(precision=64, round=gmpy2.RoundDown)

_ZERO = gmpy2.mpfr(0)
_INF = gmpy2.mpfr("inf")

_mid_contexts: dict[int, object] = {}
_eps_cache: dict[int, object] = {}


def ball_context(prec: int):
    """Round-to-nearest MPFR context used for midpoints at ``prec`` bits."""
    ctx = _mid_contexts.get(prec)
    if ctx is None:
        if prec < 8:
            raise ValueError("precision must be at least 8 bits")
        ctx = gmpy2.context(precision=prec, round=gmpy2.RoundToNearest)
        _mid_contexts[prec] = ctx
    return ctx


def _eps(prec: int):
    # One correctly rounded operation at prec bits has relative error
    # <= 2^-prec; 2^(1-prec) leaves margin for the |mid| estimate itself.
    e = _eps_cache.get(prec)
    if e is None:
        e = gmpy2.mpfr(2) ** (1 - prec)
        _eps_cache[prec] = e
    return e


def _abs_up(x):
    """|x| rounded upward (safe in radius bounds)."""
    return _RUP.abs(x)


_dir_contexts: dict[tuple[int, bool], object] = {}


def _directed(prec: int, up: bool):
    ctx = _dir_contexts.get((prec, up))
    if ctx is None:
        ctx = gmpy2.context(
            precision=prec + 8, round=gmpy2.RoundUp if up else gmpy2.RoundDown
        )
        _dir_contexts[(prec, up)] = ctx
    return ctx


def _to_mpfr_exact(n: int):
    return gmpy2.mpfr(gmpy2.mpz(n), max(2, n.bit_length() + 1))


class Enclosure:
    """A certified two-sided bound ``[mid - rad, mid + rad]`` on a real."""

    __slots__ = ("mid", "rad", "upper_infinite", "prec")

    def __init__(self, mid, rad, prec: int, upper_infinite: bool = False):
        self.mid = mid
        self.rad = rad
        self.prec = prec
        self.upper_infinite = upper_infinite

    # -- constructors -------------------------------------------------

    @classmethod
    def infinite(cls, prec: int) -> "Enclosure":
        return cls(_INF, _ZERO, prec, upper_infinite=True)

    @classmethod
    def exact_int(cls, n: int, prec: int) -> "Enclosure":
        ctx = ball_context(prec)
        mid = ctx.add(gmpy2.mpfr(0), gmpy2.mpz(n))
        if mid == n:
            return cls(mid, _ZERO, prec)
        return cls(mid, _RUP.mul(_abs_up(mid), _eps(prec)), prec)

    @classmethod
    def from_rational(cls, value, prec: int) -> "Enclosure":
        """Tightest ball around an exact rational (radius 0 if dyadic)."""
        if isinstance(value, int):
            return cls.exact_int(value, prec)
        if isinstance(value, Fraction):
            q = gmpy2.mpq(value.numerator, value.denominator)
        else:
            q = gmpy2.mpq(value)
        ctx = ball_context(prec)
        mid = ctx.add(gmpy2.mpfr(0), q)
        if gmpy2.mpq(mid) == q:
            return cls(mid, _ZERO, prec)
        return cls(mid, _RUP.mul(_abs_up(mid), _eps(prec)), prec)

    @classmethod
    def from_endpoints(cls, lo, hi, prec: int) -> "Enclosure":
        """Ball containing ``[lo, hi]`` (both mpfr, lo <= hi)."""
        ctx = ball_context(prec)
        mid = ctx.div(ctx.add(lo, hi), 2)
        rad = _RUP.add(
            _RUP.maxnum(_RUP.sub(hi, mid), _RUP.sub(mid, lo)),
            _RUP.mul(_abs_up(mid), _eps(prec)),
        )
        if rad < 0:
            rad = _ZERO
        return cls(mid, rad, prec)

    # -- endpoints -----------------------------------------------------

    def lo(self):
        """Certified lower endpoint at full precision (mpfr, rounded down)."""
        if self.upper_infinite:
            return _INF
        return _directed(self.prec, False).sub(self.mid, self.rad)

    def hi(self):
        """Certified upper endpoint at full precision (mpfr, rounded up)."""
        if self.upper_infinite:
            return _INF
        return _directed(self.prec, True).add(self.mid, self.rad)

    def width(self):
        return _RUP.mul(self.rad, 2)

    def is_finite(self) -> bool:
        return not self.upper_infinite

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other, prec: int) -> "Enclosure":
        if isinstance(other, Enclosure):
            return other
        if isinstance(other, (int, Fraction)):
            return Enclosure.from_rational(other, prec)
        raise TypeError(f"cannot mix Enclosure with {type(other)!r}")

    def __add__(self, other) -> "Enclosure":
        other = self._coerce(other, self.prec)
        prec = max(self.prec, other.prec)
        if self.upper_infinite or other.upper_infinite:
            return Enclosure.infinite(prec)
        ctx = ball_context(prec)
        mid = ctx.add(self.mid, other.mid)
        rad = _RUP.add(_RUP.add(self.rad, other.rad), _RUP.mul(_abs_up(mid), _eps(prec)))
        return Enclosure(mid, rad, prec)

    __radd__ = __add__

    def __neg__(self) -> "Enclosure":
        if self.upper_infinite:
            raise ValueError("cannot negate an upper-infinite enclosure")
        return Enclosure(ball_context(self.prec).minus(self.mid), self.rad, self.prec)

    def __sub__(self, other) -> "Enclosure":
        other = self._coerce(other, self.prec)
        if other.upper_infinite:
            raise ValueError("cannot subtract an upper-infinite enclosure")
        prec = max(self.prec, other.prec)
        if self.upper_infinite:
            return Enclosure.infinite(prec)
        ctx = ball_context(prec)
        mid = ctx.sub(self.mid, other.mid)
        rad = _RUP.add(_RUP.add(self.rad, other.rad), _RUP.mul(_abs_up(mid), _eps(prec)))
        return Enclosure(mid, rad, prec)

    def __rsub__(self, other) -> "Enclosure":
        return self._coerce(other, self.prec) - self

    def __mul__(self, other) -> "Enclosure":
        other = self._coerce(other, self.prec)
        prec = max(self.prec, other.prec)
        if self.upper_infinite or other.upper_infinite:
            # Only meaningful against certified-positive finite factors.
            fin = other if self.upper_infinite else self
            if fin.upper_infinite or _RDN.sub(fin.mid, fin.rad) <= 0:
                raise ValueError("infinite enclosure times non-positive factor")
            return Enclosure.infinite(prec)
        ctx = ball_context(prec)
        mid = ctx.mul(self.mid, other.mid)
        rad = _RUP.add(
            _RUP.add(
                _RUP.mul(_abs_up(self.mid), other.rad),
                _RUP.mul(_abs_up(other.mid), self.rad),
            ),
            _RUP.add(_RUP.mul(self.rad, other.rad), _RUP.mul(_abs_up(mid), _eps(prec))),
        )
        return Enclosure(mid, rad, prec)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Enclosure":
        other = self._coerce(other, self.prec)
        prec = max(self.prec, other.prec)
        if other.upper_infinite:
            raise ValueError("division by an upper-infinite enclosure")
        if self.upper_infinite:
            if _RDN.sub(other.mid, other.rad) <= 0:
                raise ValueError("infinite enclosure over non-positive divisor")
            return Enclosure.infinite(prec)
        denom_lo = _RDN.sub(_RDN.abs(other.mid), other.rad)
        if denom_lo <= 0:
            raise ZeroDivisionError("divisor ball contains zero")
        ctx = ball_context(prec)
        mid = ctx.div(self.mid, other.mid)
        # |a/b - ma/mb| <= (ra + |ma/mb| rb) / (|mb| - rb)
        rad = _RUP.add(
            _RUP.div(_RUP.add(self.rad, _RUP.mul(_abs_up(mid), other.rad)), denom_lo),
            _RUP.mul(_abs_up(mid), _eps(prec)),
        )
        return Enclosure(mid, rad, prec)

    def __rtruediv__(self, other) -> "Enclosure":
        return self._coerce(other, self.prec) / self

    def log(self) -> "Enclosure":
        if self.upper_infinite:
            return Enclosure.infinite(self.prec)
        lo = _RDN.sub(self.mid, self.rad)
        if lo <= 0:
            raise ValueError("log of a ball touching zero")
        ctx = ball_context(self.prec)
        mid = ctx.log(self.mid)
        rad = _RUP.add(_RUP.div(self.rad, lo), _RUP.mul(_abs_up(mid), _eps(self.prec)))
        return Enclosure(mid, rad, self.prec)

    def exp(self) -> "Enclosure":
        if self.upper_infinite:
            return Enclosure.infinite(self.prec)
        ctx = ball_context(self.prec)
        mid = ctx.exp(self.mid)
        hi = _RUP.exp(_RUP.add(self.mid, self.rad))
        rad = _RUP.add(_RUP.mul(self.rad, hi), _RUP.mul(_abs_up(mid), _eps(self.prec)))
        return Enclosure(mid, rad, self.prec)

    def pow_int(self, k: int) -> "Enclosure":
        if k < 0:
            return Enclosure.exact_int(1, self.prec) / self.pow_int(-k)
        result = Enclosure.exact_int(1, self.prec)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def abs_enclosure(self) -> "Enclosure":
        if self.upper_infinite:
            return self
        if _RDN.sub(self.mid, self.rad) >= 0:
            return self
        if _RUP.add(self.mid, self.rad) <= 0:
            return -self
        hi = _RUP.maxnum(_abs_up(self.lo()), _abs_up(self.hi()))
        return Enclosure.from_endpoints(_ZERO, hi, self.prec)

    def widen(self, extra) -> "Enclosure":
        """Add ``extra`` (mpfr or int, >= 0) to the radius."""
        if self.upper_infinite:
            return self
        return Enclosure(self.mid, _RUP.add(self.rad, extra), self.prec)

    def round_to(self, prec: int) -> "Enclosure":
        if self.upper_infinite:
            return Enclosure.infinite(prec)
        ctx = ball_context(prec)
        mid = ctx.add(self.mid, 0)
        rad = _RUP.add(self.rad, _RUP.mul(_abs_up(mid), _eps(prec)))
        return Enclosure(mid, rad, prec)

    # -- certified comparisons ------------------------------------------

    def certainly_lt(self, other) -> bool:
        other = self._coerce(other, self.prec)
        if self.upper_infinite:
            return False
        if other.upper_infinite:
            return True
        return self.hi() < other.lo()

    def certainly_gt(self, other) -> bool:
        other = self._coerce(other, self.prec)
        if other.upper_infinite:
            return False
        if self.upper_infinite:
            return True
        return self.lo() > other.hi()

    def separated_from(self, other) -> bool:
        return self.certainly_lt(other) or self.certainly_gt(other)

    def contains(self, value) -> bool:
        """Whether the exact rational ``value`` may lie in this ball."""
        if self.upper_infinite:
            return False
        if isinstance(value, Fraction):
            q = gmpy2.mpq(value.numerator, value.denominator)
        else:
            q = gmpy2.mpq(value)
        return gmpy2.mpq(self.lo()) <= q <= gmpy2.mpq(self.hi())

    # -- misc ------------------------------------------------------------

    def to_fraction_mid(self) -> Fraction:
        if self.upper_infinite:
            raise ValueError("infinite enclosure has no rational midpoint")
        q = gmpy2.mpq(self.mid)
        return Fraction(int(q.numerator), int(q.denominator))

    def rad_fraction(self) -> Fraction:
        q = gmpy2.mpq(self.rad)
        return Fraction(int(q.numerator), int(q.denominator))

    def __repr__(self) -> str:
        if self.upper_infinite:
            return "Enclosure(+inf)"
        return f"Enclosure({self.mid!s} +/- {self.rad!s})"

    def __format__(self, spec: str) -> str:
        if self.upper_infinite:
            return "+inf"
        return format(self.mid, spec)


def zeta_ball(s: int, prec: int) -> Enclosure:
    """Certified enclosure of the Riemann zeta value at integer s >= 2."""
    if s < 2:
        raise ValueError("zeta_ball requires s >= 2")
    arg = _to_mpfr_exact(s)
    lo = gmpy2.context(precision=prec, round=gmpy2.RoundDown).zeta(arg)
    hi = gmpy2.context(precision=prec, round=gmpy2.RoundUp).zeta(arg)
    return Enclosure.from_endpoints(lo, hi, prec)


def pi_ball(prec: int) -> Enclosure:
    lo = gmpy2.context(precision=prec, round=gmpy2.RoundDown).const_pi()
    hi = gmpy2.context(precision=prec, round=gmpy2.RoundUp).const_pi()
    return Enclosure.from_endpoints(lo, hi, prec)
