"""Certified power series in 1/n with explicit remainder bounds.

The nested-sum evaluator peels one summation variable at a time; at each
level it needs the deep tail ``sum_{m >= n} f(m)`` both as exact ball
values for small n and as an asymptotic expansion for large n.  A
:class:`TailSeries` represents a function of an integer n >= N0 as

    A(n) = sum_{i=0}^{P} c_i * n^-i  +  err(n),   |err(n)| <= E * n^-(P+1),

with ball coefficients c_i and an upward-rounded scalar bound E.  All
operations (sum, product, exponential, the tail-sum operator) preserve
that contract, so the enclosure returned at the end of an evaluation is
sound by construction.

Tail sums of single powers are expanded by Euler-Maclaurin.  For
f(t) = t^-s the even derivatives keep a constant sign, so the remainder
after any number of correction terms is bounded in magnitude by the first
omitted term; every remainder constant below leans on that classical
fact.
"""

from __future__ import annotations

import math
from fractions import Fraction

import gmpy2

from .balls import Enclosure

__all__ = [
    "EvalParams",
    "TailSeries",
    "bernoulli",
    "params_for",
    "zeta_tail_series",
    "zeta_tail_value",
]

_RUP = gmpy2.context(precision=64, round=gmpy2.RoundUp)
_RDN = gmpy2.context(precision=64, round=gmpy2.RoundDown)

_bernoulli_cache: list[Fraction] = [Fraction(1)]


def bernoulli(m: int) -> Fraction:
    """Exact Bernoulli number B_m (B_1 = -1/2 convention)."""
    while len(_bernoulli_cache) <= m:
        k = len(_bernoulli_cache)
        acc = Fraction(0)
        binom = 1
        for j in range(k):
            acc += binom * _bernoulli_cache[j]
            binom = binom * (k + 1 - j) // (j + 1)
        _bernoulli_cache.append(-acc / (k + 1))
    return _bernoulli_cache[m]


def _rising(s: int, m: int) -> int:
    out = 1
    for v in range(m):
        out *= s + v
    return out


def _factorial(n: int) -> int:
    out = 1
    for v in range(2, n + 1):
        out *= v
    return out


def _pow_down(base_int: int, k: int):
    """Lower bound of base^k, safe as a denominator of upper bounds."""
    return _RDN.pow(gmpy2.mpfr(base_int), k)


class EvalParams:
    """Working parameters of the series machinery.

    N0 is the cutoff between direct summation and asymptotic expansion
    (kept a power of two so powers of it are exact), P the truncation
    degree of every 1/n expansion.  Defaults are chosen so that the
    unavoidable E * N0^-(P+1) residual sits far below 2^-prec.
    """

    __slots__ = ("prec", "N0", "P", "_fold_cache")

    def __init__(self, prec: int, N0: int | None = None, P: int | None = None):
        self.prec = prec
        if N0 is None:
            N0 = 256 if prec <= 288 else 512
        if N0 & (N0 - 1):
            raise ValueError("N0 must be a power of two")
        if P is None:
            P = max(10, math.ceil((prec + 48) / math.log2(N0)))
        self.N0 = N0
        self.P = P
        self._fold_cache: dict[int, object] = {}

    def key(self):
        return (self.prec, self.N0, self.P)

    def fold_factor(self, j: int):
        """N0^(P+1-j), the exact ratio bounding n^-j by n^-(P+1) for n >= N0."""
        if j < self.P + 1:
            raise ValueError("fold_factor only for exponents beyond P")
        f = self._fold_cache.get(j)
        if f is None:
            # N0 = 2^b, so N0^(P+1-j) = 2^(b*(P+1-j)) is exact
            b = self.N0.bit_length() - 1
            f = gmpy2.mpfr(2) ** (b * (self.P + 1 - j))
            self._fold_cache[j] = f
        return f

    def __repr__(self):
        return f"EvalParams(prec={self.prec}, N0={self.N0}, P={self.P})"


_params_cache: dict[int, EvalParams] = {}


def params_for(prec: int) -> EvalParams:
    p = _params_cache.get(prec)
    if p is None:
        p = EvalParams(prec)
        _params_cache[prec] = p
    return p


class TailSeries:
    """Truncated 1/n expansion with a certified remainder bound."""

    __slots__ = ("coeffs", "err", "params")

    def __init__(self, params: EvalParams, coeffs=None, err=None):
        self.params = params
        self.coeffs: list = coeffs if coeffs is not None else [None] * (params.P + 1)
        self.err = err if err is not None else gmpy2.mpfr(0)

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, params: EvalParams) -> "TailSeries":
        return cls(params)

    @classmethod
    def monomial(cls, params: EvalParams, exponent: int, coeff: Enclosure) -> "TailSeries":
        s = cls(params)
        s.add_term(exponent, coeff)
        return s

    def copy(self) -> "TailSeries":
        return TailSeries(self.params, list(self.coeffs), self.err)

    # -- bookkeeping ------------------------------------------------------

    def add_term(self, exponent: int, coeff: Enclosure) -> None:
        if exponent <= self.params.P:
            cur = self.coeffs[exponent]
            self.coeffs[exponent] = coeff if cur is None else cur + coeff
        else:
            bound = _RUP.add(_RUP.abs(coeff.mid), coeff.rad)
            self.err = _RUP.add(self.err, _RUP.mul(bound, self.params.fold_factor(exponent)))

    def add_err(self, bound) -> None:
        self.err = _RUP.add(self.err, bound)

    def lowest_exponent(self) -> int:
        for i, c in enumerate(self.coeffs):
            if c is not None:
                return i
        return self.params.P + 1

    def sup_abs(self):
        """Upper bound of |A(n)| over all n >= N0."""
        total = gmpy2.mpfr(0)
        for i, c in enumerate(self.coeffs):
            if c is None:
                continue
            mag = _RUP.add(_RUP.abs(c.mid), c.rad)
            total = _RUP.add(total, _RUP.div(mag, _pow_down(self.params.N0, i)))
        total = _RUP.add(total, _RUP.div(self.err, _pow_down(self.params.N0, self.params.P + 1)))
        return total

    def sup_abs_times_n(self):
        """Upper bound of n * |A(n)| over n >= N0 (needs no constant term)."""
        if self.coeffs[0] is not None:
            raise ValueError("series has a constant term")
        total = gmpy2.mpfr(0)
        for i, c in enumerate(self.coeffs):
            if c is None:
                continue
            mag = _RUP.add(_RUP.abs(c.mid), c.rad)
            total = _RUP.add(total, _RUP.div(mag, _pow_down(self.params.N0, i - 1)))
        total = _RUP.add(total, _RUP.div(self.err, _pow_down(self.params.N0, self.params.P)))
        return total

    # -- ring operations ---------------------------------------------------

    def __add__(self, other: "TailSeries") -> "TailSeries":
        out = self.copy()
        for i, c in enumerate(other.coeffs):
            if c is not None:
                out.add_term(i, c)
        out.add_err(other.err)
        return out

    def scale(self, factor: Enclosure) -> "TailSeries":
        out = TailSeries(self.params)
        for i, c in enumerate(self.coeffs):
            if c is not None:
                out.coeffs[i] = c * factor
        out.err = _RUP.mul(self.err, _RUP.add(_RUP.abs(factor.mid), factor.rad))
        return out

    def shift(self, k: int) -> "TailSeries":
        """Multiply by n^-k (k >= 0)."""
        out = TailSeries(self.params)
        for i, c in enumerate(self.coeffs):
            if c is not None:
                out.add_term(i + k, c)
        out.add_err(_RUP.div(self.err, _pow_down(self.params.N0, k)))
        return out

    def __mul__(self, other: "TailSeries") -> "TailSeries":
        out = TailSeries(self.params)
        for i, a in enumerate(self.coeffs):
            if a is None:
                continue
            for j, b in enumerate(other.coeffs):
                if b is None:
                    continue
                out.add_term(i + j, a * b)
        cross = _RUP.add(
            _RUP.add(_RUP.mul(self.sup_abs(), other.err), _RUP.mul(other.sup_abs(), self.err)),
            _RUP.div(_RUP.mul(self.err, other.err), _pow_down(self.params.N0, self.params.P + 1)),
        )
        out.add_err(cross)
        return out

    def exp(self) -> "TailSeries":
        """exp(A) for a series with no constant term."""
        params = self.params
        if self.coeffs[0] is not None:
            raise ValueError("exp requires a series vanishing at infinity")
        one = Enclosure.exact_int(1, params.prec)
        out = TailSeries.monomial(params, 0, one)
        term = TailSeries.monomial(params, 0, one)
        for k in range(1, params.P + 1):
            term = term * self
            term = term.scale(Enclosure.from_rational(Fraction(1, k), params.prec))
            out = out + term
        # sum_{k>P} |A(n)|^k/k! <= (S1/n)^(P+1)/(P+1)! * e^(S1/N0)
        s1 = self.sup_abs_times_n()
        fact_dn = _RDN.add(gmpy2.mpfr(0), gmpy2.mpz(_factorial(params.P + 1)))
        tail = _RUP.div(_RUP.pow(s1, params.P + 1), fact_dn)
        tail = _RUP.mul(tail, _RUP.exp(_RUP.div(s1, gmpy2.mpfr(params.N0))))
        out.add_err(tail)
        return out

    # -- evaluation ---------------------------------------------------------

    def eval_at(self, n: int) -> Enclosure:
        """Ball value of the series at an integer point n >= N0."""
        if n < self.params.N0:
            raise ValueError("series only valid from N0 on")
        prec = self.params.prec
        inv = Enclosure.exact_int(1, prec) / Enclosure.exact_int(n, prec)
        acc = Enclosure.exact_int(0, prec)
        for i in range(self.params.P, -1, -1):
            acc = acc * inv
            c = self.coeffs[i]
            if c is not None:
                acc = acc + c
        bound = _RUP.div(self.err, _pow_down(n, self.params.P + 1))
        return acc.widen(bound)

    def tail_sum_series(self) -> "TailSeries":
        """Series of sum_{m >= n} A(m); needs lowest exponent >= 2."""
        params = self.params
        if self.lowest_exponent() < 2:
            raise ValueError("tail sum diverges: exponent below 2")
        out = TailSeries(params)
        for i, c in enumerate(self.coeffs):
            if c is None:
                continue
            out = out + zeta_tail_series(i, params).scale(c)
        # sum_{m>=n} err(m) <= E * Z_{P+1}(n) <= E * (n^-(P+1) + n^-P / P)
        zero = Enclosure.exact_int(0, params.prec)
        out.add_term(params.P, zero.widen(_RUP.div(self.err, gmpy2.mpfr(params.P))))
        out.add_err(self.err)
        return out

    def tail_sum_value(self, a: int) -> Enclosure:
        """Ball value of sum_{m >= a} A(m) for a >= N0."""
        params = self.params
        if self.lowest_exponent() < 2:
            raise ValueError("tail sum diverges: exponent below 2")
        acc = Enclosure.exact_int(0, params.prec)
        for i, c in enumerate(self.coeffs):
            if c is None:
                continue
            acc = acc + c * zeta_tail_value(i, a, params.prec)
        zb = _RUP.add(
            _RUP.div(gmpy2.mpfr(1), _pow_down(a, params.P + 1)),
            _RUP.div(_RUP.div(gmpy2.mpfr(1), _pow_down(a, params.P)), gmpy2.mpfr(params.P)),
        )
        return acc.widen(_RUP.mul(self.err, zb))


_zseries_cache: dict[tuple, TailSeries] = {}
_zvalue_cache: dict[tuple, Enclosure] = {}


def zeta_tail_series(s: int, params: EvalParams) -> TailSeries:
    """Euler-Maclaurin expansion of Z_s(n) = sum_{m >= n} m^-s, s >= 2."""
    if s < 2:
        raise ValueError("zeta_tail_series needs s >= 2")
    key = (s,) + params.key()
    cached = _zseries_cache.get(key)
    if cached is not None:
        return cached
    prec = params.prec
    out = TailSeries(params)
    out.add_term(s - 1, Enclosure.from_rational(Fraction(1, s - 1), prec))
    out.add_term(s, Enclosure.from_rational(Fraction(1, 2), prec))
    l = 1
    while True:
        exponent = s + 2 * l - 1
        coeff = bernoulli(2 * l) * _rising(s, 2 * l - 1) / _factorial(2 * l)
        if exponent > params.P:
            ball = Enclosure.from_rational(abs(coeff), prec)
            mag = _RUP.add(_RUP.abs(ball.mid), ball.rad)
            out.add_err(_RUP.mul(mag, params.fold_factor(exponent)))
            break
        out.add_term(exponent, Enclosure.from_rational(coeff, prec))
        l += 1
    _zseries_cache[key] = out
    return out


def zeta_tail_value(s: int, a: int, prec: int) -> Enclosure:
    """Certified ball for Z_s(a) = sum_{m >= a} m^-s at integer a >= 2."""
    if s < 2 or a < 2:
        raise ValueError("zeta_tail_value needs s >= 2, a >= 2")
    key = (s, a, prec)
    cached = _zvalue_cache.get(key)
    if cached is not None:
        return cached
    av = Enclosure.exact_int(a, prec)
    inv = Enclosure.exact_int(1, prec) / av
    a_pow = inv.pow_int(s - 1)
    acc = a_pow / Enclosure.exact_int(s - 1, prec)
    a_pow = a_pow * inv
    acc = acc + a_pow * Enclosure.from_rational(Fraction(1, 2), prec)
    inv2 = inv * inv
    target = gmpy2.mpfr(2) ** (-(prec + 16))
    l = 1
    while True:
        coeff = bernoulli(2 * l) * _rising(s, 2 * l - 1) / _factorial(2 * l)
        a_pow = a_pow * inv if l == 1 else a_pow * inv2
        term = a_pow * Enclosure.from_rational(coeff, prec)
        hi = _RUP.add(_RUP.abs(term.mid), term.rad)
        if hi <= target or 2 * l >= a:
            # remainder bounded by the first omitted term
            acc = acc.widen(hi)
            break
        acc = acc + term
        l += 1
    _zvalue_cache[key] = acc
    return acc
