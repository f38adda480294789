"""Rigorous evaluation of finite and tail-periodic zeta-star values.

The nested series is summed variable by variable, outermost first.  For
the running prefix (k1,...,kj) the level state holds

    G_j(n) = sum over chains n1 >= ... >= nj >= n of prod n_i^-k_i

as exact ball values for n <= N0 together with a certified 1/n expansion
for n > N0 (see :mod:`zetastar.series`).  One more level is one reversed
cumulative sum plus one application of the tail-sum operator, so deep
indices cost O(depth * N0) ball operations, and the enclosure width is
driven by the expansion degree rather than by how far the series was
summed.  A plain truncated dynamic program with an explicit logarithmic
tail bound is kept alongside (``method="direct"``) as an independent,
much fatter cross-check.

Constant tails {q}^inf are summed out exactly into the partial Euler
factor F_n(q) = prod_{m<=n} (1 - m^-q)^-1; ones tails collapse exactly
onto a finite index with the last exponent lowered by one.
"""

from __future__ import annotations

from collections import OrderedDict
from fractions import Fraction

import gmpy2

from .balls import Enclosure
from .errors import DivergentValue, InvalidIndex
from .indices import Composition, ConstTail, NoTail, TailedIndex
from .series import EvalParams, TailSeries, params_for, zeta_tail_series, zeta_tail_value

__all__ = [
    "DEFAULT_PRECISION",
    "DEFAULT_TRUNCATION",
    "eval_finite",
    "eval_tailed",
    "eval_with_const_tail",
    "ones_tail_value",
    "reduce_ones_tail",
    "sum_endpoint",
    "product_endpoint",
    "tail_factor",
    "tail_factor_limit",
    "weighted_chain_sum",
    "clear_caches",
]

DEFAULT_PRECISION = 128
DEFAULT_TRUNCATION = 10**6

_RUP = gmpy2.context(precision=64, round=gmpy2.RoundUp)


def tail_factor(m: int, q: int) -> Fraction:
    """Exact partial Euler factor F_m(q) = prod_{n=2..m} (1 - n^-q)^-1."""
    if m < 1 or q < 1:
        raise InvalidIndex("tail_factor needs m >= 1, q >= 1")
    if q == 1:
        return Fraction(m)
    if q == 2:
        return Fraction(2 * m, m + 1)
    num = 1
    den = 1
    for n in range(2, m + 1):
        nq = n**q
        num *= nq
        den *= nq - 1
    return Fraction(num, den)


def _effective_params(precision: int, truncation: int) -> EvalParams:
    params = params_for(precision)
    if truncation < params.N0:
        n0 = 64
        while n0 * 2 <= truncation:
            n0 *= 2
        return EvalParams(precision, N0=max(64, n0))
    return params


class _LevelState:
    """Evaluator state after absorbing one more outer exponent."""

    __slots__ = ("G_vals", "G_series", "g_series")

    def __init__(self, G_vals, G_series, g_series):
        self.G_vals = G_vals  # index 1..N0+1
        self.G_series = G_series
        self.g_series = g_series


_state_cache: OrderedDict = OrderedDict()
_STATE_CACHE_MAX = 768


_invpow_cache: dict = {}


def _inv_powers(k: int, params: EvalParams) -> list:
    """Cached balls of n^-k for n = 1..N0 (shared across all prefixes)."""
    key = (k, params.key())
    arr = _invpow_cache.get(key)
    if arr is None:
        prec = params.prec
        one = Enclosure.exact_int(1, prec)
        arr = [None] + [one / Enclosure.exact_int(n**k, prec) for n in range(1, params.N0 + 1)]
        _invpow_cache[key] = arr
    return arr


def _extend(prev: _LevelState | None, k: int, params: EvalParams) -> _LevelState:
    n0 = params.N0
    inv = _inv_powers(k, params)
    if prev is None:
        g_series = TailSeries.monomial(params, k, Enclosure.exact_int(1, params.prec))
        g_vals = inv
    else:
        g_series = prev.G_series.shift(k)
        g_vals = [None] + [inv[n] * prev.G_vals[n] for n in range(1, n0 + 1)]
    G_series = g_series.tail_sum_series()
    G_vals = [None] * (n0 + 2)
    G_vals[n0 + 1] = G_series.eval_at(n0 + 1)
    for n in range(n0, 0, -1):
        G_vals[n] = G_vals[n + 1] + g_vals[n]
    return _LevelState(G_vals, G_series, g_series)


def _prefix_state(parts: tuple[int, ...], params: EvalParams) -> _LevelState:
    key = (parts, params.key())
    state = _state_cache.get(key)
    if state is not None:
        _state_cache.move_to_end(key)
        return state
    prev = _prefix_state(parts[:-1], params) if len(parts) > 1 else None
    state = _extend(prev, parts[-1], params)
    _state_cache[key] = state
    while len(_state_cache) > _STATE_CACHE_MAX:
        _state_cache.popitem(last=False)
    return state


def clear_caches() -> None:
    _state_cache.clear()
    _invpow_cache.clear()
    _f_cache.clear()
    _rho_cache.clear()
    _finf_cache.clear()
    _w_cache.clear()


# -- constant-tail machinery -------------------------------------------------

_f_cache: dict = {}
_rho_cache: dict = {}
_finf_cache: dict = {}
_w_cache: dict = {}


def _euler_factor_data(q: int, params: EvalParams) -> tuple[list, list]:
    """Balls of F_n(q) and of the increments F_n - F_(n-1), n = 1..N0.

    Both come from one exact rational sweep, so the increment balls are
    tight rather than differences of rounded values.
    """
    key = (q, params.key())
    data = _f_cache.get(key)
    if data is None:
        prec = params.prec
        f_exact = Fraction(1)
        f_balls = [None, Enclosure.exact_int(1, prec)]
        df_balls = [None, None]
        for n in range(2, params.N0 + 1):
            nq = n**q
            nxt = f_exact * Fraction(nq, nq - 1)
            df_balls.append(Enclosure.from_rational(nxt - f_exact, prec))
            f_balls.append(Enclosure.from_rational(nxt, prec))
            f_exact = nxt
        data = (f_balls, df_balls)
        _f_cache[key] = data
    return data


def _rho_series(q: int, params: EvalParams) -> TailSeries:
    """Series of rho(n) = prod_{m>n} (1 - m^-q) = F_n(q)/F_inf(q)."""
    key = (q, params.key())
    rho = _rho_cache.get(key)
    if rho is not None:
        return rho
    prec = params.prec
    # -log rho(n) = sum_j (1/j) * (Z_{qj}(n) - n^-qj)
    sigma = TailSeries.zero(params)
    j = 1
    while q * j - 1 <= params.P:
        term = zeta_tail_series(q * j, params)
        term = term + TailSeries.monomial(params, q * j, Enclosure.exact_int(-1, prec))
        sigma = sigma + term.scale(Enclosure.from_rational(Fraction(1, j), prec))
        j += 1
    # remaining j: sum bounded by 2 * n^-(qj-1), an exponent beyond P
    sigma.add_err(_RUP.mul(gmpy2.mpfr(2), params.fold_factor(q * j - 1)))
    rho = sigma.scale(Enclosure.exact_int(-1, prec)).exp()
    _rho_cache[key] = rho
    return rho


def tail_factor_limit(q: int, precision: int = DEFAULT_PRECISION) -> Enclosure:
    """Enclosure of F_inf(q) = prod_{n>=2} (1 - n^-q)^-1 for q >= 2."""
    if q == 1:
        raise DivergentValue("the harmonic Euler product diverges")
    if q < 1:
        raise InvalidIndex("tail exponent must be >= 1")
    key = (q, precision)
    val = _finf_cache.get(key)
    if val is not None:
        return val
    if q == 2:
        # telescoping product: exactly 2
        val = Enclosure.exact_int(2, precision)
    else:
        params = params_for(precision)
        f_vals, _df = _euler_factor_data(q, params)
        rho_n0 = _rho_series(q, params).eval_at(params.N0)
        val = f_vals[params.N0] / rho_n0
    _finf_cache[key] = val
    return val


def _tail_weights(q: int, params: EvalParams) -> list:
    """Balls of W_i = sum_{n > N0} n^-i rho(n) for i = 2..P.

    Precomputing these turns the deep-tail part of a constant-tail
    evaluation into one short dot product with the level's coefficients
    instead of a full series multiplication per call.
    """
    key = (q, params.key())
    weights = _w_cache.get(key)
    if weights is None:
        prec = params.prec
        a = params.N0 + 1
        rho = _rho_series(q, params)
        weights = [None] * (params.P + 1)
        for i in range(2, params.P + 1):
            acc = Enclosure.exact_int(0, prec)
            for j, r in enumerate(rho.coeffs):
                if r is None:
                    continue
                acc = acc + r * zeta_tail_value(i + j, a, prec)
            acc = acc.widen(_RUP.mul(rho.err, zeta_tail_value(i + params.P + 1, a, prec).hi()))
            weights[i] = acc
        _w_cache[key] = weights
    return weights


def sum_endpoint(q: int, precision: int = DEFAULT_PRECISION) -> Enclosure:
    """Left endpoint of the sumset: twice the all-q tail value."""
    return tail_factor_limit(q, precision) * 2


def product_endpoint(q: int, precision: int = DEFAULT_PRECISION) -> Enclosure:
    """Left endpoint of the product set: the all-q tail value squared."""
    v = tail_factor_limit(q, precision)
    return v * v


# -- public evaluators --------------------------------------------------------


def eval_finite(
    c: Composition,
    truncation: int = DEFAULT_TRUNCATION,
    precision: int = DEFAULT_PRECISION,
    method: str = "series",
) -> Enclosure:
    """Enclosure of the finite zeta-star value of ``c``.

    ``method="direct"`` switches to the plain truncated dynamic program
    with the logarithmic tail bound (capped at 200k terms); its enclosure
    is far wider but shares no machinery with the default path.
    """
    if method == "direct":
        return _eval_finite_direct(c, truncation, precision)
    params = _effective_params(precision, truncation)
    state = _prefix_state(c.parts, params)
    return state.G_vals[1]


def eval_with_const_tail(
    t: TailedIndex,
    truncation: int = DEFAULT_TRUNCATION,
    precision: int = DEFAULT_PRECISION,
) -> Enclosure:
    """Enclosure of the value of ``prefix`` completed by its constant tail.

    Raises DivergentValue exactly for the (2,{1}^(r-1)) prefix with a ones
    tail, the single divergent case.
    """
    if not isinstance(t.tail, ConstTail):
        raise InvalidIndex("eval_with_const_tail needs a constant tail")
    q = t.tail.q
    prefix = t.prefix
    if q == 1:
        reduced = reduce_ones_tail(prefix)
        if reduced is None:
            raise DivergentValue(f"{t} diverges")
        return eval_finite(reduced, truncation, precision)
    params = _effective_params(precision, truncation)
    state = _prefix_state(prefix.parts, params)
    f_vals, df_vals = _euler_factor_data(q, params)
    n0 = params.N0
    # Abel summation of sum_{n<=N0} (G(n) - G(n+1)) F_n(q)
    acc = state.G_vals[1] * f_vals[1]
    for n in range(2, n0 + 1):
        acc = acc + state.G_vals[n] * df_vals[n]
    acc = acc - state.G_vals[n0 + 1] * f_vals[n0]
    # deep tail: rho stays in (0,1), so the series remainder folds cheaply
    weights = _tail_weights(q, params)
    tail = Enclosure.exact_int(0, precision)
    for i, c in enumerate(state.g_series.coeffs):
        if c is not None:
            tail = tail + c * weights[i]
    tail = tail.widen(
        _RUP.mul(state.g_series.err, zeta_tail_value(params.P + 1, n0 + 1, precision).hi())
    )
    f_inf = tail_factor_limit(q, precision)
    return acc + f_inf * tail


def eval_tailed(
    t: TailedIndex,
    truncation: int = DEFAULT_TRUNCATION,
    precision: int = DEFAULT_PRECISION,
) -> Enclosure:
    """Evaluate a TailedIndex with whatever tail it carries."""
    if isinstance(t.tail, NoTail):
        return eval_finite(t.prefix, truncation, precision)
    return eval_with_const_tail(t, truncation, precision)


def reduce_ones_tail(prefix: Composition) -> Composition | None:
    """Finite index with the same value as (prefix,{1}^inf); None if divergent.

    Trailing ones are absorbed and the last surviving exponent drops by
    one: summing the ones tail out contributes exactly a factor n_r.
    """
    parts = list(prefix.parts)
    while len(parts) > 1 and parts[-1] == 1:
        parts.pop()
    parts[-1] -= 1
    if parts == [1]:
        return None
    return Composition(tuple(parts))


def ones_tail_value(
    prefix: Composition,
    truncation: int = DEFAULT_TRUNCATION,
    precision: int = DEFAULT_PRECISION,
) -> Enclosure:
    """Value of (prefix,{1}^inf); an infinite enclosure when divergent."""
    reduced = reduce_ones_tail(prefix)
    if reduced is None:
        return Enclosure.infinite(precision)
    return eval_finite(reduced, truncation, precision)


# -- weighted chain sums (inequality checks) ----------------------------------


def _harmonic_weight_series(params: EvalParams) -> TailSeries:
    """Series of 2n/(n+1) = 2 - 2/(n+1), alternating expansion."""
    prec = params.prec
    s = TailSeries.monomial(params, 0, Enclosure.exact_int(2, prec))
    sign = -1
    for i in range(1, params.P + 1):
        s.add_term(i, Enclosure.exact_int(2 * sign, prec))
        sign = -sign
    s.add_err(gmpy2.mpfr(2))
    return s


def weighted_chain_sum(
    prefix: Composition,
    last_exponent: int,
    weight: str = "one",
    precision: int = DEFAULT_PRECISION,
) -> Enclosure:
    """Enclosure of sum over chains n1>=...>=nr>=m of prod n_i^-k_i * m^-e * u(m).

    ``weight`` selects u: "one" or "f2" for the closed-form q=2 Euler
    factor 2m/(m+1).  Used by the subdivision inequality checks; the
    caller must pick exponents that make the sum converge.
    """
    if last_exponent < 0:
        raise InvalidIndex("last exponent must be >= 0")
    params = params_for(precision)
    state = _prefix_state(prefix.parts, params)
    prec = precision
    one = Enclosure.exact_int(1, prec)
    h_series = state.G_series.shift(last_exponent)
    if weight == "f2":
        h_series = h_series * _harmonic_weight_series(params)
    elif weight != "one":
        raise ValueError(f"unknown weight {weight!r}")
    if h_series.lowest_exponent() < 2:
        raise DivergentValue("weighted chain sum diverges")
    acc = Enclosure.exact_int(0, prec)
    for n in range(1, params.N0 + 1):
        term = (one / Enclosure.exact_int(n**last_exponent, prec)) * state.G_vals[n]
        if weight == "f2":
            term = term * Enclosure.from_rational(Fraction(2 * n, n + 1), prec)
        acc = acc + term
    return acc + h_series.tail_sum_value(params.N0 + 1)


# -- direct (cross-check) evaluator --------------------------------------------


def _log_tail_bound(k1: int, depth: int, N: int, prec: int):
    """Upper bound for the discarded outer tail of a depth-``depth`` index.

    Inner chains are bounded by (1+ln n)^(depth-1); the remaining outer sum
    is an incomplete-gamma integral plus one boundary term at the larger of
    N and the integrand's mode.
    """
    ctx = gmpy2.context(precision=64, round=gmpy2.RoundUp)
    r = depth
    a = k1 - 1
    u0 = ctx.mul(gmpy2.mpfr(a), ctx.add(1, ctx.log(N)))
    # Gamma(r, u0) = (r-1)! e^-u0 sum_{j<r} u0^j/j!
    acc = gmpy2.mpfr(0)
    term = gmpy2.mpfr(1)
    fact = 1
    for j in range(r):
        if j:
            term = ctx.mul(term, u0)
            fact *= j
        acc = ctx.add(acc, ctx.div(term, fact))
    gamma_inc = ctx.mul(ctx.mul(acc, ctx.exp(ctx.minus(u0))), gmpy2.mpz(_int_factorial(r - 1)))
    integral = ctx.mul(ctx.mul(ctx.exp(gmpy2.mpfr(a)), ctx.pow(gmpy2.mpfr(a), -r)), gamma_inc)
    # boundary: sup of t^-k1 (1+ln t)^(r-1) over t >= N; mode at e^((r-1)/k1 - 1)
    import math

    t_mode = max(N, math.ceil(math.exp(max(0.0, (r - 1) / k1 - 1))))
    sup = ctx.mul(ctx.pow(gmpy2.mpfr(t_mode), -k1), ctx.pow(ctx.add(1, ctx.log(t_mode)), r - 1))
    return ctx.add(integral, sup)


def _int_factorial(n: int) -> int:
    out = 1
    for v in range(2, n + 1):
        out *= v
    return out


def _eval_finite_direct(c: Composition, truncation: int, precision: int) -> Enclosure:
    n_cap = max(16, min(truncation, 200_000))
    prec = precision
    one = Enclosure.exact_int(1, prec)
    inner = [one] * (n_cap + 1)
    for k in reversed(c.parts):
        acc = Enclosure.exact_int(0, prec)
        out = [None] * (n_cap + 1)
        for n in range(1, n_cap + 1):
            acc = acc + (one / Enclosure.exact_int(n**k, prec)) * inner[n]
            out[n] = acc
        inner = out
    partial = inner[n_cap]
    bound = _log_tail_bound(c.parts[0], c.depth, n_cap, prec)
    half = _RUP.div(bound, 2)
    return partial + Enclosure(half, half, prec)
