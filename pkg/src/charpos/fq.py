"""Evaluators for the character sine series

    f_q(x) = sum_{n>=1} chi(n) * sin(2 pi n x) / n**2.

Three routes are provided and cross-checked against each other:

* a truncated floating series with a proven 1/N tail bound,
* a closed form that is exact rational arithmetic up to one final factor
  of 2*pi**2/sqrt(q),
* two independent finite character sums (an arithmetic-progression sum
  over [1, pq] for x = a/p, and a quadratic lattice sum for x = a/q)
  that evaluate f_q at rational points as single integers.

The closed form comes from summing the Fourier series of the sawtooth
against the character: on each interval [a/q, (a+1)/q] the function
x -> x*(h - S(qx)) is linear with slope h - A(a) and intercept B(a)/q,
and f_q(x) = 2*pi**2/sqrt(q) * that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .charsum import _as_char, class_number, margin_values, _scan_arrays
from .errors import DomainError
from .ntcore import (PI2_HI, QuadChar, chi_sieve, chi_values, is_prime,
                     jacobi)

_HALF = Fraction(1, 2)


def _sin_sum(weights: np.ndarray, x: Fraction, n_terms: int) -> float:
    """sum_{n=1}^{N} weights[n-1] * sin(2 pi n x) / n**2.

    The angle is reduced exactly: n*x mod 1 is computed in integers before
    any float is formed, so the sine argument is always in [0, 2 pi) and
    catastrophic argument loss cannot occur even for huge numerators.
    """
    num = x.numerator % x.denominator
    den = x.denominator
    if num == 0 or 2 * num == den:
        return 0.0
    n_terms = int(n_terms)
    if n_terms * num < 1 << 62:
        r = (np.arange(1, n_terms + 1, dtype=np.int64) * num) % den
        frac = r.astype(np.float64) / den
    else:
        frac = np.empty(n_terms, dtype=np.float64)
        acc = 0
        for k in range(n_terms):
            acc = (acc + num) % den
            frac[k] = acc / den
    n = np.arange(1, n_terms + 1, dtype=np.float64)
    terms = weights[:n_terms].astype(np.float64) * np.sin((2 * math.pi) * frac)
    return float(np.sum(terms / (n * n)))


@dataclass(frozen=True)
class SeriesValue:
    value: float
    tail_bound: float
    terms: int


def fq_series(q_or_chi, x, n_terms: int) -> SeriesValue:
    """Truncated f_q(x); the dropped tail is below 1/n_terms in absolute value."""
    ch = _as_char(q_or_chi)
    if n_terms < 1:
        raise DomainError("need n_terms >= 1")
    x = Fraction(x)
    w = chi_values(ch, n_terms)[1:]
    return SeriesValue(_sin_sum(w, x, n_terms), 1.0 / n_terms, n_terms)


@dataclass(frozen=True)
class FqExact:
    """f_q(x) = coeff * 2*pi**2/sqrt(q) with coeff an exact Fraction."""

    q: int
    x: Fraction
    coeff: Fraction
    value: float


def fq_exact(q_or_chi, x) -> FqExact:
    """Closed-form f_q at any rational x, reduced by periodicity and oddness.

    At x = a/q the coefficient equals W(a)/q with W the integer margin, so
    positivity questions reduce to signs of integers.
    """
    from .charsum import weighted_prefix_sum

    ch = _as_char(q_or_chi)
    x = Fraction(x)
    t = x - math.floor(x)
    sign = 1
    if 2 * t > 1:
        t = 1 - t
        sign = -1
    if t == 0 or 2 * t == 1:
        coeff = Fraction(0)
    else:
        h = class_number(ch).h
        coeff = sign * t * (h - weighted_prefix_sum(ch, ch.q * t))
    value = 2 * math.pi ** 2 / math.sqrt(ch.q) * float(coeff)
    return FqExact(ch.q, x, coeff, value)


@dataclass(frozen=True, eq=False)
class PiecewiseFq:
    """Exact piecewise-linear model of x*(h - S(qx)) on [0, (a_max+1)/q].

    Piece a covers [a/q, (a+1)/q]; there the function is
    x * slopes[a] + intercepts[a]/q, and f_q(x) is 2*pi**2/sqrt(q) times it.
    margins[a] = W(a) is the (scaled by q) value at the left node a/q.
    """

    q: int
    h: int
    a_max: int
    slopes: np.ndarray
    intercepts: np.ndarray
    margins: np.ndarray

    def coeff_at(self, x) -> Fraction:
        x = Fraction(x)
        if not 0 <= x <= Fraction(self.a_max + 1, self.q):
            raise DomainError(f"{x} outside modeled range")
        a = min(math.floor(x * self.q), self.a_max)
        return x * int(self.slopes[a]) + Fraction(int(self.intercepts[a]), self.q)


def piecewise_fq(q_or_chi, a_max: int | None = None) -> PiecewiseFq:
    ch = _as_char(q_or_chi)
    if a_max is None:
        a_max = (ch.q - 1) // 2
    h, A, B, W = _scan_arrays(ch, a_max, None)
    return PiecewiseFq(ch.q, h, a_max, h - A, B, W)


@dataclass(frozen=True)
class FqShape:
    """Sign profile of f_q on [0, 1/2]: minimum node margin, zeros, flats."""

    q: int
    h: int
    min_w: int
    argmin_a: int
    min_coeff: Fraction
    argmin_x: Fraction
    zeros: tuple[Fraction, ...]
    flats: tuple[tuple[Fraction, Fraction], ...]


def fq_min_and_zeros(q_or_chi) -> FqShape:
    """All zeros and flat stretches of f_q in (0, 1/2], found exactly.

    Since the function is piecewise linear (after removing the positive
    prefactor), zeros are either nodes a/q with W(a) = 0 or sign changes
    inside a piece, solved in rationals.  f_q(1/2) = 0 identically by
    oddness around 1/2; that endpoint shows up through the final flat when
    the last piece vanishes, never as an interior zero.
    """
    ch = _as_char(q_or_chi)
    q = ch.q
    half = (q - 1) // 2
    pw = piecewise_fq(ch, half)
    W = pw.margins
    S = pw.slopes
    B = pw.intercepts
    body = W[1:]
    k = int(np.argmin(body))
    min_w = int(body[k])
    argmin_a = k + 1
    zeros = [Fraction(a, q) for a in range(1, half + 1) if W[a] == 0]
    for a in range(half):
        wl = int(W[a])
        wr = int(W[a + 1])
        if wl * wr < 0:
            zeros.append(Fraction(-int(B[a]), q * int(S[a])))
    flat_pieces = [a for a in range(half + 1)
                   if int(S[a]) == 0 and int(B[a]) == 0]
    flats: list[tuple[Fraction, Fraction]] = []
    for a in flat_pieces:
        lo = Fraction(a, q)
        hi = min(Fraction(a + 1, q), _HALF)
        if flats and flats[-1][1] == lo:
            flats[-1] = (flats[-1][0], hi)
        else:
            flats.append((lo, hi))
    return FqShape(q, pw.h, min_w, argmin_a, Fraction(min_w, q),
                   Fraction(argmin_a, q), tuple(sorted(zeros)), tuple(flats))


@dataclass(frozen=True)
class PrimeFracEval:
    """f_q(a/p) recovered from one finite sum over the window [1, pq].

    core is the integer  -chi_q(p) * (T(aq mod p) - T(-aq mod p))  with
    T(r) = sum of b**2 chi_q(b) over b <= pq, b = r (mod p), and

        f_q(a/p) = pi**2 * core / (2 p**2 q**2 sqrt(q)).

    stat = core/(p*q) when that division is exact (it always has been in
    every scan run to date), else None.
    """

    a: int
    p: int
    q: int
    core: int
    stat: int | None
    q_divides: bool
    modulus_prime: bool
    value: float


def fq_prime_frac(a: int, p: int, q_or_chi) -> PrimeFracEval:
    """Evaluate f_q(a/p) for an odd prime p = 3 (mod 4) not dividing q."""
    ch = _as_char(q_or_chi)
    q = ch.q
    if not is_prime(p) or p % 4 != 3:
        raise DomainError(f"p must be a prime = 3 (mod 4), got {p}")
    if p in ch.factors:
        raise DomainError(f"p = {p} divides the modulus {q}")
    if not (1 <= a and 2 * a < p):
        raise DomainError(f"need 0 < a < p/2, got a={a}, p={p}")
    r_pos = (a * q) % p
    r_neg = (-a * q) % p
    totals = [0, 0]
    for lo, arr in chi_sieve(ch, p * q):
        v = arr.astype(np.int64)
        m = len(v)
        for idx, r in enumerate((r_pos, r_neg)):
            start = (r - lo) % p
            if start >= m:
                continue
            sub = v[start::p]
            j = np.arange(start, m, p, dtype=np.int64)
            s0 = int(sub.sum())
            s1 = int((j * sub).sum())
            s2 = int((j * j * sub).sum())
            totals[idx] += lo * lo * s0 + 2 * lo * s1 + s2
    core = -jacobi(p, q) * (totals[0] - totals[1])
    stat = core // (p * q) if core % (p * q) == 0 else None
    q_div = stat is not None and stat % q == 0
    value = math.pi ** 2 * core / (2.0 * p * p * q * q * math.sqrt(q))
    return PrimeFracEval(a, p, q, core, stat, q_div,
                         len(ch.factors) == 1, value)


@dataclass(frozen=True)
class LatticeQuadEval:
    """f_q(a/q) = pi**2 * core / (2 q**2 sqrt(q)) from one quadratic sum."""

    q: int
    a: int
    core: int
    value: float


def _lattice_core(ch: QuadChar, c: np.ndarray, a: int) -> int:
    q = ch.q
    cc = np.arange(q, dtype=c.dtype)
    cc = cc * cc
    s = int(np.sum(cc * (np.roll(c, a) - np.roll(c, -a))))
    return q * q * int(c[a % q]) - s


# Above this modulus the q**3-sized intermediates in the int64 lattice paths
# could overflow; fall back to object dtype.
_LATTICE_INT64_MAX = 1_000_000


def fq_lattice_quad(q_or_chi, a: int) -> LatticeQuadEval:
    """Evaluate f_q(a/q) by the lattice sum

        core = q**2 chi(a) - sum_{c=1}^{q-1} c**2 (chi(c-a) - chi(c+a)).

    core always equals 4*q*W(a); the identity is checked in the tests and
    exposed through identity_check.
    """
    ch = _as_char(q_or_chi)
    q = ch.q
    if not 1 <= a < q:
        raise DomainError(f"need 1 <= a < q, got a={a}")
    if math.gcd(a, q) != 1:
        raise DomainError(f"a = {a} shares a factor with q = {q}")
    c = chi_values(ch, q - 1)
    if q > _LATTICE_INT64_MAX:
        c = c.astype(object)
    else:
        c = c.astype(np.int64)
    core = _lattice_core(ch, c, a)
    value = math.pi ** 2 * core / (2.0 * q * q * math.sqrt(q))
    return LatticeQuadEval(q, a, core, value)


def lattice_quad_values(q_or_chi, a_max: int) -> np.ndarray:
    """core values for a = 1..a_max at once, via two prefix-sum passes.

    The shifted quadratic sums telescope: with prefix sums P0, P1 of chi
    and m*chi over one period, each correction term is a linear combination
    of window sums, so the whole batch costs O(q + a_max).
    """
    ch = _as_char(q_or_chi)
    q = ch.q
    if not 1 <= a_max < q:
        raise DomainError(f"need 1 <= a_max < q, got {a_max}")
    if q > _LATTICE_INT64_MAX:
        c = chi_values(ch, q - 1).astype(object)
        return np.array([_lattice_core(ch, c, a) for a in range(1, a_max + 1)],
                        dtype=object)
    c = chi_values(ch, q - 1).astype(np.int64)
    m = np.arange(q, dtype=np.int64)
    p0 = np.cumsum(c)
    p1 = np.cumsum(m * c)
    s1 = int(p1[-1])
    a = np.arange(1, a_max + 1, dtype=np.int64)
    l0 = p0[-1] - p0[q - a - 1]
    l1 = p1[-1] - p1[q - a - 1]
    f0 = p0[a - 1]
    f1 = p1[a - 1]
    corr_hi = 2 * q * (l1 + a * l0) - q * q * l0
    corr_lo = 2 * q * (f1 - a * f0) + q * q * f0
    diff = 4 * a * s1 - corr_hi - corr_lo
    return q * q * c[1 : a_max + 1] - diff


def identity_check(q_or_chi, a: int | None = None) -> bool:
    """Confirm core(a) == 4*q*W(a), for one a or the whole half range."""
    ch = _as_char(q_or_chi)
    q = ch.q
    if a is not None:
        ev = fq_lattice_quad(ch, a)
        _, w = margin_values(ch, a)
        return ev.core == 4 * q * int(w[a])
    a_max = (q - 1) // 2
    cores = lattice_quad_values(ch, a_max)
    _, w = margin_values(ch, a_max)
    return all(int(cores[i]) == 4 * q * int(w[i + 1]) for i in range(a_max))


# Weight patterns for the auxiliary L-style tails: value at n depends on
# n mod len(pattern), with pattern[0] the weight at multiples of the period.
CHI3 = (0, 1, -1)
FIFTH_RE = (0, 1, 0, 0, -1)
FIFTH_IM = (0, 0, 1, -1, 0)


def l2_series(q_or_chi, pattern, n_terms: int) -> SeriesValue:
    """sum_{n<=N} chi(n) * pattern[n mod len] / n**2, tail below 1/N."""
    ch = _as_char(q_or_chi)
    n_terms = int(n_terms)
    if n_terms < 1:
        raise DomainError("need n_terms >= 1")
    pat = np.asarray(pattern, dtype=np.float64)
    n = np.arange(1, n_terms + 1, dtype=np.int64)
    w = pat[n % len(pat)]
    c = chi_values(ch, n_terms)[1:].astype(np.float64)
    nf = n.astype(np.float64)
    value = float(np.sum(c * w / (nf * nf)))
    return SeriesValue(value, 1.0 / n_terms, n_terms)


def fq_third(q_or_chi, n_terms: int = 10 ** 6) -> float:
    """f_q(1/3) = (sqrt(3)/2) * sum chi(n) chi_3(n) / n**2, truncated."""
    return math.sqrt(3) / 2 * l2_series(q_or_chi, CHI3, n_terms).value


def fq_fifth(q_or_chi, n_terms: int = 10 ** 6) -> float:
    """f_q(1/5) via the two real period-5 components of n -> sin(2 pi n/5)."""
    alpha = l2_series(q_or_chi, FIFTH_RE, n_terms).value
    beta = l2_series(q_or_chi, FIFTH_IM, n_terms).value
    return math.sin(2 * math.pi / 5) * alpha + math.sin(4 * math.pi / 5) * beta


def fifth_alpha_lower_bound() -> Fraction:
    """Certified lower bound for the alpha component at 1/5.

    The n = 1 term of alpha is exactly 1 and every other term is at least
    -1/n**2 with n >= 4, so alpha >= 1 - (pi**2/6 - 1 - 1/4 - 1/9)
    = 2 + 13/36 - pi**2/6 > 0.716 for every modulus.  Built with the upper
    rational pi bound, so the returned Fraction is a true lower bound.
    """
    return Fraction(2) + Fraction(13, 36) - PI2_HI / 6
