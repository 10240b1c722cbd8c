"""Number-theoretic primitives: Jacobi symbol, deterministic primality,
segmented prime enumeration, Liouville and quadratic-character sieves.

Everything that feeds a verdict is exact: Python integers, Fraction, or
numpy integer arrays whose worst-case magnitudes are checked before use.
Floats never enter this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, ExactnessError, InvalidModulus

# Streaming block size (entries, not bytes); keeps big sieves cache-resident.
BLOCK = 1 << 20

# Rational bounds PI_LO < pi < PI_HI, 37 correct digits.  Wide enough that
# none of the cross-multiplied certificate comparisons in this package can
# land inside the gap for any modulus below ~10**30.
PI_LO = Fraction(31415926535897932384626433832795028841, 10**37)
PI_HI = PI_LO + Fraction(1, 10**37)
PI2_LO = PI_LO * PI_LO
PI2_HI = PI_HI * PI_HI
PI4_LO = PI2_LO * PI2_LO
PI4_HI = PI2_HI * PI2_HI

# Deterministic Miller-Rabin witness set for all n < 2**64.
_MR_BASES = (2, 325, 9375, 28178, 450775, 9780504, 1795265022)


def jacobi(n: int, m: int) -> int:
    """Jacobi symbol (n|m) for odd positive m.

    n is reduced mod m first, so the result is the periodic extension of
    the symbol to all integers (this is the Dirichlet character attached
    to m, which is what every caller in this package wants).
    """
    if m <= 0 or m % 2 == 0:
        raise DomainError(f"jacobi modulus must be odd and positive, got {m}")
    n %= m
    r = 1
    while n:
        while n % 2 == 0:
            n //= 2
            if m % 8 in (3, 5):
                r = -r
        n, m = m, n
        if n % 4 == 3 and m % 4 == 3:
            r = -r
        n %= m
    return r if m == 1 else 0


def is_prime(n: int) -> bool:
    """Deterministic primality for 0 <= n < 2**64."""
    if n >= 1 << 64:
        raise DomainError("is_prime is deterministic only below 2**64")
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    for a in _MR_BASES:
        a %= n
        if a == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


_sp_limit = 0
_sp_primes = np.empty(0, dtype=np.int64)


def _small_primes(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array (grow-only module cache)."""
    global _sp_limit, _sp_primes
    if limit > _sp_limit:
        new_limit = max(limit, 2 * _sp_limit, 1 << 12)
        flags = np.ones(new_limit + 1, dtype=bool)
        flags[:2] = False
        for p in range(2, math.isqrt(new_limit) + 1):
            if flags[p]:
                flags[p * p :: p] = False
        _sp_primes = np.flatnonzero(flags).astype(np.int64)
        _sp_limit = new_limit
    if _sp_limit == limit:
        return _sp_primes
    return _sp_primes[: np.searchsorted(_sp_primes, limit, side="right")]


def primes_in_range(lo: int, hi: int, *, residue: int | None = None,
                    modulus: int | None = None) -> np.ndarray:
    """Primes p with lo <= p <= hi, ascending, optionally p = residue (mod modulus).

    Segmented, so memory stays bounded by BLOCK regardless of hi - lo.
    An empty or inverted range yields an empty array.
    """
    if (residue is None) != (modulus is None):
        raise DomainError("residue and modulus must be given together")
    if modulus is not None and not (0 <= residue < modulus):
        raise DomainError(f"need 0 <= residue < modulus, got {residue} mod {modulus}")
    lo = max(lo, 2)
    if hi < lo:
        return np.empty(0, dtype=np.int64)
    base = _small_primes(math.isqrt(hi))
    out = []
    for start in range(lo, hi + 1, BLOCK):
        stop = min(start + BLOCK, hi + 1)
        mask = np.ones(stop - start, dtype=bool)
        for p in base:
            p = int(p)
            first = max(p * p, (start + p - 1) // p * p)
            if first < stop:
                mask[first - start :: p] = False
        seg = start + np.flatnonzero(mask).astype(np.int64)
        if modulus is not None:
            seg = seg[seg % modulus == residue]
        out.append(seg)
    return np.concatenate(out)


@dataclass(frozen=True, eq=False)
class LiouvilleTable:
    """Liouville lambda(n) for 0 <= n <= limit; values[0] is 0 by convention."""

    limit: int
    values: np.ndarray

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.limit:
            raise DomainError(f"lambda({n}) outside sieved range 1..{self.limit}")
        return int(self.values[n])


def liouville_sieve(n: int) -> LiouvilleTable:
    """lambda(k) = (-1)**Omega(k) for k <= n.

    Each prime power pe <= n flips the sign of every multiple of pe, which
    counts multiplicity exactly.
    """
    if n < 1:
        raise DomainError("liouville_sieve needs n >= 1")
    lam = np.ones(n + 1, dtype=np.int8)
    lam[0] = 0
    for p in _small_primes(n):
        pe = int(p)
        while pe <= n:
            lam[pe::pe] *= -1
            if pe > n // int(p):
                break
            pe *= int(p)
    return LiouvilleTable(n, lam)


@dataclass(frozen=True)
class QuadChar:
    """The real character n -> (n|q) for a validated squarefree q = 3 (mod 4).

    For such q the Jacobi symbol is the odd primitive quadratic character
    of conductor q, so chi(-1) = -1 and chi has period q.
    """

    q: int
    factors: tuple[int, ...]

    def chi(self, n: int) -> int:
        return jacobi(n, self.q)

    __call__ = chi


def quad_char(q: int, *, assume_prime: bool = False) -> QuadChar:
    """Validate q and build its character.

    q = 3 is rejected: the class number formula used downstream needs q > 3.
    With assume_prime the caller vouches for primality (used by scans that
    already enumerated primes); validation of the residue class still runs.
    """
    q = int(q)
    if q <= 3:
        raise InvalidModulus(f"modulus must exceed 3, got {q}")
    if q % 4 != 3:
        raise InvalidModulus(f"modulus must be 3 (mod 4), got {q}")
    if assume_prime:
        return QuadChar(q, (q,))
    if is_prime(q):
        return QuadChar(q, (q,))
    factors = []
    m = q
    for p in _small_primes(math.isqrt(q)):
        p = int(p)
        if p * p > m:
            break
        if m % p == 0:
            m //= p
            if m % p == 0:
                raise InvalidModulus(f"{q} is not squarefree (divisible by {p}**2)")
            factors.append(p)
    if m > 1:
        factors.append(m)
    return QuadChar(q, tuple(factors))


def _qr_period(p: int) -> np.ndarray:
    """One period of the Legendre symbol mod an odd prime p, as int8."""
    t = np.full(p, -1, dtype=np.int8)
    t[0] = 0
    k = np.arange(1, (p - 1) // 2 + 1, dtype=np.int64)
    t[(k * k) % p] = 1
    return t

# A prime factor's period table is only built when it is not grossly larger
# than the range being sieved (and never above the hard cap); otherwise the
# multiplicative fallback sieve is used.
_PERIOD_CAP = 1 << 27


def chi_sieve(chi: QuadChar, n_max: int, block: int = BLOCK):
    """Yield (lo, values) covering chi(n) for n = 0..n_max in consecutive slabs.

    values is int8; chi(0) = 0 and chi(n) = 0 exactly when gcd(n, q) > 1.
    """
    if n_max < 0:
        raise DomainError("chi_sieve needs n_max >= 0")
    biggest = max(chi.factors)
    if biggest <= min(_PERIOD_CAP, max(2 * (n_max + 1), 1 << 21)):
        periods = [_qr_period(p) for p in chi.factors]
        for lo in range(0, n_max + 1, block):
            m = min(lo + block, n_max + 1) - lo
            arr = np.ones(m, dtype=np.int8)
            for p, per in zip(chi.factors, periods):
                arr *= np.resize(np.roll(per, -(lo % p)), m)
            yield lo, arr
    else:
        full = _chi_multiplicative(chi, n_max)
        for lo in range(0, n_max + 1, block):
            yield lo, full[lo : lo + block]


def _chi_multiplicative(chi: QuadChar, n_max: int) -> np.ndarray:
    """chi on 0..n_max by a completely multiplicative slice sieve.

    chi at primes comes from jacobi; prime powers p**k contribute
    chi(p)**k, done with one strided pass per power.  O(n_max) memory,
    used when a factor's period table would dwarf the requested range.
    """
    out = np.ones(n_max + 1, dtype=np.int8)
    out[0] = 0
    q = chi.q
    for p in _small_primes(n_max):
        p = int(p)
        v = jacobi(p, q)
        if v == 0:
            out[p::p] = 0
        elif v == -1:
            pe = p
            while pe <= n_max:
                out[pe::pe] *= -1
                if pe > n_max // p:
                    break
                pe *= p
    return out


def chi_values(chi: QuadChar, n_max: int) -> np.ndarray:
    """Dense int8 array of chi(n) for n = 0..n_max."""
    out = np.empty(n_max + 1, dtype=np.int8)
    for lo, arr in chi_sieve(chi, n_max):
        out[lo : lo + len(arr)] = arr
    return out


def pi4_times_at_least(c: Fraction, target: Fraction) -> bool:
    """Decide pi**4 * c >= target exactly for nonnegative rationals.

    Uses the rational bounds on pi; equality of pi**4 * c with a rational
    target is impossible for c > 0, so the only unresolvable case is a
    target strictly between the two bounds, which raises.
    """
    if c < 0:
        raise DomainError("pi4_times_at_least needs c >= 0")
    if PI4_LO * c >= target:
        return True
    if PI4_HI * c < target:
        return False
    raise ExactnessError(
        f"pi**4 * {c} vs {target} falls inside the rational pi bounds")


def sqrt_bounds(n: int, digits: int = 25) -> tuple[Fraction, Fraction]:
    """Rational lo <= sqrt(n) <= hi with the given number of decimal digits."""
    if n < 0:
        raise DomainError("sqrt_bounds needs n >= 0")
    scale = 10 ** digits
    s = math.isqrt(n * scale * scale)
    return Fraction(s, scale), Fraction(s + 1, scale)
