"""Positivity verification: whole-range margin scans with checkpointing,
machine-checkable certificates for lower bounds on the Liouville series,
and an independent certificate checker.

A certificate asserts f(x) > 0 on [a0/q, xmax] by listing the integer
margins W(a) at every node a/q spanning the interval and citing the
agreement length N of chi with the Liouville function.  Checking it needs
only the Jacobi symbol and rational arithmetic; no sieves, no floats.
"""

from __future__ import annotations

import json
import math
import multiprocessing
import os
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .charsum import _as_char, margin_values
from .errors import (CertificateError, DomainError, ExactnessError,
                     InsufficientBound)
from .fq import fq_prime_frac
from .liouville import agreement_length, find_imitator
from .ntcore import is_prime, jacobi, pi4_times_at_least, primes_in_range, quad_char

_HALF = Fraction(1, 2)

# Target sum of moduli per worker chunk; fixed so the chunk decomposition,
# and therefore every reported tie-break, is independent of the job count.
_CHUNK_WEIGHT = 1 << 26


@dataclass(frozen=True)
class PositivityReport:
    """Sign summary of the margin sequence of one modulus over 1..(q-1)/2."""

    q: int
    h: int
    holds: bool
    min_w: int
    argmin_a: int
    elapsed: float


def check_positivity(q_or_chi) -> PositivityReport:
    """Decide min W(a) >= 0 over the half range for one modulus, exactly."""
    ch = _as_char(q_or_chi)
    t0 = time.perf_counter()
    h, w = margin_values(ch, (ch.q - 1) // 2)
    body = w[1:]
    k = int(np.argmin(body))
    mn = int(body[k])
    return PositivityReport(ch.q, h, mn >= 0, mn, k + 1,
                            time.perf_counter() - t0)


@dataclass(frozen=True)
class ScanResult:
    """Aggregate of check_positivity over all prime moduli = 3 (mod 8) in range."""

    campaign: str
    q_min: int
    q_max: int
    count: int
    min_w: int | None
    argmin_q: int | None
    failures: tuple[tuple[int, int], ...]

    @property
    def holds(self) -> bool:
        return not self.failures

    def to_json(self) -> str:
        payload = {
            "version": "v1",
            "campaign": self.campaign,
            "q_min": self.q_min,
            "q_max": self.q_max,
            "count": self.count,
            "min_w": self.min_w,
            "argmin_q": self.argmin_q,
            "failures": [list(f) for f in self.failures],
            "holds": self.holds,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _scan_chunk(qs):
    """Worker: margin minima for a block of prime moduli (ascending)."""
    count = 0
    min_w = None
    argmin_q = None
    failures = []
    for q in qs:
        ch = quad_char(q, assume_prime=True)
        _, w = margin_values(ch, (q - 1) // 2)
        m = int(w[1:].min())
        count += 1
        if min_w is None or m < min_w:
            min_w = m
            argmin_q = q
        if m < 0:
            failures.append((q, m))
    return count, min_w, argmin_q, failures, qs[-1]


def _chunked(qs, weight: int = _CHUNK_WEIGHT):
    out = []
    cur = []
    acc = 0
    for q in qs:
        cur.append(int(q))
        acc += int(q)
        if acc >= weight:
            out.append(cur)
            cur = []
            acc = 0
    if cur:
        out.append(cur)
    return out


@dataclass(frozen=True)
class ScanCheckpoint:
    """Durable frontier of a scan: everything up to last_q is accounted for."""

    campaign: str
    last_q: int
    count: int
    min_w: int | None
    argmin_q: int | None
    failures: tuple[tuple[int, int], ...]


def read_checkpoint(path, campaign: str) -> ScanCheckpoint | None:
    """Latest checkpoint line for this campaign, or None.

    Lines that fail to parse (e.g. a torn final write) are skipped, so a
    truncated file degrades to an earlier frontier instead of an error.
    """
    if not os.path.exists(path):
        return None
    best = None
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            try:
                rec = json.loads(line)
            except ValueError:
                continue
            if not isinstance(rec, dict) or rec.get("campaign") != campaign:
                continue
            try:
                best = ScanCheckpoint(
                    campaign, int(rec["last_q"]), int(rec["count"]),
                    None if rec["min_w"] is None else int(rec["min_w"]),
                    None if rec["argmin_q"] is None else int(rec["argmin_q"]),
                    tuple((int(q), int(w)) for q, w in rec["failures"]))
            except (KeyError, TypeError, ValueError):
                continue
    return best


def _append_checkpoint(path, ck: ScanCheckpoint) -> None:
    payload = {
        "version": "v1",
        "campaign": ck.campaign,
        "last_q": ck.last_q,
        "count": ck.count,
        "min_w": ck.min_w,
        "argmin_q": ck.argmin_q,
        "failures": [list(f) for f in ck.failures],
    }
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(payload, sort_keys=True, separators=(",", ":")))
        fh.write("\n")
        fh.flush()


def scan_positivity(q_min: int, q_max: int, *, jobs: int = 1,
                    checkpoint_path=None,
                    checkpoint_every: int = 1 << 16) -> ScanResult:
    """Margin scan over every prime q = 3 (mod 8) with q_min <= q <= q_max.

    Deterministic for a fixed range regardless of jobs: the chunk layout
    depends only on the prime list, chunks are merged in order, and ties
    in the minimum keep the smallest modulus.  With a checkpoint path the
    scan appends a frontier line every checkpoint_every moduli and resumes
    from the latest matching line on restart.
    """
    if jobs < 1:
        raise DomainError("jobs must be >= 1")
    campaign = f"positivity:{q_min}:{q_max}"
    count = 0
    min_w = None
    argmin_q = None
    failures: list[tuple[int, int]] = []
    resume_after = None
    if checkpoint_path is not None:
        ck = read_checkpoint(checkpoint_path, campaign)
        if ck is not None:
            count = ck.count
            min_w = ck.min_w
            argmin_q = ck.argmin_q
            failures = list(ck.failures)
            resume_after = ck.last_q
    lo = max(q_min, 5)
    qs = primes_in_range(lo, q_max, residue=3, modulus=8)
    if resume_after is not None:
        qs = qs[qs > resume_after]
    chunks = _chunked(qs, _CHUNK_WEIGHT)

    def merge(part) -> int:
        nonlocal count, min_w, argmin_q
        c, mw, aq, fails, last = part
        count += c
        if mw is not None and (min_w is None or mw < min_w):
            min_w = mw
            argmin_q = aq
        failures.extend(fails)
        return last

    def consume(parts) -> None:
        since_ck = 0
        for chunk, part in zip(chunks, parts):
            last = merge(part)
            since_ck += len(chunk)
            if checkpoint_path is not None and since_ck >= checkpoint_every:
                _append_checkpoint(checkpoint_path, ScanCheckpoint(
                    campaign, last, count, min_w, argmin_q, tuple(failures)))
                since_ck = 0

    if jobs == 1 or len(chunks) <= 1:
        consume(map(_scan_chunk, chunks))
    else:
        with multiprocessing.get_context("fork").Pool(jobs) as pool:
            consume(pool.imap(_scan_chunk, chunks))
    if checkpoint_path is not None and len(qs):
        _append_checkpoint(checkpoint_path, ScanCheckpoint(
            campaign, int(qs[-1]), count, min_w, argmin_q, tuple(failures)))
    return ScanResult(campaign, q_min, q_max, count, min_w, argmin_q,
                      tuple(failures))


def _margin_ok(w: int, n_agree: int, q: int) -> bool:
    """Does 2*pi**2*W/q**(3/2) >= 2/N hold?  Equivalent to the rational
    test pi**4 * W**2 * N**2 >= q**3 once W > 0."""
    if w <= 0:
        return False
    return pi4_times_at_least(Fraction(w * w * n_agree * n_agree),
                              Fraction(q) ** 3)


@dataclass(frozen=True)
class CertifyResult:
    certificate: dict
    q: int
    h: int
    n_agree: int
    a0: int
    requested_xmax: Fraction
    achieved_xmax: Fraction
    truncated: bool


def certify_f_positive(eps, q: int | None = None, xmax=Fraction(1, 4), *,
                       search_ceiling: int = 10 ** 6,
                       target_agreement: int = 40) -> CertifyResult:
    """Build a certificate that f > 0 on [eps, xmax] (possibly truncated).

    With q given, that modulus is used; otherwise the smallest prime whose
    character imitates the Liouville function through target_agreement is
    searched for below search_ceiling.

    Every node a/q with floor(q*eps) <= a <= ceil(q*xmax) (capped at the
    half period) must clear the margin 2/N.  If the right-hand nodes fail,
    the certificate honestly shrinks to the passing prefix; if the nodes
    at eps itself fail, InsufficientBound is raised carrying the smallest
    certifiable left endpoint, when one exists.
    """
    eps = Fraction(eps)
    xmax = Fraction(xmax)
    if not 0 < eps < xmax <= _HALF:
        raise DomainError(f"need 0 < eps < xmax <= 1/2, got eps={eps}, xmax={xmax}")
    if q is None:
        q = find_imitator(target_agreement, search_ceiling)
    ch = _as_char(q)
    q = ch.q
    rec = agreement_length(ch)
    n = rec.n_agree
    half = (q - 1) // 2
    a_lo = math.floor(eps * q)
    a_hi = min(math.ceil(xmax * q), half)
    h, w = margin_values(ch, a_hi)
    ok = [_margin_ok(int(w[a]), n, q) for a in range(a_lo, a_hi + 1)]
    k = a_lo - 1
    while k + 1 <= a_hi and ok[k + 1 - a_lo]:
        k += 1
    if k < a_lo or Fraction(k, q) <= eps:
        last_bad = max(a for a in range(a_lo, a_hi + 1) if not ok[a - a_lo])
        best = None
        if last_bad < a_hi and Fraction(last_bad + 1, q) < xmax:
            best = Fraction(last_bad + 1, q)
        raise InsufficientBound(
            f"margin 2/{n} not met at node {max(k + 1, a_lo)}/{q}; "
            f"cannot certify down to eps={eps}", best_eps=best)
    full = k == a_hi and Fraction(a_hi, q) >= xmax
    achieved = xmax if full else Fraction(k, q)
    cert = {
        "version": "v1",
        "q": q,
        "h": h,
        "agreement_N": n,
        "a0": a_lo,
        "xmax_num": achieved.numerator,
        "xmax_den": achieved.denominator,
        "margins": [{"a": a, "W": int(w[a])} for a in range(a_lo, k + 1)],
        "verdict": "nonnegative",
    }
    return CertifyResult(cert, q, h, n, a_lo, xmax, achieved, not full)


_CERT_KEYS = {"version", "q", "h", "agreement_N", "a0", "xmax_num",
              "xmax_den", "margins", "verdict"}


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def verify_certificate(cert) -> tuple[bool, str]:
    """Independently check a positivity certificate.

    Recomputes the class number, the agreement length, and every cited
    margin from scratch with plain integer arithmetic (no sieves, no
    floats, no state shared with the builder), then checks the margin
    inequality and interval coverage.  Returns (ok, reason); never raises
    on malformed input.
    """
    if not isinstance(cert, dict):
        return False, "certificate is not a mapping"
    if set(cert) != _CERT_KEYS:
        missing = _CERT_KEYS - set(cert)
        extra = set(cert) - _CERT_KEYS
        return False, f"bad key set (missing {sorted(missing)}, extra {sorted(extra)})"
    if cert["version"] != "v1":
        return False, f"unsupported version {cert['version']!r}"
    if cert["verdict"] != "nonnegative":
        return False, f"unknown verdict {cert['verdict']!r}"
    q = cert["q"]
    if not _is_int(q) or q <= 3 or q % 4 != 3:
        return False, "modulus must be an integer > 3 and = 3 (mod 4)"
    d = 2
    while d * d <= q:
        if q % (d * d) == 0:
            return False, f"modulus divisible by {d}**2"
        d += 1
    for key in ("h", "agreement_N", "a0"):
        if not _is_int(cert[key]) or cert[key] < 1:
            return False, f"{key} must be a positive integer"
    if not _is_int(cert["xmax_num"]) or not _is_int(cert["xmax_den"]):
        return False, "xmax must be a pair of integers"
    if cert["xmax_den"] < 1 or cert["xmax_num"] < 1:
        return False, "xmax must be positive"
    xmax = Fraction(cert["xmax_num"], cert["xmax_den"])
    if xmax > _HALF:
        return False, f"xmax = {xmax} exceeds 1/2"
    margins = cert["margins"]
    if not isinstance(margins, list) or not margins:
        return False, "margins must be a nonempty list"
    a0 = cert["a0"]
    for i, row in enumerate(margins):
        if (not isinstance(row, dict) or set(row) != {"a", "W"}
                or not _is_int(row["a"]) or not _is_int(row["W"])):
            return False, f"margins[{i}] is not {{a, W}} with integers"
        if row["a"] != a0 + i:
            return False, f"margins[{i}].a = {row['a']} breaks contiguity from {a0}"
    a_last = margins[-1]["a"]
    half = (q - 1) // 2
    if a_last > half:
        return False, f"node {a_last} lies beyond the half period"

    n_cert = cert["agreement_N"]
    p = 2
    while True:
        if is_prime(p) and jacobi(p, q) != -1:
            break
        p += 1
    if p - 1 != n_cert:
        return False, f"agreement length is {p - 1}, certificate says {n_cert}"

    cited = {row["a"]: row["W"] for row in margins}
    a_sum = 0
    b_sum = 0
    snapshots = {}
    for m in range(1, half + 1):
        v = jacobi(m, q)
        a_sum += v
        b_sum += m * v
        if m in cited:
            snapshots[m] = (a_sum, b_sum)
    num = q * a_sum - 2 * b_sum
    if num % q:
        return False, "class number formula did not divide evenly"
    h = num // q
    if h != cert["h"]:
        return False, f"class number is {h}, certificate says {cert['h']}"
    q_cubed = Fraction(q) ** 3
    for a, w_cited in cited.items():
        a_a, b_a = snapshots[a]
        w_true = a * (h - a_a) + b_a
        if w_cited != w_true:
            return False, f"W({a}) is {w_true}, certificate says {w_cited}"
        if w_cited <= 0:
            return False, f"W({a}) = {w_cited} is not positive"
        try:
            big = pi4_times_at_least(
                Fraction(w_cited * w_cited * n_cert * n_cert), q_cubed)
        except ExactnessError:
            return False, f"margin at node {a} is undecidable at this precision"
        if not big:
            return False, f"W({a}) = {w_cited} does not clear the 2/{n_cert} margin"
    if a_last * cert["xmax_den"] < q * cert["xmax_num"]:
        return False, (f"nodes end at {a_last}/{q}, short of xmax = {xmax}")
    return True, "ok"


def merge_certificates(left: dict, right: dict) -> dict:
    """Join two certificates for the same modulus into one wider one.

    Both inputs must verify, share q/h/N, and their node ranges must be
    contiguous or overlapping (with identical margins on the overlap).
    The result covers [min a0 / q, max xmax] and verifies by construction.
    """
    for name, cert in (("left", left), ("right", right)):
        ok, why = verify_certificate(cert)
        if not ok:
            raise CertificateError(f"{name} certificate invalid: {why}")
    if left["a0"] > right["a0"]:
        left, right = right, left
    for key in ("q", "h", "agreement_N"):
        if left[key] != right[key]:
            raise CertificateError(f"certificates disagree on {key}")
    left_last = left["margins"][-1]["a"]
    if right["a0"] > left_last + 1:
        raise CertificateError(
            f"gap between nodes {left_last} and {right['a0']}")
    by_a = {row["a"]: row["W"] for row in left["margins"]}
    for row in right["margins"]:
        if row["a"] in by_a and by_a[row["a"]] != row["W"]:
            raise CertificateError(f"margin mismatch at node {row['a']}")
        by_a[row["a"]] = row["W"]
    xl = Fraction(left["xmax_num"], left["xmax_den"])
    xr = Fraction(right["xmax_num"], right["xmax_den"])
    xmax = max(xl, xr)
    merged = {
        "version": "v1",
        "q": left["q"],
        "h": left["h"],
        "agreement_N": left["agreement_N"],
        "a0": left["a0"],
        "xmax_num": xmax.numerator,
        "xmax_den": xmax.denominator,
        "margins": [{"a": a, "W": by_a[a]} for a in sorted(by_a)],
        "verdict": "nonnegative",
    }
    ok, why = verify_certificate(merged)
    if not ok:
        raise CertificateError(f"merged certificate does not verify: {why}")
    return merged


@dataclass(frozen=True)
class PrimeFracScan:
    """Exhaustive f_q(a/p) sign census over small primes p and moduli q."""

    p_max: int
    q_max: int
    q_mod8: int
    count: int
    nonpositive: tuple[tuple[int, int, int, int], ...]
    nonintegral: tuple[tuple[int, int, int, int], ...]
    q_divisible: int
    min_stat: int | None
    argmin: tuple[int, int, int] | None


def scan_prime_fracs(p_max: int, q_max: int, a_max: int | None = None,
                     q_mod8: int = 3) -> PrimeFracScan:
    """Evaluate f_q(a/p) for all p < q <= q_max, p <= p_max, 0 < a < p/2.

    q runs over primes = q_mod8 (mod 8), p over primes = 3 (mod 4) below q.
    Records any nonpositive core, any core not divisible by p*q, how often
    the reduced value is divisible by q, and the minimum reduced value.
    """
    if q_mod8 % 4 != 3:
        raise DomainError("q_mod8 must be 3 or 7")
    count = 0
    nonpos = []
    nonint = []
    qdiv = 0
    min_stat = None
    argmin = None
    for q in primes_in_range(5, q_max, residue=q_mod8, modulus=8):
        q = int(q)
        ch = quad_char(q, assume_prime=True)
        for p in primes_in_range(3, min(p_max, q - 1), residue=3, modulus=4):
            p = int(p)
            top = (p - 1) // 2 if a_max is None else min(a_max, (p - 1) // 2)
            for a in range(1, top + 1):
                ev = fq_prime_frac(a, p, ch)
                count += 1
                if ev.core <= 0:
                    nonpos.append((a, p, q, ev.core))
                if ev.stat is None:
                    nonint.append((a, p, q, ev.core))
                else:
                    if ev.q_divides:
                        qdiv += 1
                    if min_stat is None or ev.stat < min_stat:
                        min_stat = ev.stat
                        argmin = (a, p, q)
    return PrimeFracScan(p_max, q_max, q_mod8, count, tuple(nonpos),
                         tuple(nonint), qdiv, min_stat, argmin)
