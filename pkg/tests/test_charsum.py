import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from charpos import charsum, errors, ntcore
from oracles import form_count

SQUAREFREE_3MOD4 = [q for q in range(7, 600, 4)
                    if all(q % (p * p) for p in range(2, 25))]


def direct_sums(q, upto):
    a = b = 0
    for n in range(1, upto + 1):
        v = ntcore.jacobi(n, q)
        a += v
        b += n * v
    return a, b


class TestPrefixSums:
    @pytest.mark.parametrize("q", [11, 19, 35, 163])
    def test_matches_direct(self, q):
        for upto in (0, 1, 7, q // 2, q, 2 * q + 3):
            ps = charsum.prefix_sums(q, upto)
            a, b = direct_sums(q, upto)
            assert (ps.plain, ps.linear) == (a, b), (q, upto)
            assert ps.square is None

    def test_square_sums(self):
        ps = charsum.prefix_sums(11, 30, squares=True)
        want = sum(n * n * ntcore.jacobi(n, 11) for n in range(31))
        assert ps.square == want

    def test_negative_upto_rejected(self):
        with pytest.raises(errors.DomainError):
            charsum.prefix_sums(11, -1)

    @given(st.sampled_from([11, 19, 43, 163]), st.integers(1, 400))
    def test_advance_by_one_step(self, q, n):
        prev = charsum.prefix_sums(q, n - 1)
        cur = charsum.prefix_sums(q, n)
        v = ntcore.jacobi(n, q)
        assert cur.plain - prev.plain == v
        assert cur.linear - prev.linear == n * v


class TestClassNumber:
    @pytest.mark.parametrize("q,h", [
        (7, 1), (11, 1), (19, 1), (23, 3), (43, 1), (67, 1), (163, 1),
        (2647, 15), (15, 2), (35, 2), (51, 2), (91, 2), (115, 2),
    ])
    def test_known_values(self, q, h):
        cn = charsum.class_number(q)
        assert cn.h == h

    def test_form_oracle_small_range(self):
        for q in SQUAREFREE_3MOD4:
            assert charsum.class_number(q).h == form_count(q), q

    def test_invariants_q11(self):
        cn = charsum.class_number(11)
        assert (cn.a_half, cn.b_half) == (3, 11)
        assert cn.q * cn.a_half - 2 * cn.b_half == cn.q * cn.h
        assert (2 - ntcore.jacobi(2, 11)) * cn.h == cn.a_half

    def test_chi2_relation_everywhere(self):
        for q in SQUAREFREE_3MOD4[:40]:
            cn = charsum.class_number(q)
            assert (2 - ntcore.jacobi(2, q)) * cn.h == cn.a_half, q

    def test_prime_class_numbers_are_odd(self):
        for q in SQUAREFREE_3MOD4:
            if ntcore.is_prime(q):
                assert charsum.class_number(q).h % 2 == 1, q

    def test_accepts_char_argument(self):
        ch = ntcore.quad_char(163)
        assert charsum.class_number(ch).h == 1

    def test_invalid_modulus_propagates(self):
        with pytest.raises(errors.InvalidModulus):
            charsum.class_number(3)


class TestMargins:
    def test_w_163_prefix(self):
        h, w = charsum.margin_values(163, 10)
        assert h == 1
        assert list(w[:11]) == [0, 1, 1, 2, 4, 5, 7, 8, 10, 13, 15]

    def test_w_163_at_41(self):
        _, w = charsum.margin_values(163, 41)
        assert int(w[41]) == 117

    @pytest.mark.parametrize("q,want", [
        (11, [1, 1, 2, 2, 1]),
        (19, [1, 1, 2, 4, 5, 5, 4, 2, 1]),
        (7, [1, 1, 0]),
        (23, [3, 5, 6, 6, 5, 5, 4, 4, 3, 1, 0]),
    ])
    def test_half_range_tables(self, q, want):
        h, w = charsum.margin_values(q, (q - 1) // 2)
        assert list(w[1:]) == want

    def test_matches_definition(self):
        q = 43
        h, w = charsum.margin_values(q, 21)
        a_run = b_run = 0
        for a in range(1, 22):
            v = ntcore.jacobi(a, q)
            a_run += v
            b_run += a * v
            assert int(w[a]) == a * (h - a_run) + b_run, a

    def test_profile_163(self):
        prof = charsum.margin_profile(163)
        assert prof == charsum.MarginProfile(163, 1, 81, 1, 1)

    def test_profile_19(self):
        prof = charsum.margin_profile(19)
        assert (prof.min_w, prof.argmin_a) == (1, 1)

    def test_quarter_margin_2647(self):
        prof = charsum.quarter_margin(ntcore.quad_char(2647))
        assert (prof.min_w, prof.argmin_a) == (15, 1)
        assert prof.a_max == 2647 // 4

    def test_beyond_quarter_2647_goes_negative(self):
        prof = charsum.margin_profile(2647)
        assert (prof.min_w, prof.argmin_a) == (-171, 1185)

    def test_object_path_matches_int64_path(self, monkeypatch):
        h1, w1 = charsum.margin_values(163, 81)
        monkeypatch.setattr(charsum, "_INT64_GUARD", 1)
        h2, w2 = charsum.margin_values(163, 81)
        assert w2.dtype == object
        assert h1 == h2
        assert [int(v) for v in w1] == [int(v) for v in w2]

    def test_profile_on_object_path(self, monkeypatch):
        monkeypatch.setattr(charsum, "_INT64_GUARD", 1)
        prof = charsum.margin_profile(163)
        assert (prof.min_w, prof.argmin_a) == (1, 1)

    def test_a_max_zero_rejected(self):
        with pytest.raises(errors.DomainError):
            charsum.margin_values(163, 0)


class TestWeightedPrefixSum:
    def test_below_one_is_zero(self):
        assert charsum.weighted_prefix_sum(11, Fraction(1, 2)) == 0
        assert charsum.weighted_prefix_sum(11, Fraction(99, 100)) == 0

    def test_at_one(self):
        assert charsum.weighted_prefix_sum(11, 1) == 0

    def test_frozen_example(self):
        assert charsum.weighted_prefix_sum(11, Fraction(11, 2)) == 1

    def test_nonpositive_rejected(self):
        with pytest.raises(errors.DomainError):
            charsum.weighted_prefix_sum(11, 0)

    @given(st.sampled_from([11, 19, 163]), st.fractions(1, 60))
    def test_matches_direct_formula(self, q, t):
        got = charsum.weighted_prefix_sum(q, t)
        m = math.floor(t)
        a, b = direct_sums(q, m)
        assert got == a - Fraction(b) / t


class TestRationalMargin:
    @pytest.mark.parametrize("q,x,val,flag", [
        (19, Fraction(25, 76), Fraction(19, 25), True),
        (19, Fraction(29, 190), Fraction(19, 29), True),
        (19, Fraction(30, 209), Fraction(19, 30), True),
        (11, Fraction(5, 22), Fraction(3, 5), False),
    ])
    def test_frozen_values(self, q, x, val, flag):
        got, got_flag = charsum.rational_margin(q, x)
        assert got == val
        assert got_flag is flag

    def test_domain(self):
        with pytest.raises(errors.DomainError):
            charsum.rational_margin(11, Fraction(1, 2))
        with pytest.raises(errors.DomainError):
            charsum.rational_margin(11, 0)

    @pytest.mark.parametrize("q", [11, 19, 91, 163])
    def test_lattice_consistency(self, q):
        # At grid points a/q the margin times a collapses to the integer W(a).
        ch = ntcore.quad_char(q)
        half = (q - 1) // 2
        _, w = charsum.margin_values(ch, half)
        for a in range(1, half + 1):
            val, _ = charsum.rational_margin(ch, Fraction(a, q))
            assert val * a == w[a]

    def test_no_flag_at_small_denominators(self):
        # q <= 1000, x = a/r in lowest terms with r <= 50: the numerator of
        # h - S(qx) is never divisible by q on this whole window.  Prefix
        # sums are precomputed per q so the sweep stays fast; one point per
        # q is cross-checked against the public API.
        for q in ntcore.primes_in_range(5, 1000, residue=3, modulus=8):
            q = int(q)
            ch = ntcore.quad_char(q)
            h = charsum.class_number(ch).h
            vals = ntcore.chi_values(ch, q // 2 + 1).astype(np.int64)
            idx = np.arange(q // 2 + 2, dtype=np.int64)
            a_run = np.cumsum(vals)
            b_run = np.cumsum(idx * vals)
            checked_api = False
            for r in range(2, 51):
                for a in range(1, (r - 1) // 2 + 1):
                    if math.gcd(a, r) != 1:
                        continue
                    t = Fraction(q * a, r)
                    m = math.floor(t)
                    s = int(a_run[m]) - Fraction(int(b_run[m])) / t
                    val = h - s
                    assert val.numerator % q != 0, (q, a, r)
                    if not checked_api:
                        api_val, api_flag = charsum.rational_margin(
                            ch, Fraction(a, r))
                        assert api_val == val and api_flag is False
                        checked_api = True


class TestTStat:
    def test_first_ten(self):
        want = {7: 1, 23: 5, 31: 10, 47: 14, 71: 29, 79: 42, 103: 57,
                127: 80, 151: 111, 167: 91}
        for q, t in want.items():
            assert charsum.t_stat(q) == t, q

    def test_domain(self):
        with pytest.raises(errors.DomainError):
            charsum.t_stat(11)
        with pytest.raises(errors.DomainError):
            charsum.t_stat(15)


class TestSoftBounds:
    def test_polya_vinogradov(self):
        for q in (163, 1019, 2647):
            vals = ntcore.chi_values(ntcore.quad_char(q), 2 * q)
            running = np.cumsum(vals.astype(np.int64))
            bound = 2 * math.sqrt(q) * math.log(q)
            assert int(np.abs(running).max()) < bound, q

    def test_l_one(self):
        exact, approx = charsum.l_one(163)
        assert exact == 1
        assert approx == pytest.approx(math.pi / math.sqrt(163))
