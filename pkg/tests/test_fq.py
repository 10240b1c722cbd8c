import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from charpos import charsum, errors, fq, ntcore

MODULI = [7, 11, 19, 23, 43, 163, 35]


def series_oracle(q, x, n_terms):
    """f_q by the naive formula, floats all the way."""
    x = float(x)
    total = 0.0
    for n in range(1, n_terms + 1):
        total += ntcore.jacobi(n, q) * math.sin(2 * math.pi * n * x) / n ** 2
    return total


class TestFqSeries:
    def test_matches_naive_sum(self):
        sv = fq.fq_series(163, Fraction(7, 163), 300)
        assert sv.value == pytest.approx(series_oracle(163, Fraction(7, 163), 300),
                                         abs=1e-9)
        assert sv.tail_bound == 1.0 / 300
        assert sv.terms == 300

    def test_half_and_integers_are_exactly_zero(self):
        for x in (0, 1, Fraction(1, 2), Fraction(3, 2), -2):
            assert fq.fq_series(163, x, 1000).value == 0.0, x

    def test_needs_positive_terms(self):
        with pytest.raises(errors.DomainError):
            fq.fq_series(163, Fraction(1, 3), 0)

    def test_huge_denominator_reduction(self):
        # exercises the pure-integer argument reduction fallback
        x = Fraction((1 << 55) + 1, (1 << 60) + 7)
        sv = fq.fq_series(11, x, 128)
        direct = 0.0
        for n in range(1, 129):
            r = (n * x.numerator) % x.denominator
            direct += (ntcore.jacobi(n, 11)
                       * math.sin(2 * math.pi * (r / x.denominator)) / n ** 2)
        assert sv.value == pytest.approx(direct, abs=1e-12)

    @pytest.mark.parametrize("q", [11, 19, 43])
    def test_grid_stays_positive_for_small_class_number_one(self, q):
        # 10q equispaced points in (0, 1/2); positivity of the margins
        # means even the truncated series should clear zero by more than
        # its own tail.
        n_terms = 2000
        ch = ntcore.quad_char(q)
        worst = min(fq.fq_series(ch, Fraction(k, 20 * q), n_terms).value
                    for k in range(1, 10 * q))
        assert worst > 1.0 / n_terms


class TestFqExact:
    def test_known_point(self):
        ev = fq.fq_exact(163, Fraction(7, 163))
        assert ev.coeff == Fraction(8, 163)
        assert ev.value == pytest.approx(0.0759, abs=2e-4)

    def test_nodes_reproduce_margins(self):
        q = 19
        h, w = charsum.margin_values(q, 9)
        for a in range(1, 10):
            ev = fq.fq_exact(q, Fraction(a, q))
            assert ev.coeff == Fraction(int(w[a]), q), a

    def test_zero_at_half_and_integers(self):
        for q in (11, 163):
            assert fq.fq_exact(q, Fraction(1, 2)).coeff == 0
            assert fq.fq_exact(q, 0).coeff == 0
            assert fq.fq_exact(q, 5).coeff == 0

    @given(st.fractions(Fraction(1, 200), Fraction(99, 200)))
    def test_odd_and_periodic(self, x):
        ch = ntcore.quad_char(43)
        base = fq.fq_exact(ch, x).coeff
        assert fq.fq_exact(ch, x + 1).coeff == base
        assert fq.fq_exact(ch, 1 - x).coeff == -base
        assert fq.fq_exact(ch, -x).coeff == -base

    @pytest.mark.parametrize("q", MODULI)
    def test_series_converges_to_exact(self, q):
        rng = random.Random(q)
        ch = ntcore.quad_char(q)
        for _ in range(12):
            den = rng.randint(2, 500)
            num = rng.randint(1, den - 1)
            x = Fraction(num, den)
            n_terms = rng.choice([300, 1000, 5000])
            sv = fq.fq_series(ch, x, n_terms)
            ex = fq.fq_exact(ch, x)
            assert abs(sv.value - ex.value) <= sv.tail_bound + 1e-9, (q, x)


class TestPiecewise:
    def test_coeff_matches_exact_everywhere(self):
        ch = ntcore.quad_char(163)
        pw = fq.piecewise_fq(ch)
        rng = random.Random(163)
        for _ in range(50):
            den = rng.randint(2, 999)
            num = rng.randint(1, den // 2)
            x = Fraction(num, den)
            if x > Fraction(82, 163):
                continue
            assert pw.coeff_at(x) == fq.fq_exact(ch, x).coeff, x

    def test_continuity_at_nodes(self):
        ch = ntcore.quad_char(43)
        pw = fq.piecewise_fq(ch)
        q = 43
        for a in range(pw.a_max):
            left = Fraction(a + 1, q) * int(pw.slopes[a]) \
                + Fraction(int(pw.intercepts[a]), q)
            assert left == Fraction(int(pw.margins[a + 1]), q), a

    def test_out_of_range_rejected(self):
        pw = fq.piecewise_fq(ntcore.quad_char(11))
        with pytest.raises(errors.DomainError):
            pw.coeff_at(Fraction(3, 4))


class TestShapes:
    def test_163_has_no_zeros(self):
        sh = fq.fq_min_and_zeros(ntcore.quad_char(163))
        assert sh.zeros == ()
        assert sh.flats == ()
        assert (sh.min_w, sh.argmin_a) == (1, 1)
        assert sh.min_coeff == Fraction(1, 163)
        assert sh.argmin_x == Fraction(1, 163)

    def test_7_touches_zero_then_flats(self):
        sh = fq.fq_min_and_zeros(ntcore.quad_char(7))
        assert sh.zeros == (Fraction(3, 7),)
        assert sh.flats == ((Fraction(3, 7), Fraction(1, 2)),)
        assert sh.min_w == 0

    def test_23_touches_zero_then_flats(self):
        sh = fq.fq_min_and_zeros(ntcore.quad_char(23))
        assert sh.zeros == (Fraction(11, 23),)
        assert sh.flats == ((Fraction(11, 23), Fraction(1, 2)),)

    def test_11_min_profile(self):
        sh = fq.fq_min_and_zeros(ntcore.quad_char(11))
        assert (sh.min_w, sh.argmin_a) == (1, 1)
        assert sh.zeros == ()

    def test_2647_crosses_zero(self):
        sh = fq.fq_min_and_zeros(ntcore.quad_char(2647))
        assert sh.min_w == -171
        assert sh.zeros
        for z in sh.zeros:
            # every reported zero is a true zero of the exact evaluator
            assert fq.fq_exact(2647, z).coeff == 0, z
            assert 0 < z < Fraction(1, 2)

    def test_interior_zeros_lie_between_sign_changes(self):
        sh = fq.fq_min_and_zeros(ntcore.quad_char(2647))
        interior = [z for z in sh.zeros if z.denominator != 2647]
        assert interior, "expected at least one interior crossing"


class TestPrimeFrac:
    @pytest.mark.parametrize("a,p,q,stat", [
        (1, 719, 2971, 130724),
        (1, 919, 3271, 340184),
    ])
    def test_frozen_exemplars(self, a, p, q, stat):
        ev = fq.fq_prime_frac(a, p, ntcore.quad_char(q))
        assert ev.stat == stat
        assert ev.core == stat * p * q
        assert ev.q_divides is (stat % q == 0)

    def test_small_products_match_series(self):
        rng = random.Random(5)
        qs = [int(v) for v in
              ntcore.primes_in_range(7, 200, residue=3, modulus=8)]
        for _ in range(8):
            q = rng.choice(qs)
            ps = [int(v) for v in
                  ntcore.primes_in_range(3, q - 1, residue=3, modulus=4)]
            p = rng.choice(ps)
            a = rng.randint(1, (p - 1) // 2)
            ev = fq.fq_prime_frac(a, p, ntcore.quad_char(q))
            sv = fq.fq_series(q, Fraction(a, p), 50_000)
            assert abs(ev.value - sv.value) <= sv.tail_bound + 1e-9, (a, p, q)

    def test_small_multiplier_closed_form(self):
        # for a*q < p the reduced value collapses to 4*a*h*q
        cases = [(1, 23, 11), (1, 31, 19), (2, 43, 19), (1, 59, 43),
                 (3, 139, 43), (1, 179, 163)]
        for a, p, q in cases:
            ev = fq.fq_prime_frac(a, p, ntcore.quad_char(q))
            h = charsum.class_number(q).h
            assert ev.stat == 4 * a * h * q, (a, p, q)

    def test_domain_checks(self):
        ch = ntcore.quad_char(163)
        with pytest.raises(errors.DomainError):
            fq.fq_prime_frac(1, 5, ch)          # p = 1 (mod 4)
        with pytest.raises(errors.DomainError):
            fq.fq_prime_frac(1, 9, ch)          # not prime
        with pytest.raises(errors.DomainError):
            fq.fq_prime_frac(2, 3, ch)          # 2a >= p
        with pytest.raises(errors.DomainError):
            fq.fq_prime_frac(1, 7, ntcore.quad_char(91))   # p | q

    def test_modulus_prime_flag(self):
        assert fq.fq_prime_frac(1, 23, ntcore.quad_char(11)).modulus_prime
        assert not fq.fq_prime_frac(1, 23, ntcore.quad_char(35)).modulus_prime


class TestLatticeQuad:
    def test_frozen_first_value(self):
        ev = fq.fq_lattice_quad(ntcore.quad_char(11), 1)
        assert ev.core == 44

    @pytest.mark.parametrize("q", [11, 19, 43, 163, 35, 15, 51, 91])
    def test_identity_full_half_range(self, q):
        assert fq.identity_check(ntcore.quad_char(q)) is True

    def test_identity_single_nodes(self):
        ch = ntcore.quad_char(163)
        for a in (1, 2, 40, 81, 100, 162):
            assert fq.identity_check(ch, a) is True, a

    def test_noncoprime_batch_values(self):
        # the identity core = 4qW holds even off the coprime set
        ch = ntcore.quad_char(35)
        cores = fq.lattice_quad_values(ch, 17)
        _, w = charsum.margin_values(ch, 17)
        for a, want in [(5, 840), (7, 980), (10, 1540), (14, 1260), (15, 980)]:
            assert int(cores[a - 1]) == want, a
            assert int(cores[a - 1]) == 4 * 35 * int(w[a]), a

    def test_noncoprime_single_rejected(self):
        with pytest.raises(errors.DomainError):
            fq.fq_lattice_quad(ntcore.quad_char(35), 5)
        with pytest.raises(errors.DomainError):
            fq.fq_lattice_quad(ntcore.quad_char(35), 0)

    def test_batch_matches_single_rolls(self):
        ch = ntcore.quad_char(163)
        cores = fq.lattice_quad_values(ch, 81)
        c = ntcore.chi_values(ch, 162).astype(np.int64)
        for a in (1, 7, 40, 81):
            assert int(cores[a - 1]) == fq._lattice_core(ch, c, a), a

    def test_value_matches_exact(self):
        ev = fq.fq_lattice_quad(ntcore.quad_char(163), 7)
        ex = fq.fq_exact(163, Fraction(7, 163))
        assert ev.value == pytest.approx(ex.value, rel=1e-12)


class TestPatternSeries:
    def test_third_matches_exact(self):
        for q in (11, 19, 163):
            approx = fq.fq_third(q, 10 ** 5)
            exact = fq.fq_exact(q, Fraction(1, 3)).value
            assert approx == pytest.approx(exact, abs=1e-4), q

    def test_fifth_matches_exact(self):
        for q in (11, 19, 163):
            approx = fq.fq_fifth(q, 10 ** 5)
            exact = fq.fq_exact(q, Fraction(1, 5)).value
            assert approx == pytest.approx(exact, abs=1e-4), q

    def test_fifth_frozen_values(self):
        want = {11: 0.6493, 19: 0.8580, 43: 0.8261, 163: 0.8176,
                2647: 1.0681}
        for q, v in want.items():
            assert fq.fq_fifth(q, 10 ** 5) == pytest.approx(v, abs=5e-3), q

    def test_pattern_sum_is_weighted_l2(self):
        sv = fq.l2_series(163, fq.CHI3, 500)
        direct = sum(ntcore.jacobi(n, 163) * fq.CHI3[n % 3] / n ** 2
                     for n in range(1, 501))
        assert sv.value == pytest.approx(direct, abs=1e-12)
        assert sv.tail_bound == 1 / 500

    def test_alpha_lower_bound_value(self):
        lb = fq.fifth_alpha_lower_bound()
        assert Fraction(716, 1000) < lb < Fraction(717, 1000)
        # certified: below the true alpha for every q tried
        for q in (11, 19, 43, 163, 2647):
            alpha = fq.l2_series(q, fq.FIFTH_RE, 10 ** 5).value
            assert alpha > float(lb) - 1e-5, q
