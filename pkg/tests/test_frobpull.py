from fractions import Fraction

from hypellcoleman import Curve
from hypellcoleman.frobpull import frob_terms
from tests.conftest import random_curve


def binom_half(k):
    num = Fraction(1)
    for i in range(k):
        num *= Fraction(-1, 2) - i
        num /= i + 1
    return num


def test_single_term_at_n1(rng):
    for _ in range(10):
        g = rng.choice([1, 2, 3])
        curve = random_curve(rng, 11 if g < 3 else 13, 1, g)
        ft = frob_terms(curve)
        assert len(ft.B) == 1 and len(ft.B[0]) == 1
        assert ft.B[0][0] == curve.ctx.p
        assert ft.term_count() == 1


def test_n2_values_against_rational_oracle(rng):
    curve = random_curve(rng, 13, 2, 1)
    ctx = curve.ctx
    ft = frob_terms(curve)
    # B[0][0] = p*(binom(-1/2,0) - binom(-1/2,1)) = p*3/2
    assert ft.B[0][0] == ctx.p * ctx.reduce(Fraction(3, 2)) % ctx.modulus
    # B[1][r] = -p*C_{1,r}/2
    half = ctx.reduce(Fraction(-1, 2))
    for r in range(4):
        want = ctx.p * half % ctx.modulus * (curve.Q[r] if r < len(curve.Q) else 0) % ctx.modulus
        assert ft.B[1][r] == want


def test_term_count_and_valuation(rng):
    for _ in range(6):
        g = rng.choice([1, 2])
        N = rng.choice([1, 2, 3])
        p = rng.choice([37, 101])
        curve = random_curve(rng, p, N, g)
        ft = frob_terms(curve)
        assert ft.term_count() == (2 * g + 1) * N * (N - 1) // 2 + N
        for row in ft.B:
            for v in row:
                assert v % p == 0  # leading factor p


def test_exponent_congruences(rng):
    curve = random_curve(rng, 11, 3, 2)
    p = 11
    g = curve.g
    for j in range(3):
        t = (p * (2 * j + 1) - 1) // 2
        y_exp = -p * (2 * j + 1) + 1
        assert y_exp == -2 * t          # the term sits in row t via y^-2t
        assert y_exp % p == 1           # y-exponents are 1 mod p
        for i in range(2 * g):
            for r in range((2 * g + 1) * j + 1):
                s = p * (i + r + 1) - 1
                assert s % p == p - 1   # x-exponents are -1 mod p
