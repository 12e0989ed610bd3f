import random
from fractions import Fraction

import pytest

from hypellcoleman.padic import PrimeContext
from hypellcoleman.recprod import (
    NonUnitDenominator,
    RecProdConfig,
    count_operations,
    interval_product_naive,
    interval_products,
    interval_products_fast,
    shift_evaluations,
    validate_intervals,
)
from hypellcoleman.redmat import BlockLinMat, BlockMatVal, LinMat


def rand_block_gen(rng, ctx, m, n):
    mod = ctx.modulus
    A = LinMat([[rng.randrange(mod) for _ in range(m)] for _ in range(m)],
               [[rng.randrange(mod) for _ in range(m)] for _ in range(m)])
    B = LinMat([[rng.randrange(mod) for _ in range(m)] for _ in range(n)],
               [[rng.randrange(mod) for _ in range(m)] for _ in range(n)])
    diag = [(rng.randrange(mod), rng.randrange(mod)) for _ in range(n)]
    denom = (rng.randrange(1, mod), rng.randrange(mod))
    return BlockLinMat(m, n, A, B, diag, denom)


def products_equal(a, b):
    (ma, da), (mb, db) = a, b
    return ma.A == mb.A and ma.B == mb.B and ma.diag == mb.diag and da == db


def test_naive_identity_and_single(rng):
    ctx = PrimeContext(101, 2)
    gen = rand_block_gen(rng, ctx, 3, 1)
    mat, den = interval_product_naive(gen, 5, 5, ctx)
    ident = BlockMatVal.identity(3, 1)
    assert mat.A == ident.A and mat.B == ident.B and mat.diag == ident.diag and den == 1
    mat1, den1 = interval_product_naive(gen, 4, 5, ctx)
    direct = gen.at(5, ctx.modulus)
    assert mat1.A == direct.A and mat1.B == direct.B and mat1.diag == direct.diag
    assert den1 == gen.denom_at(5, ctx.modulus)


def test_naive_is_a_fold(rng):
    ctx = PrimeContext(1009, 1)
    mod = ctx.modulus
    gen = rand_block_gen(rng, ctx, 3, 0)
    mat, _ = interval_product_naive(gen, 0, 10, ctx)
    acc = BlockMatVal.identity(3, 0)
    for s in range(1, 11):
        acc = acc.mul(gen.at(s, mod), mod)
    assert mat.A == acc.A


def test_shift_evaluations_examples():
    ctx = PrimeContext(101, 1)
    # constants
    assert shift_evaluations([5], 17, ctx) == [5]
    # scalar f(x) = x from values (0, 1), shift 2 -> (2, 3)
    assert shift_evaluations([0, 1], 2, ctx) == [2, 3]
    # degree-2 polynomial: values at 0,1,2, shift 5 matches Horner evaluation
    f = lambda x: (3 * x * x + 7 * x + 9) % ctx.modulus
    got = shift_evaluations([f(0), f(1), f(2)], 5, ctx)
    assert got == [f(5), f(6), f(7)]


def test_shift_evaluations_matrices_and_roundtrip(rng):
    ctx = PrimeContext(10007, 2)
    mod = ctx.modulus
    d = 6
    coeffs = [[[rng.randrange(mod) for _ in range(d + 1)] for _ in range(2)] for _ in range(2)]

    def val(x):
        return [[sum(c * pow(x, k, mod) for k, c in enumerate(coeffs[i][j])) % mod
                 for j in range(2)] for i in range(2)]

    vals = [val(i) for i in range(d + 1)]
    shifted = shift_evaluations(vals, 9, ctx)
    assert shifted == [val(9 + i) for i in range(d + 1)]
    back = shift_evaluations(shifted, -9, ctx)
    assert back == vals
    # fractional shift round trip
    half = Fraction(1, 2)
    up = shift_evaluations(vals, half, ctx)
    down = shift_evaluations(up, -half, ctx)
    assert down == vals


def test_shift_evaluations_non_unit_denominator():
    ctx = PrimeContext(5, 1)
    vals = [1, 2, 3, 4, 5, 6]  # degree 5 >= p = 5: factorials are non-units
    with pytest.raises(NonUnitDenominator):
        shift_evaluations(vals, 7, ctx)


def test_validate_intervals():
    validate_intervals([(0, 3), (3, 5), (9, 12)])
    with pytest.raises(ValueError):
        validate_intervals([(0, 3), (2, 5)])
    with pytest.raises(ValueError):
        validate_intervals([(4, 2)])


def test_empty_request():
    ctx = PrimeContext(101, 1)
    assert interval_products_fast(None, [], ctx) == []


def test_fast_equals_naive_many_instances():
    """>= 200 random (matrix, interval) instances, m <= 6, n <= 4, K <= 4096."""
    rng = random.Random(424242)
    checked = 0
    while checked < 200:
        p = rng.choice([521, 1009, 2003, 4099, 65537])
        ctx = PrimeContext(p, rng.choice([1, 2]))
        m = rng.randrange(1, 7)
        n = rng.randrange(0, 5)
        gen = rand_block_gen(rng, ctx, m, n)
        K = rng.randrange(30, 4097)
        cuts = sorted(rng.sample(range(K + 1), rng.choice([2, 4])))
        ivs = [(cuts[i], cuts[i + 1]) for i in range(0, len(cuts) - 1, 2)
               if cuts[i] < cuts[i + 1]]
        if not ivs:
            continue
        cfg = RecProdConfig(block_size=rng.choice([8, 16, 32, 64, None]))
        fast = interval_products_fast(gen, ivs, ctx, cfg)
        for (a, b), got in zip(ivs, fast):
            want = interval_product_naive(gen, a, b, ctx)
            assert products_equal(got, want), (p, m, n, a, b)
            checked += 1
    assert checked >= 200


def test_policy_path_equals_naive(rng):
    """interval_products (with cutoff policy) is bit-identical to naive."""
    for _ in range(30):
        p = rng.choice([11, 101, 65537])
        ctx = PrimeContext(p, rng.choice([1, 2]))
        gen = rand_block_gen(rng, ctx, rng.randrange(1, 5), rng.randrange(0, 3))
        b = rng.randrange(1, 2000)
        a = rng.randrange(0, b)
        got = interval_products(gen, [(a, b)], ctx)[0]
        want = interval_product_naive(gen, a, b, ctx)
        assert products_equal(got, want)


def test_block_closure(rng):
    """Products of block lower-triangular matrices keep the shape; the
    engine never materializes the zero block (there is none to check), so
    verify against a dense multiply."""
    ctx = PrimeContext(101, 2)
    mod = ctx.modulus
    m, n = 3, 2
    gen = rand_block_gen(rng, ctx, m, n)
    X = gen.at(4, mod)
    Y = gen.at(9, mod)
    Z = X.mul(Y, mod)

    def dense(v):
        top = [row + [0] * n for row in v.A]
        bot = [row + [v.diag[l] if c == l else 0 for c in range(n)]
               for l, row in enumerate(v.B)]
        return top + bot

    DX, DY = dense(X), dense(Y)
    want = [[sum(DX[i][k] * DY[k][j] for k in range(m + n)) % mod
             for j in range(m + n)] for i in range(m + n)]
    assert dense(Z) == want


def test_operation_count_scaling():
    """Fast-path ring operations grow like sqrt(K): about 2x per 4x K."""
    rng = random.Random(7)
    ctx = PrimeContext(2147483659, 1)
    gen = rand_block_gen(rng, ctx, 4, 2)
    counts = []
    for K in (10**4, 4 * 10**4, 16 * 10**4):
        with count_operations() as cnt:
            interval_products_fast(gen, [(0, K)], ctx)
        counts.append(cnt.mults)
    for lo, hi in zip(counts, counts[1:]):
        assert 1.4 <= hi / lo <= 3.2, counts


def test_interval_starting_at_multiple_of_p(rng):
    """Shift offsets hit one p-divisible numerator (the production layout)."""
    p = 65537
    ctx = PrimeContext(p, 1)
    gen = rand_block_gen(rng, ctx, 3, 1)
    cfg = RecProdConfig(block_size=64)
    for k in (1, 2, 3):
        a = k * p
        b = a + 1300
        got = interval_products_fast(gen, [(a, b)], ctx, cfg)[0]
        want = interval_product_naive(gen, a, b, ctx)
        assert products_equal(got, want)
