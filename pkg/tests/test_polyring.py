from fractions import Fraction

import pytest

from hypellcoleman.padic import PrimeContext
from hypellcoleman.polyring import (
    NotSquarefree,
    bezout,
    build_bezout_data,
    padd,
    pdegree,
    pdiv_exact,
    pderiv,
    pdivmod_monic,
    poly_mul,
    power_coeffs,
    psub,
    reduce_power,
)


def frac_reduce(ctx, fr):
    return ctx.reduce(Fraction(fr))


def test_poly_mul_trivial():
    m = 49
    assert poly_mul([1], [0, 1], m) == [0, 1]
    assert poly_mul([1, 1], [1, 1], 7) == [1, 2, 1]


def test_poly_mul_random_schoolbook_oracle(rng):
    m = 11**3
    for _ in range(50):
        a = [rng.randrange(m) for _ in range(rng.randrange(1, 9))]
        b = [rng.randrange(m) for _ in range(rng.randrange(1, 9))]
        want = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            for j, bj in enumerate(b):
                want[i + j] = (want[i + j] + ai * bj) % m
        assert poly_mul(a, b, m) == want


def test_power_coeffs():
    m = 7**2
    C = power_coeffs([0, 1, 0, 1], 2, m)  # Q = x^3 + x
    assert C[0] == [1]
    assert C[1] == [0, 1, 0, 1]
    assert C[2] == [0, 0, 1, 0, 2, 0, 1]


def test_divmod_monic():
    m = 11**2
    q = [3, 0, 1]  # x^2 + 3
    a = poly_mul(q, [5, 2], m)
    a = padd(a, [7], m)
    quot, rem = pdivmod_monic(a, q, m)
    assert quot == [5, 2] and rem == [7]
    with pytest.raises(Exception):
        pdiv_exact(a, q, m)


def test_bezout_example_mod7():
    ctx = PrimeContext(7, 1)
    # worked example for y^2 = x^3 + x: over Q, A = -(9/2)x, B = (3/2)x^2 + 1
    A, B = bezout(ctx, [0, 1, 0, 1])
    m = ctx.modulus
    wantA = [0, frac_reduce(ctx, "-9/2")]
    wantB = [1, 0, frac_reduce(ctx, "3/2")]
    assert A == wantA
    assert B == wantB
    assert wantA[1] % 7 == 6 and wantB[2] % 7 == 5  # the mod-7 values 6x and 5x^2+1


def test_bezout_defining_property_and_degrees(rng):
    for _ in range(40):
        p = rng.choice([7, 11, 13, 101])
        N = rng.randrange(1, 4)
        ctx = PrimeContext(p, N)
        g = rng.randrange(1, 4)
        while True:
            Q = [rng.randrange(ctx.modulus) for _ in range(2 * g + 1)] + [1]
            try:
                A, B = bezout(ctx, Q)
                break
            except NotSquarefree:
                continue
        m = ctx.modulus
        lhs = padd(poly_mul(A, Q, m), poly_mul(B, pderiv(Q, m), m), m)
        assert pdegree(psub(lhs, [1], m)) < 0
        assert pdegree(A) <= 2 * g - 1
        assert pdegree(B) <= 2 * g


def test_bezout_not_squarefree():
    ctx = PrimeContext(7, 1)
    with pytest.raises(NotSquarefree):
        bezout(ctx, [0, 0, 0, 1])  # x^3


def _solve_linear_mod(rows, rhs, ctx):
    """Gaussian elimination with unit pivots mod p^W (test-local oracle)."""
    m = ctx.modulus
    n = len(rows)
    a = [row[:] + [rhs[i]] for i, row in enumerate(rows)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] % ctx.p != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = ctx.invert_unit(a[col][col])
        a[col] = [v * inv % m for v in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                c = a[r][col]
                a[r] = [(v - c * w) % m for v, w in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


def test_bezout_dual_route(rng):
    """Hensel-lifted Euclid equals a direct linear solve mod p^W."""
    for _ in range(15):
        p = rng.choice([7, 11, 13])
        ctx = PrimeContext(p, rng.randrange(1, 4))
        g = rng.randrange(1, 3)
        while True:
            Q = [rng.randrange(ctx.modulus) for _ in range(2 * g + 1)] + [1]
            try:
                A, B = bezout(ctx, Q)
                break
            except NotSquarefree:
                continue
        # unknowns: 2g coeffs of A, 2g+1 coeffs of B; equations: coeffs of
        # A*Q + B*Q' - 1 in degrees 0..4g
        m = ctx.modulus
        dQ = pderiv(Q, m)
        nA, nB = 2 * g, 2 * g + 1
        rows = []
        for d in range(4 * g + 1):
            row = []
            for i in range(nA):
                row.append(Q[d - i] if 0 <= d - i < len(Q) else 0)
            for i in range(nB):
                row.append(dQ[d - i] if 0 <= d - i < len(dQ) else 0)
            rows.append(row)
        rhs = [1] + [0] * (4 * g)
        sol = _solve_linear_mod(rows, rhs, ctx)
        A2 = sol[:nA]
        B2 = sol[nA:]
        padA = A + [0] * (nA - len(A))
        padB = B + [0] * (nB - len(B))
        assert padA == A2 and padB == B2


def test_reduce_power_examples():
    ctx = PrimeContext(7, 2)
    Q = [0, 1, 0, 1]
    A, B = bezout(ctx, Q)
    R0, S0 = reduce_power(ctx, Q, A, B, 0)
    R1, S1 = reduce_power(ctx, Q, A, B, 1)
    assert R0 == [0, frac_reduce(ctx, "-9/2")]
    assert S0 == [1, 0, frac_reduce(ctx, "3/2")]
    assert R1 == [frac_reduce(ctx, "3/2")]
    assert S1 == [0, frac_reduce(ctx, "-1/2")]


def test_reduce_power_identity_property(rng):
    for _ in range(25):
        p = rng.choice([7, 11, 101])
        ctx = PrimeContext(p, rng.randrange(1, 4))
        g = rng.randrange(1, 4)
        while True:
            Q = [rng.randrange(ctx.modulus) for _ in range(2 * g + 1)] + [1]
            try:
                bd = build_bezout_data(ctx, Q, g)
                break
            except NotSquarefree:
                continue
        m = ctx.modulus
        dQ = pderiv(Q, m)
        for i in range(2 * g):
            lhs = padd(poly_mul(bd.R[i], Q, m), poly_mul(bd.S[i], dQ, m), m)
            xi = [0] * i + [1]
            assert pdegree(psub(lhs, xi, m)) < 0
            assert pdegree(bd.S[i]) <= 2 * g
            assert pdegree(bd.R[i]) <= 2 * g - 1
