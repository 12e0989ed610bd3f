"""Dense polynomial arithmetic over Z/p^W and the Bezout data of vertical reduction.

Polynomials are coefficient lists in ascending degree (plain ints mod p^W).
The central object is the decomposition

    x^i = R_i(x) Q(x) + S_i(x) Q'(x),   deg R_i <= 2g-1, deg S_i <= 2g,

for 0 <= i <= 2g-1, which exists because Q mod p is squarefree.  Since
Z/p^W is not a field, the pair (A, B) with A*Q + B*Q' = 1 is found by
extended Euclid over F_p followed by Hensel lifting.
"""

from __future__ import annotations

from dataclasses import dataclass

from .padic import InexactDivision, PrimeContext


class NotSquarefree(ArithmeticError):
    """gcd(Q, Q') != 1 over F_p."""


Poly = list  # coefficients, ascending degree


def ptrim(a: Poly) -> Poly:
    while a and a[-1] == 0:
        a.pop()
    return a


def pdegree(a: Poly) -> int:
    """Index of the last nonzero coefficient, -1 for the zero polynomial."""
    d = len(a) - 1
    while d >= 0 and a[d] == 0:
        d -= 1
    return d


def padd(a: Poly, b: Poly, m: int) -> Poly:
    n = max(len(a), len(b))
    return [((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % m for i in range(n)]


def psub(a: Poly, b: Poly, m: int) -> Poly:
    n = max(len(a), len(b))
    return [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % m for i in range(n)]


def pscale(a: Poly, c: int, m: int) -> Poly:
    return [x * c % m for x in a]


def poly_mul(a: Poly, b: Poly, m: int) -> Poly:
    """Schoolbook product mod m.  Degrees here stay O(gN); no FFT needed."""
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return [x % m for x in out]


def pderiv(a: Poly, m: int) -> Poly:
    return [i * a[i] % m for i in range(1, len(a))]


def peval(a: Poly, x: int, m: int) -> int:
    acc = 0
    for c in reversed(a):
        acc = (acc * x + c) % m
    return acc


def pdivmod_monic(a: Poly, q: Poly, m: int) -> tuple[Poly, Poly]:
    """Quotient and remainder of a by a monic q, coefficients mod m."""
    dq = pdegree(q)
    if dq < 0 or q[dq] % m != 1:
        raise ValueError("divisor must be monic")
    rem = [c % m for c in a]
    da = pdegree(rem)
    if da < dq:
        return [], ptrim(rem)
    quot = [0] * (da - dq + 1)
    for k in range(da - dq, -1, -1):
        c = rem[dq + k] % m
        quot[k] = c
        if c:
            for j in range(dq + 1):
                rem[j + k] = (rem[j + k] - c * q[j]) % m
    del rem[dq:]
    return quot, ptrim(rem)


def pdiv_exact(a: Poly, q: Poly, m: int) -> Poly:
    quot, rem = pdivmod_monic(a, q, m)
    if pdegree(rem) >= 0:
        raise InexactDivision("polynomial division left a remainder")
    return quot


def power_coeffs(Q: Poly, jmax: int, m: int) -> list[Poly]:
    """C[j] = coefficient list of Q^j for 0 <= j <= jmax; C[0] = [1]."""
    C = [[1]]
    for _ in range(jmax):
        C.append(poly_mul(C[-1], Q, m))
    return C


def _gcd_ext_fp(a: Poly, b: Poly, p: int) -> tuple[Poly, Poly, Poly]:
    """(g, u, v) over F_p with u*a + v*b = g = gcd(a, b), g monic."""
    r0, r1 = [c % p for c in a], [c % p for c in b]
    u0, u1 = [1], []
    v0, v1 = [], [1]
    while pdegree(r1) >= 0:
        q, r = _pdivmod_fp(r0, r1, p)
        r0, r1 = r1, r
        u0, u1 = u1, psub(u0, poly_mul(q, u1, p), p)
        v0, v1 = v1, psub(v0, poly_mul(q, v1, p), p)
    d = pdegree(r0)
    lead_inv = pow(r0[d], -1, p)
    return (pscale(r0, lead_inv, p), pscale(u0, lead_inv, p), pscale(v0, lead_inv, p))


def _pdivmod_fp(a: Poly, b: Poly, p: int) -> tuple[Poly, Poly]:
    db = pdegree(b)
    inv_lead = pow(b[db], -1, p)
    rem = [c % p for c in a]
    da = pdegree(rem)
    if da < db:
        return [], ptrim(rem)
    quot = [0] * (da - db + 1)
    for k in range(da - db, -1, -1):
        c = rem[db + k] * inv_lead % p
        quot[k] = c
        if c:
            for j in range(db + 1):
                rem[j + k] = (rem[j + k] - c * b[j]) % p
    del rem[db:]
    return quot, ptrim(rem)


@dataclass
class BezoutData:
    """A*Q + B*Q' = 1 mod p^W plus the tables R_i, S_i, S_i' for i < 2g.

    ``r_grid[i][j]`` is the x^j coefficient of R_i (j <= 2g-1) and
    ``sprime_grid[i][j]`` the x^j coefficient of S_i' (j <= 2g-1).
    """

    A: Poly
    B: Poly
    R: list
    S: list
    Sprime: list
    r_grid: list
    sprime_grid: list


def bezout(ctx: PrimeContext, Q: Poly) -> tuple[Poly, Poly]:
    """A, B with A*Q + B*Q' = 1 mod p^W, deg A <= 2g-1, deg B <= 2g.

    Extended Euclid over F_p, then Hensel lifting: each pass multiplies the
    error E = 1 - A*Q - B*Q' by its initial valuation, one digit per pass.
    """
    p, m = ctx.p, ctx.modulus
    Qp = [c % p for c in Q]
    dQp = pderiv(Qp, p)
    g_poly, a0, b0 = _gcd_ext_fp(Qp, dQp, p)
    if pdegree(g_poly) != 0:
        raise NotSquarefree("Q mod p has a repeated root")
    Qm = [c % m for c in Q]
    dQm = pderiv(Qm, m)
    A = [c % m for c in a0]
    B = [c % m for c in b0]
    for _ in range(ctx.W):
        E = psub([1], padd(poly_mul(A, Qm, m), poly_mul(B, dQm, m), m), m)
        if pdegree(E) < 0:
            break
        A = padd(A, poly_mul(a0, E, m), m)
        B = padd(B, poly_mul(b0, E, m), m)
    # normalize degrees: B mod Q, then A = (1 - B*Q')/Q exactly
    _, B = pdivmod_monic(B, Qm, m)
    A = pdiv_exact(psub([1], poly_mul(B, dQm, m), m), Qm, m)
    check = psub(padd(poly_mul(A, Qm, m), poly_mul(B, dQm, m), m), [1], m)
    if pdegree(check) >= 0:
        raise ArithmeticError("Bezout lift failed to converge")
    return A, B


def reduce_power(ctx: PrimeContext, Q: Poly, A: Poly, B: Poly, i: int) -> tuple[Poly, Poly]:
    """R_i, S_i with x^i = R_i*Q + S_i*Q' mod p^W.

    S_i = (x^i * B) mod Q and R_i = (x^i - S_i*Q')/Q, an exact division.
    """
    m = ctx.modulus
    Qm = [c % m for c in Q]
    xi = [0] * i + [1]
    _, S = pdivmod_monic(poly_mul(xi, B, m), Qm, m)
    R = pdiv_exact(psub(xi, poly_mul(S, pderiv(Qm, m), m), m), Qm, m)
    return R, S


def build_bezout_data(ctx: PrimeContext, Q: Poly, g: int) -> BezoutData:
    A, B = bezout(ctx, Q)
    m = ctx.modulus
    R, S, Sp = [], [], []
    r_grid, sprime_grid = [], []
    for i in range(2 * g):
        Ri, Si = reduce_power(ctx, Q, A, B, i)
        Spi = pderiv(Si, m)
        R.append(Ri)
        S.append(Si)
        Sp.append(Spi)
        r_grid.append([Ri[j] if j < len(Ri) else 0 for j in range(2 * g)])
        sprime_grid.append([Spi[j] if j < len(Spi) else 0 for j in range(2 * g)])
    return BezoutData(A, B, R, S, Sp, r_grid, sprime_grid)
