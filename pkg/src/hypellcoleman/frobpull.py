"""Finite approximation of the Frobenius pullback of the basis differentials.

phi^* omega_i is congruent mod p^N to a sum of terms

    B[j][r] * x^(p(i+r+1)-1) * y^(-p(2j+1)+1) dx/2y,   0 <= j < N, 0 <= r <= (2g+1)j,

where B[j][r] = p * C[j][r] * sum_{k=j}^{N-1} (-1)^(k+j) binom(-1/2,k) binom(k,j)
and C[j][r] is the x^r coefficient of Q^j.  Frobenius acts as the identity on
the coefficients themselves (they come from rationals embedded in Z_p).  The
x and y exponent placement is owned by the reduction driver; this module only
tabulates the B values.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .curve import Curve
from .polyring import power_coeffs


@dataclass
class FrobTerms:
    """B[j][r] for 0 <= j <= N-1, 0 <= r <= (2g+1)j; every entry has the
    leading factor p, hence valuation >= 1."""

    B: list
    g: int
    ctx: object

    def term_count(self) -> int:
        return sum(len(row) for row in self.B)


def frob_terms(curve: Curve) -> FrobTerms:
    ctx = curve.ctx
    m = ctx.modulus
    N, g, p = ctx.N, curve.g, ctx.p
    C = power_coeffs(curve.Q, N - 1, m)
    B = []
    for j in range(N):
        s = 0
        for k in range(j, N):
            term = ctx.binomial_half(k) * comb(k, j) % m
            s = (s - term if (k + j) % 2 else s + term) % m
        width = (2 * g + 1) * j + 1
        row_coeffs = C[j]
        row = [p * s % m * (row_coeffs[r] if r < len(row_coeffs) else 0) % m for r in range(width)]
        B.append(row)
    return FrobTerms(B, g, ctx)
