"""The odd degree hyperelliptic curve y^2 = Q(x) over Z_p and its validation."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .padic import PrimeContext
from .polyring import pdegree, pderiv, _gcd_ext_fp


class InvalidCurve(ValueError):
    """Rejected curve data: parity, degree, squarefreeness or p-size trouble."""


@dataclass
class Curve:
    """y^2 = Q(x), Q monic of degree 2g+1, squarefree mod p.

    ``Q`` holds residues mod p^W in ascending degree (length 2g+2, last
    entry 1); ``P`` is Q minus its leading term, so Q = x^{2g+1} + P.
    """

    ctx: PrimeContext
    Q: list
    g: int = field(init=False)

    def __post_init__(self):
        d = pdegree(self.Q)
        if d < 3 or d % 2 == 0:
            raise InvalidCurve(f"deg Q = {d}; need odd degree >= 3")
        if d != len(self.Q) - 1:
            self.Q = self.Q[: d + 1]
        if self.Q[-1] != 1:
            raise InvalidCurve("Q must be monic")
        self.g = (d - 1) // 2
        p = self.ctx.p
        Qbar = [c % p for c in self.Q]
        dQbar = pderiv(Qbar, p)
        gcd, _, _ = _gcd_ext_fp(Qbar, dQbar, p)
        if pdegree(gcd) != 0:
            raise InvalidCurve("Q mod p is not squarefree")

    @classmethod
    def from_rationals(cls, p: int, N: int, coeffs) -> "Curve":
        """Curve from rational coefficients (ints, Fractions or strings)."""
        ctx = PrimeContext(p, N)
        try:
            Q = [ctx.reduce(c if isinstance(c, (int, Fraction)) else Fraction(str(c))) for c in coeffs]
        except ValueError as e:
            raise InvalidCurve(str(e)) from e
        return cls(ctx, Q)

    @property
    def P(self) -> list:
        return self.Q[:-1]

    @property
    def precision_bound_ok(self) -> bool:
        """The standing assumption p > (2N-1)(2g+1)."""
        return self.ctx.p > (2 * self.ctx.N - 1) * (2 * self.g + 1)

    def require_precision_bound(self):
        if not self.precision_bound_ok:
            raise InvalidCurve(
                f"p = {self.ctx.p} violates p > (2N-1)(2g+1) = "
                f"{(2 * self.ctx.N - 1) * (2 * self.g + 1)}"
            )

    def q_at(self, x: int) -> int:
        m = self.ctx.modulus
        acc = 0
        for c in reversed(self.Q):
            acc = (acc * x + c) % m
        return acc
