"""Fixed precision arithmetic in Z/p^W with valuation tracking.

All arithmetic in the package is flat modulo p^W where W = N + 1: one guard
digit on top of the N digits actually reported.  No per-element precision is
carried; instead the two division primitives enforce at runtime the
structural facts the algorithm relies on:

* ``invert_unit`` only inverts units,
* ``divide_exact`` divides by denominators of valuation at most 1, and the
  dividend must be at least as divisible as the denominator.

A denominator of valuation >= 2 (``ExcessValuation``) means the curve
violates p > (2N-1)(2g+1) and is a hard error.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2


class NonUnit(ArithmeticError):
    """Attempt to invert an element of positive valuation."""


class InexactDivision(ArithmeticError):
    """Dividend less divisible by p than the denominator."""


class ExcessValuation(ArithmeticError):
    """Denominator divisible by p^2; the precision assumption is violated."""


class PrimeContext:
    """The ring Z/p^W Z with W = N + 1 working digits.

    ``valuation``, ``invert_unit`` and ``divide_exact`` operate on plain int
    residues in [0, p^W); ``reduce`` maps ints, Fractions or decimal/rational
    strings into the ring.
    """

    __slots__ = ("p", "N", "W", "modulus", "pN", "_inv_cache", "_binom_half",
                 "guard_divisions")

    def __init__(self, p: int, N: int):
        if N < 1:
            raise ValueError("precision N must be >= 1")
        if p < 3 or p % 2 == 0 or not gmpy2.is_prime(p):
            raise ValueError(f"p = {p} is not an odd prime")
        self.p = p
        self.N = N
        self.W = N + 1
        self.modulus = p ** self.W
        self.pN = p ** N
        self._inv_cache: dict[int, int] = {}
        self._binom_half: list[int] = []
        # count of valuation-1 divisions that consumed the guard digit
        self.guard_divisions = 0

    def __repr__(self):
        return f"PrimeContext(p={self.p}, N={self.N})"

    def __eq__(self, other):
        return (
            isinstance(other, PrimeContext)
            and self.p == other.p
            and self.N == other.N
        )

    def __hash__(self):
        return hash((self.p, self.N))

    def reduce(self, x) -> int:
        """Image of an int / Fraction / "a/b" string in Z/p^W.

        Raises ValueError if a denominator is divisible by p.
        """
        if isinstance(x, int):
            return x % self.modulus
        if isinstance(x, str):
            x = Fraction(x)
        if isinstance(x, Fraction):
            den = x.denominator
            if den % self.p == 0:
                raise ValueError(f"denominator of {x} is divisible by p = {self.p}")
            return x.numerator * pow(den, -1, self.modulus) % self.modulus
        raise TypeError(f"cannot reduce {type(x).__name__} into Z/p^W")

    def valuation(self, a: int) -> int:
        """max k <= W with p^k | a; the zero residue gets the cap W."""
        if a == 0:
            return self.W
        v = 0
        p = self.p
        while a % p == 0:
            a //= p
            v += 1
        return v

    def invert_unit(self, a: int) -> int:
        if a % self.p == 0:
            raise NonUnit(f"residue {a} has positive valuation")
        return pow(a, -1, self.modulus)

    def inv_small(self, n: int) -> int:
        """Cached inverse of a small integer (sign allowed), unit required."""
        r = self._inv_cache.get(n)
        if r is None:
            r = self.invert_unit(n % self.modulus)
            self._inv_cache[n] = r
        return r

    def divide_exact(self, a: int, d: int) -> int:
        """q with q*d = a mod p^W, for v_p(d) <= 1 and v_p(a) >= v_p(d).

        For a valuation-1 denominator the quotient is well defined only
        modulo p^{W-1}; the canonical representative below p^{W-1} is
        returned, so one guard digit is consumed.
        """
        p = self.p
        if d % p != 0:
            return a * pow(d, -1, self.modulus) % self.modulus
        if d == 0 or (d // p) % p == 0:
            raise ExcessValuation(f"denominator {d} divisible by p^2 (p = {p})")
        if a % p != 0:
            raise InexactDivision(f"p does not divide dividend {a}")
        self.guard_divisions += 1
        sub = self.modulus // p
        return (a // p) * pow(d // p, -1, sub) % sub

    def binomial_half(self, k: int) -> int:
        """binom(-1/2, k) = (-1/2)(-3/2)...(-1/2-k+1)/k! mod p^W, for k < p."""
        if k < 0:
            raise ValueError("k must be >= 0")
        if k >= self.p:
            raise ValueError("binomial_half requires k < p")
        tbl = self._binom_half
        if not tbl:
            tbl.append(1)
        m = self.modulus
        half = pow(2, -1, m)
        while len(tbl) <= k:
            j = len(tbl)
            # binom(-1/2, j) = binom(-1/2, j-1) * (-1/2 - (j-1)) / j
            num = tbl[-1] * ((m - half - (j - 1)) % m) % m
            tbl.append(num * self.inv_small(j) % m)
        return tbl[k]

    def truncate(self, a: int) -> int:
        """Drop the guard digit: canonical representative mod p^N."""
        return int(a % self.pN)

    def sqrt_unit(self, a: int, seed_mod_p: int) -> int:
        """Hensel square root of a unit a mod p^W, congruent to seed mod p.

        ``seed_mod_p`` must satisfy seed^2 = a mod p.
        """
        p, m = self.p, self.modulus
        y = seed_mod_p % p
        if y == 0 or (y * y - a) % p != 0:
            raise ValueError("seed is not a square root of a mod p")
        k = 1
        inv2 = pow(2, -1, m)
        while k < self.W:
            y = (y + a * pow(y, -1, m)) * inv2 % m
            k *= 2
        if (y * y - a) % m != 0:
            raise ValueError("Hensel square root did not converge")
        return y

    def sqrt_mod_p(self, a: int) -> int | None:
        """A square root of a mod p (Tonelli-Shanks), or None."""
        p = self.p
        a %= p
        if a == 0:
            return 0
        if pow(a, (p - 1) // 2, p) != 1:
            return None
        if p % 4 == 3:
            return pow(a, (p + 1) // 4, p)
        # Tonelli-Shanks
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while pow(z, (p - 1) // 2, p) != p - 1:
            z += 1
        c = pow(z, q, p)
        x = pow(a, (q + 1) // 2, p)
        t = pow(a, q, p)
        m = s
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            x = x * b % p
            c = b * b % p
            t = t * c % p
            m = i
        return x


@dataclass(frozen=True)
class ModElem:
    """A residue mod p^W tied to its context.  Convenience wrapper only;
    inner loops work on raw ints via PrimeContext methods."""

    residue: int
    context: PrimeContext

    def __post_init__(self):
        object.__setattr__(self, "residue", self.residue % self.context.modulus)

    def _lift(self, other) -> int:
        if isinstance(other, ModElem):
            if other.context != self.context:
                raise ValueError("mixed contexts")
            return other.residue
        return self.context.reduce(other)

    def __add__(self, other):
        return ModElem(self.residue + self._lift(other), self.context)

    def __sub__(self, other):
        return ModElem(self.residue - self._lift(other), self.context)

    def __mul__(self, other):
        return ModElem(self.residue * self._lift(other), self.context)

    def __neg__(self):
        return ModElem(-self.residue, self.context)

    def valuation(self) -> int:
        return self.context.valuation(self.residue)

    def invert_unit(self) -> "ModElem":
        return ModElem(self.context.invert_unit(self.residue), self.context)

    def divide_exact(self, d: "ModElem") -> "ModElem":
        return ModElem(self.context.divide_exact(self.residue, self._lift(d)), self.context)


@dataclass(frozen=True)
class PadicValue:
    """A reported p-adic number: value = mantissa / p^shift, known mod p^abs_prec.

    Invariant: 0 <= mantissa < p^(abs_prec + shift).
    """

    mantissa: int
    shift: int
    abs_prec: int

    def normalized(self, p: int) -> "PadicValue":
        """Remove p-factors shared by mantissa and shift."""
        m, s = self.mantissa, self.shift
        while s > 0 and m % p == 0:
            m //= p
            s -= 1
        return PadicValue(m % p ** (self.abs_prec + s), s, self.abs_prec)

    def is_zero(self, p: int) -> bool:
        return self.mantissa % p ** (self.abs_prec + self.shift) == 0

    def __neg__(self):
        raise TypeError("negate via padic_neg(p, value)")


def padic_from_residue(residue: int, abs_prec: int) -> PadicValue:
    return PadicValue(residue, 0, abs_prec)


def padic_neg(p: int, v: PadicValue) -> PadicValue:
    mod = p ** (v.abs_prec + v.shift)
    return PadicValue((-v.mantissa) % mod, v.shift, v.abs_prec)


def padic_add(p: int, a: PadicValue, b: PadicValue) -> PadicValue:
    """Sum with the usual precision bookkeeping (min of absolute precisions)."""
    shift = max(a.shift, b.shift)
    ma = a.mantissa * p ** (shift - a.shift)
    mb = b.mantissa * p ** (shift - b.shift)
    prec = min(a.abs_prec, b.abs_prec)
    return PadicValue((ma + mb) % p ** (prec + shift), shift, prec)


def padic_sub(p: int, a: PadicValue, b: PadicValue) -> PadicValue:
    return padic_add(p, a, padic_neg(p, b))


def padic_eq(p: int, a: PadicValue, b: PadicValue) -> bool:
    """Equality mod p^min(abs_prec): the only meaningful comparison."""
    return padic_sub(p, a, b).is_zero(p)
