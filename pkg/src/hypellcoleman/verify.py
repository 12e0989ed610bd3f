"""Independent cross-checks: brute-force point counts vs det(1 - T*M).

det(1 - T*M) mod p^N is lifted to integer coefficients using the Weil
bounds |a_i| <= C(2g,i) p^(i/2) and the functional equation
a_{2g-i} = p^(g-i) a_i; Newton's identities then give |X(F_{p^k})| for
comparison with exhaustive enumeration.  When p^N cannot separate a
coefficient (p^N <= 2 * bound) that coefficient is inconclusive and the
comparison falls back to matching counts modulo p^N.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, isqrt

from .colemandata import ColemanData


def _legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


# -- tiny F_{p^k} arithmetic (dense coefficient tuples mod an irreducible) --

def _poly_mulmod(a, b, f, p):
    k = len(f) - 1
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    for d in range(len(out) - 1, k - 1, -1):
        c = out[d]
        if c:
            out[d] = 0
            for j in range(k):
                out[d - k + j] = (out[d - k + j] - c * f[j]) % p
    while len(out) > k:
        out.pop()
    while len(out) < k:
        out.append(0)
    return out


def _poly_powmod(a, e, f, p):
    r = [1] + [0] * (len(f) - 2)
    b = list(a)
    while e:
        if e & 1:
            r = _poly_mulmod(r, b, f, p)
        b = _poly_mulmod(b, b, f, p)
        e >>= 1
    return r


def _is_irreducible(f, p):
    k = len(f) - 1
    x = [0, 1] + [0] * (k - 2) if k > 1 else [0]
    xq = _poly_powmod(x, p ** k, f, p)
    if xq != x:
        return False
    for q in {d for d in range(2, k + 1) if k % d == 0 and _isprime_small(d)}:
        xe = _poly_powmod(x, p ** (k // q), f, p)
        diff = [(a - b) % p for a, b in zip(xe, x)]
        if _poly_gcd_nonconst(diff, f, p):
            return False
    return True


def _isprime_small(n):
    return n > 1 and all(n % d for d in range(2, isqrt(n) + 1))


def _poly_gcd_nonconst(a, f, p):
    """True iff gcd(a, f) has positive degree (Euclid over F_p)."""

    def deg(v):
        d = len(v) - 1
        while d >= 0 and v[d] == 0:
            d -= 1
        return d

    a, b = list(a), list(f)
    while deg(b) >= 0:
        da, db = deg(a), deg(b)
        if da < db:
            a, b = b, a
            continue
        c = a[da] * pow(b[db], -1, p) % p
        for j in range(db + 1):
            a[da - db + j] = (a[da - db + j] - c * b[j]) % p
    return deg(a) > 0


def find_irreducible(p: int, k: int) -> list:
    """A monic irreducible of degree k over F_p, by small-coefficient search."""
    if k == 1:
        return [0, 1]
    for tail in range(p ** min(k, 3) * 4):
        f = [0] * (k + 1)
        f[k] = 1
        t = tail
        for i in range(min(k, 3)):
            f[i] = t % p
            t //= p
        f[1] = (f[1] + t) % p
        if _is_irreducible(f, p):
            return f
    raise ArithmeticError(f"no irreducible of degree {k} found over F_{p}")


def point_count(curve, k: int = 1) -> int:
    """|X(F_{p^k})| by exhaustive enumeration, including the point at
    infinity.  Needs p^k small (the pre is p^k <= ~10^7)."""
    p = curve.ctx.p
    Qbar = [c % p for c in curve.Q]
    if p ** k > 20_000_000:
        raise ValueError("p^k too large for enumeration")
    if k == 1:
        total = 1
        for x in range(p):
            q = 0
            for c in reversed(Qbar):
                q = (q * x + c) % p
            total += 1 + _legendre(q, p) if q else 1
        return total
    f = find_irreducible(p, k)
    half = (p ** k - 1) // 2
    total = 1
    elem = [0] * k
    for idx in range(p ** k):
        t = idx
        for i in range(k):
            elem[i] = t % p
            t //= p
        q = [0] * k
        for c in reversed(Qbar):
            q = _poly_mulmod(q, elem, f, p)
            q[0] = (q[0] + c) % p
        if not any(q):
            total += 1
        else:
            chi = _poly_powmod(q, half, f, p)
            total += 2 if chi == [1] + [0] * (k - 1) else 0
    return total


def charpoly_reverse(M: list, mod: int, n: int) -> list:
    """Coefficients a_0..a_n of det(1 - T*M) mod ``mod`` (Faddeev-LeVerrier;
    the divisions by 1..n are units since p > 2g+1)."""
    a = [1]
    Mk = [row[:] for row in M]
    for k in range(1, n + 1):
        tr = sum(Mk[i][i] for i in range(n)) % mod
        ck = (-tr) * pow(k, -1, mod) % mod
        a.append(ck)
        if k == n:
            break
        tmp = [row[:] for row in Mk]
        for i in range(n):
            tmp[i][i] = (tmp[i][i] + ck) % mod
        Mk = [
            [sum(M[i][l] * tmp[l][j] for l in range(n)) % mod for j in range(n)]
            for i in range(n)
        ]
    return a


@dataclass
class ZetaNumerator:
    """Integer coefficients a_0..a_{2g} of det(1 - T*M), a_0 = 1."""

    coeffs: list

    def counts(self, p: int, kmax: int) -> list:
        """|X(F_{p^k})| for k = 1..kmax via Newton's identities."""
        a = self.coeffs
        n = len(a) - 1
        e = [((-1) ** i) * a[i] for i in range(n + 1)]
        s = [0] * (kmax + 1)
        for k in range(1, kmax + 1):
            acc = 0
            for i in range(1, min(k, n)):
                acc += (-1) ** (i - 1) * e[i] * s[k - i]
            if k <= n:
                acc += (-1) ** (k - 1) * k * e[k]
            s[k] = acc
        return [p ** k + 1 - s[k] for k in range(1, kmax + 1)]


@dataclass
class ZetaCheck:
    ok: bool
    full_lift: bool
    numerator: ZetaNumerator | None
    inconclusive: list
    comparisons: list = field(default_factory=list)  # (k, brute, derived, mode)


def lift_numerator(data: ColemanData) -> tuple[ZetaNumerator | None, list]:
    """Integer a_i from M mod p^N where the Weil bound allows; the list of
    inconclusive indices comes back alongside."""
    curve = data.curve
    ctx = curve.ctx
    g = curve.g
    n = 2 * g
    pN = ctx.pN
    amod = charpoly_reverse([[v % pN for v in row] for row in data.M], pN, n)
    coeffs: list = [1] + [None] * n
    inconclusive = []
    for i in range(1, g + 1):
        bound = comb(n, i) * (isqrt(ctx.p ** i) + 1)
        if pN > 2 * bound:
            v = amod[i] % pN
            coeffs[i] = v - pN if v > pN // 2 else v
        else:
            inconclusive.append(i)
    for i in range(g + 1, n + 1):
        if coeffs[n - i] is not None:
            coeffs[i] = ctx.p ** (i - g) * coeffs[n - i]
            if (coeffs[i] - amod[i]) % pN != 0:
                raise ArithmeticError("functional equation fails mod p^N")
        else:
            inconclusive.append(i)
    if any(c is None for c in coeffs):
        return None, inconclusive
    return ZetaNumerator(coeffs), inconclusive


def zeta_consistency(data: ColemanData, kmax: int | None = None, counts: list | None = None) -> ZetaCheck:
    """Compare counts derived from M with brute force, exactly when the
    lift is conclusive and mod p^N otherwise."""
    curve = data.curve
    ctx = curve.ctx
    g = curve.g
    kmax = kmax or g
    if counts is None:
        counts = [point_count(curve, k) for k in range(1, kmax + 1)]
    numerator, inconclusive = lift_numerator(data)
    comparisons = []
    ok = True
    if numerator is not None:
        derived = numerator.counts(ctx.p, kmax)
        for k in range(1, kmax + 1):
            good = derived[k - 1] == counts[k - 1]
            ok = ok and good
            comparisons.append((k, counts[k - 1], derived[k - 1], "exact"))
        return ZetaCheck(ok, True, numerator, inconclusive, comparisons)
    # precision-limited mode: compare mod p^N using the mod-p^N numerator
    pN = ctx.pN
    amod = charpoly_reverse([[v % pN for v in row] for row in data.M], pN, 2 * g)
    num = ZetaNumerator(amod)
    derived = num.counts(ctx.p, kmax)
    for k in range(1, kmax + 1):
        good = (derived[k - 1] - counts[k - 1]) % pN == 0
        ok = ok and good
        comparisons.append((k, counts[k - 1], derived[k - 1] % pN, "mod p^N"))
    return ZetaCheck(ok, False, None, inconclusive, comparisons)
