"""Horizontal and vertical reduction matrices with evaluation rows.

Both recurrences have the block lower triangular shape

    [ A(s)    0      ]
    [ B(s)  diag(s)  ]

with entries linear in the running index, plus a scalar denominator D(s)
that is factored out so interval products stay products of matrices of
linear polynomials.  Horizontal matrices act on vectors in
W_{s,t} x Q_p^L (2g+1 differential coordinates w.r.t. x^i x^s y^{-2t} dx/2y,
then L Horner accumulators); vertical ones on W_{-1,t} x Q_p^L (2g
differential coordinates).
"""

from __future__ import annotations

from dataclasses import dataclass

from .curve import Curve
from .padic import PrimeContext
from .polyring import BezoutData, peval


class NonWeierstrassRequired(ValueError):
    """An evaluation point has y = 0 mod p."""


LinPoly = tuple  # (c0, c1): value c0 + s*c1


def lin_at(f: LinPoly, s: int, m: int) -> int:
    return (f[0] + s * f[1]) % m


@dataclass
class LinMat:
    """Matrix of degree <= 1 polynomials: value const + s*slope entrywise."""

    const: list
    slope: list

    def at(self, s: int, m: int) -> list:
        s %= m
        return [
            [(c + s * d) % m for c, d in zip(crow, srow)]
            for crow, srow in zip(self.const, self.slope)
        ]


_MUL_CACHE: dict = {}


def _compiled_mul(m: int):
    """Fully unrolled m x m row-times-matrix kernel (built once per m).

    Each output entry is a single expression, which beats allocating
    intermediate lists for the small m used here.
    """
    fn = _MUL_CACHE.get(m)
    if fn is None:
        rows = ", ".join(f"r{k}" for k in range(m))
        lines = [f"def _mul(A1, A2, mod):", f"    {rows}, = A2", "    out = []"]
        unpack = ", ".join(f"a{k}" for k in range(m))
        lines.append(f"    for row in A1:")
        lines.append(f"        {unpack}, = row")
        for j in range(m):
            expr = " + ".join(f"a{k}*r{k}[{j}]" for k in range(m))
            lines.append(f"        v{j} = ({expr}) % mod")
        vals = ", ".join(f"v{j}" for j in range(m))
        lines.append(f"        out.append([{vals}])")
        lines.append("    return out")
        ns: dict = {}
        exec("\n".join(lines), ns)
        fn = ns["_mul"]
        _MUL_CACHE[m] = fn
    return fn


@dataclass
class BlockMatVal:
    """An evaluated (or multiplied-out) block matrix: dense A (m x m),
    dense B (n x m), diagonal tail (n,)."""

    A: list
    B: list
    diag: list

    @classmethod
    def identity(cls, m: int, n: int) -> "BlockMatVal":
        return cls(
            [[1 if i == j else 0 for j in range(m)] for i in range(m)],
            [[0] * m for _ in range(n)],
            [1] * n,
        )

    def mul(self, other: "BlockMatVal", mod: int) -> "BlockMatVal":
        """self * other; the zero block is never materialized.

        A = A1*A2, B = B1*A2 + diag1 o B2, diag = diag1 o diag2.
        """
        A1, B1, d1 = self.A, self.B, self.diag
        A2, B2, d2 = other.A, other.B, other.diag
        m = len(A1)
        if m <= 8:
            kern = _compiled_mul(m)
            A = kern(A1, A2, mod)
            B = []
            if B1:
                raw = kern(B1, A2, mod)
                for l, row in enumerate(raw):
                    dl = d1[l]
                    b2 = B2[l]
                    B.append([(x + dl * y) % mod for x, y in zip(row, b2)])
        else:
            A = []
            for row in A1:
                acc = [0] * m
                for k in range(m):
                    a = row[k]
                    if a:
                        rk = A2[k]
                        acc = [x + a * y for x, y in zip(acc, rk)]
                A.append([x % mod for x in acc])
            B = []
            for l in range(len(B1)):
                row = B1[l]
                acc = [0] * m
                for k in range(m):
                    a = row[k]
                    if a:
                        rk = A2[k]
                        acc = [x + a * y for x, y in zip(acc, rk)]
                dl = d1[l]
                b2 = B2[l]
                B.append([(x + dl * y) % mod for x, y in zip(acc, b2)])
        diag = [a * b % mod for a, b in zip(d1, d2)]
        return BlockMatVal(A, B, diag)

    def matvec(self, v: list, mod: int) -> list:
        """Apply to a column vector (m differential coords then n evals)."""
        m = len(self.A)
        top = [sum(row[j] * v[j] for j in range(m)) % mod for row in self.A]
        bot = [
            (sum(self.B[l][j] * v[j] for j in range(m)) + self.diag[l] * v[m + l]) % mod
            for l in range(len(self.B))
        ]
        return top + bot

    def scale(self, c: int, mod: int) -> "BlockMatVal":
        return BlockMatVal(
            [[x * c % mod for x in row] for row in self.A],
            [[x * c % mod for x in row] for row in self.B],
            [x * c % mod for x in self.diag],
        )

    def entries(self):
        for row in self.A:
            yield from row
        for row in self.B:
            yield from row
        yield from self.diag


@dataclass
class BlockLinMat:
    """Generator of the recurrence: M(s) block lower triangular with linear
    entries, together with the scalar denominator D(s)."""

    m: int
    n: int
    A: LinMat
    B: LinMat
    diag: list  # n LinPoly
    denom: LinPoly

    def at(self, s: int, mod: int) -> BlockMatVal:
        s %= mod
        return BlockMatVal(
            self.A.at(s, mod),
            self.B.at(s, mod),
            [(c + s * d) % mod for c, d in self.diag],
        )

    def denom_at(self, s: int, mod: int) -> int:
        return (self.denom[0] + (s % mod) * self.denom[1]) % mod

    def entry_linpolys(self) -> list:
        """All structurally nonzero entries as LinPoly, A row-major, then B,
        then the diagonal tail.  Order matches BlockMatVal.entries()."""
        out = []
        for crow, srow in zip(self.A.const, self.A.slope):
            out.extend(zip(crow, srow))
        for crow, srow in zip(self.B.const, self.B.slope):
            out.extend(zip(crow, srow))
        out.extend(self.diag)
        return out

    @classmethod
    def from_entry_values(cls, template: "BlockLinMat", values) -> BlockMatVal:
        """Rebuild a BlockMatVal from a flat entry list (inverse of entries())."""
        m, n = template.m, template.n
        A = [list(values[i * m:(i + 1) * m]) for i in range(m)]
        off = m * m
        B = [list(values[off + l * m: off + (l + 1) * m]) for l in range(n)]
        off += n * m
        diag = list(values[off: off + n])
        return BlockMatVal(A, B, diag)


@dataclass
class EvalSet:
    """The L evaluation points with the per-point precomputations used by
    the reduction matrices: x, y^2, y^-2, y^-1 and S_i(x) for i < 2g."""

    ctx: PrimeContext
    x: list
    y: list
    y2: list
    y2inv: list
    yinv: list
    s_at_x: list  # s_at_x[l][i] = S_i(x_l)

    @classmethod
    def build(cls, curve: Curve, points: list, bez: BezoutData | None) -> "EvalSet":
        ctx = curve.ctx
        m = ctx.modulus
        xs, ys, y2, y2inv, yinv, s_at = [], [], [], [], [], []
        for (x, y) in points:
            x %= m
            y %= m
            if y % ctx.p == 0:
                raise NonWeierstrassRequired(f"point with x = {x} has y = 0 mod p")
            if (y * y - curve.q_at(x)) % m != 0:
                raise ValueError("point does not satisfy y^2 = Q(x) mod p^W")
            xs.append(x)
            ys.append(y)
            y2.append(y * y % m)
            iy = ctx.invert_unit(y)
            yinv.append(iy)
            y2inv.append(iy * iy % m)
            s_at.append([peval(S, x, m) for S in bez.S] if bez is not None else [])
        return cls(ctx, xs, ys, y2, y2inv, yinv, s_at)

    @property
    def L(self) -> int:
        return len(self.x)


def horiz_denominator(g: int, t: int, s: int, m: int) -> int:
    """D_H^t(s) = (2t-1)(2g+1) - 2s mod p^W."""
    return ((2 * t - 1) * (2 * g + 1) - 2 * s) % m


def horiz_denom_poly(g: int, t: int, m: int) -> LinPoly:
    return ((2 * t - 1) * (2 * g + 1) % m, (-2) % m)


def horiz_matrix(curve: Curve, evalset: EvalSet, t: int) -> BlockLinMat:
    """M_H^t(s): D_H on the subdiagonal, column 2g the coefficients of
    2sP(x) - (2t-1)xP'(x), eval rows -1 in column 2g with diagonal x_l*D_H."""
    ctx = curve.ctx
    m = ctx.modulus
    g = curve.g
    w = 2 * g + 1
    D = horiz_denom_poly(g, t, m)
    Ac = [[0] * w for _ in range(w)]
    As = [[0] * w for _ in range(w)]
    for i in range(1, w):
        Ac[i][i - 1] = D[0]
        As[i][i - 1] = D[1]
    P = curve.P
    for i in range(w):
        Pi = P[i] if i < len(P) else 0
        # coefficient of x^i in 2sP(x) - (2t-1)xP'(x) = P_i*(2s - (2t-1)i)
        Ac[i][w - 1] = (Ac[i][w - 1] - (2 * t - 1) * i * Pi) % m
        As[i][w - 1] = (As[i][w - 1] + 2 * Pi) % m
    L = evalset.L
    Bc = [[0] * w for _ in range(L)]
    Bs = [[0] * w for _ in range(L)]
    for l in range(L):
        Bc[l][w - 1] = (-1) % m
    diag = [(x * D[0] % m, x * D[1] % m) for x in evalset.x]
    return BlockLinMat(w, L, LinMat(Ac, As), LinMat(Bc, Bs), diag, D)


def vert_denom_poly(m: int) -> LinPoly:
    """D_V(t) = 2t - 1."""
    return ((-1) % m, 2)


def vert_matrix(curve: Curve, bez: BezoutData, evalset: EvalSet) -> BlockLinMat:
    """M_V(t): top entry (j,i) = (2t-1)r_{i,j} + 2s'_{i,j}; eval row l has
    -S_i(x_l) in column i and diagonal y_l^{-2} * D_V(t)."""
    ctx = curve.ctx
    m = ctx.modulus
    g = curve.g
    w = 2 * g
    Ac = [[0] * w for _ in range(w)]
    As = [[0] * w for _ in range(w)]
    for i in range(w):
        for j in range(w):
            r = bez.r_grid[i][j]
            sp = bez.sprime_grid[i][j]
            Ac[j][i] = (2 * sp - r) % m
            As[j][i] = 2 * r % m
    L = evalset.L
    Bc = [[(-bez_val) % m for bez_val in evalset.s_at_x[l]] for l in range(L)]
    Bs = [[0] * w for _ in range(L)]
    D = vert_denom_poly(m)
    diag = [(y2i * D[0] % m, y2i * D[1] % m) for y2i in evalset.y2inv]
    return BlockLinMat(w, L, LinMat(Ac, As), LinMat(Bc, Bs), diag, D)


def apply_correction(vec: list, evalset: EvalSet, power: int, n_diff: int, m: int) -> list:
    """Scale eval coordinate l by y(P_l)^power, power in {2, -1}; the
    differential coordinates pass through unchanged."""
    if power == 2:
        f = evalset.y2
    elif power == -1:
        f = evalset.yinv
    else:
        raise ValueError("correction power must be 2 or -1")
    out = list(vec[:n_diff])
    out.extend(v * f[l] % m for l, v in enumerate(vec[n_diff:]))
    return out
