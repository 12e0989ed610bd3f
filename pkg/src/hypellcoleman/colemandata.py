"""Coleman data: the matrix of Frobenius M and primitive evaluations E.

For each row t = (p(2j+1)-1)/2, the Frobenius terms B[j][r] are injected at
x-exponent p(i+r+1)-1 and reduced horizontally down to W_{-1,t}: per
p-length segment k this is 2g+1 single steps (straddling the unique index
s = kp-2g-1 where D_H has valuation 1), the interval product
M_H^t((k-1)p, kp-2g-2) whose denominator product is a unit, and one last
single step at (k-1)p.  Rows are then folded vertically from j = N-1 down
to 0 through the block products R_j, with the correction factors c(y^2) at
each add and c(y^-1) at the end.

``coleman_data`` uses giant-step interval products; ``coleman_data_naive``
performs every step singly and additionally carries the primitives of the
subtracted exact differentials in symbolic form, so the evaluations can be
cross-checked by direct substitution.  Both must agree exactly mod p^N.
"""

from __future__ import annotations

from dataclasses import dataclass

from .curve import Curve
from .frobpull import frob_terms
from .padic import ExcessValuation, InexactDivision, PrimeContext
from .polyring import build_bezout_data, peval
from .recprod import RecProdConfig, _batch_inv, interval_products
from .redmat import (
    BlockLinMat,
    BlockMatVal,
    EvalSet,
    NonWeierstrassRequired,
    apply_correction,
    horiz_matrix,
    vert_matrix,
)


class PrecisionViolation(ArithmeticError):
    """A division assertion fired inside the reduction: either a bug or a
    violated hypothesis."""


@dataclass
class ColemanData:
    """M (2g x 2g) and E (2g x L), both mod p^N; E[i][l] = f_i(P_l).
    ``det_valuation`` is v_p(det(M - I)) capped at N."""

    curve: Curve
    evalset: EvalSet
    M: list
    E: list
    det_valuation: int

    @property
    def genus(self) -> int:
        return self.curve.g


@dataclass
class NaivePrimitives:
    """Symbolic primitives collected by the naive path.

    rows[i][j] = (t_j, {s: c_s}): the row-t_j primitive is
    (sum_s c_s x^s) * y^(1-2*t_j).  vert[i] = list of (tau, mvec): each
    vertical step contributes -(sum_k mvec[k] S_k(x)) / (2*tau-1) * y^(1-2*tau).
    """

    curve: Curve
    evalset: EvalSet
    bez: object
    rows: list
    vert: list

    def evaluate(self, i: int, l: int) -> int:
        """f_i(P_l) mod p^W by direct substitution (guard digit junk allowed)."""
        ctx = self.curve.ctx
        m = ctx.modulus
        x = self.evalset.x[l]
        y = self.evalset.y[l]
        y2inv = self.evalset.y2inv[l]
        total = 0
        for (t, coeffs) in self.rows[i]:
            acc = 0
            for s, c in coeffs.items():
                acc = (acc + c * pow(x, s, m)) % m
            total = (total + acc * pow(y2inv, t, m) % m * y) % m
        for (tau, mvec) in self.vert[i]:
            num = 0
            for k, mk in enumerate(mvec):
                num = (num + mk * self.evalset.s_at_x[l][k]) % m
            piece = ctx.divide_exact((-num) % m, (2 * tau - 1) % m)
            total = (total + piece * pow(y2inv, tau, m) % m * y) % m
        return total


def _det_mod(rows: list, mod: int) -> int:
    """Determinant of an integer matrix, reduced mod ``mod`` (Bareiss)."""
    n = len(rows)
    a = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1] % mod


class _HorizRow:
    """Single-step engine for one horizontal row (shared by both paths)."""

    def __init__(self, curve: Curve, evalset: EvalSet, gen: BlockLinMat, t: int):
        ctx = curve.ctx
        self.ctx = ctx
        self.m = ctx.modulus
        self.p = ctx.p
        self.g = curve.g
        self.t = t
        self.xs = evalset.x
        w = 2 * curve.g + 1
        # p_i(s) = const + s*slope, read back from the generator's last column
        self.pc = [gen.A.const[i][w - 1] for i in range(w)]
        self.ps = [gen.A.slope[i][w - 1] for i in range(w)]
        self.dc, self.ds = gen.denom
        self.gen = gen

    def denom_at(self, s: int) -> int:
        return (self.dc + s * self.ds) % self.m

    def step(self, h: list, s: int, inv_d: int | None = None, prim: dict | None = None) -> list:
        """One reduction step W_{s,t} -> W_{s-1,t}.

        The only division is h[2g]/D(s); when D has valuation 1 the dividend
        must be divisible by p (this is the precision lemma, asserted here).
        """
        ctx, m = self.ctx, self.m
        d = self.denom_at(s)
        top = h[2 * self.g]
        if inv_d is not None:
            q = top * inv_d % m
        elif d % self.p:
            q = top * ctx.invert_unit(d) % m
        else:
            q = ctx.divide_exact(top, d)
        w = 2 * self.g + 1
        out = [0] * len(h)
        out[0] = (self.pc[0] + s * self.ps[0]) % m * q % m
        for i in range(1, w):
            out[i] = (h[i - 1] + (self.pc[i] + s * self.ps[i]) * q) % m
        for l, x in enumerate(self.xs):
            out[w + l] = (x * h[w + l] - q) % m
        if prim is not None and q:
            prim[s] = (-q) % m
        return out

    def run_naive(self, h: list, s_hi: int, s_lo: int, prim: dict | None = None) -> list:
        """Steps s = s_hi down to s_lo with batched denominator inverses."""
        m, p = self.m, self.p
        s = s_hi
        while s >= s_lo:
            n = min(4096, s - s_lo + 1)
            block = range(s, s - n, -1)
            ds = [self.denom_at(si) for si in block]
            invs = _batch_inv([x if x % p else 1 for x in ds], m)
            for si, d, inv in zip(block, ds, invs):
                h = self.step(h, si, inv_d=inv if d % p else None, prim=prim)
            s -= n
        return h


def _vert_step(gen: BlockLinMat, v: list, tau: int, ctx: PrimeContext,
               vert_prims: list | None, g: int) -> list:
    m = ctx.modulus
    if vert_prims is not None:
        vert_prims.append((tau, list(v[: 2 * g])))
    w = gen.at(tau, m).matvec(v, m)
    d = gen.denom_at(tau, m)
    if d % ctx.p:
        inv = ctx.invert_unit(d)
        return [x * inv % m for x in w]
    return [ctx.divide_exact(x, d) for x in w]


def _reduce_row(row: _HorizRow, bterms, i: int, j: int, products, prim: dict | None) -> list:
    """Drive basis index i through row t_j; return the W_{-1,t} x Q_p^L vector
    with the vanished x^{-1} coordinate dropped."""
    ctx = row.ctx
    m, p, g = row.m, row.p, row.g
    L = len(row.xs)
    h = [0] * (2 * g + 1 + L)
    width = (2 * g + 1) * j
    k_max = i + 1 + width
    for k in range(k_max, 0, -1):
        r = k - i - 1
        if 0 <= r <= width:
            h[0] = (h[0] + bterms.B[j][r]) % m
        if products is None:
            h = row.run_naive(h, k * p - 1, (k - 1) * p, prim=prim)
        else:
            for s in range(k * p - 1, k * p - 2 * g - 2, -1):
                h = row.step(h, s, prim=prim)
            mat, den = products[k - 1]
            if den % p == 0:
                raise PrecisionViolation("interval denominator product is not a unit")
            inv = ctx.invert_unit(den)
            h = [x * inv % m for x in mat.matvec(h, m)]
            h = row.step(h, (k - 1) * p, prim=prim)
    if h[0] % ctx.pN != 0:
        raise PrecisionViolation(f"x^-1 coordinate nonzero at end of row t_{j} (i = {i})")
    return h[1:]


def _vertical_fast_matrices(curve: Curve, gen_v: BlockLinMat, cfg) -> list:
    """R_j = M_V(t_{j-1}, t_j) / D_V(t_{j-1}, t_j) for j = 0..N-1 (t_{-1} = 0).

    For j >= 1 the denominator product has valuation exactly 1 and every
    entry of the matrix product is divisible by p; divide_exact asserts it.
    """
    ctx = curve.ctx
    p, N = ctx.p, ctx.N
    t0 = (p - 1) // 2
    ivs = [(0, t0)] + [(t0 + (j - 1) * p, t0 + j * p) for j in range(1, N)]
    prods = interval_products(gen_v, ivs, ctx, cfg)
    out = []
    for mat, den in prods:
        v = ctx.valuation(den)
        m = ctx.modulus
        if v == 0:
            out.append(mat.scale(ctx.invert_unit(den), m))
        elif v == 1:
            out.append(BlockMatVal(
                [[ctx.divide_exact(x, den) for x in rowv] for rowv in mat.A],
                [[ctx.divide_exact(x, den) for x in rowv] for rowv in mat.B],
                [ctx.divide_exact(x, den) for x in mat.diag],
            ))
        else:
            raise ExcessValuation("vertical denominator product divisible by p^2")
    return out


def _compute(curve: Curve, evalset: EvalSet, naive: bool,
             cfg: RecProdConfig | None, collect_prims: bool, threads: int = 1):
    ctx = curve.ctx
    curve.require_precision_bound()
    m, p, g, N, L = ctx.modulus, ctx.p, curve.g, ctx.N, evalset.L
    bterms = frob_terms(curve)
    bez = build_bezout_data(ctx, curve.Q, g)
    if evalset.s_at_x and not evalset.s_at_x[0] and g > 0:
        evalset.s_at_x = [[peval(S, x, m) for S in bez.S] for x in evalset.x]

    prims_rows = [[] for _ in range(2 * g)] if collect_prims else None
    prims_vert = [[] for _ in range(2 * g)] if collect_prims else None

    def row_task(j: int):
        t = (p * (2 * j + 1) - 1) // 2
        gen = horiz_matrix(curve, evalset, t)
        row = _HorizRow(curve, evalset, gen, t)
        if naive:
            products = None
        else:
            k_hi = 2 * g + (2 * g + 1) * j
            ivs = [((k - 1) * p, k * p - 2 * g - 2) for k in range(1, k_hi + 1)]
            products = interval_products(gen, ivs, ctx, cfg)
        vecs = []
        prim_row = []
        for i in range(2 * g):
            prim = {} if collect_prims else None
            vecs.append(_reduce_row(row, bterms, i, j, products, prim))
            prim_row.append(prim)
        return t, vecs, prim_row

    try:
        if threads > 1 and N > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=threads) as ex:
                results = list(ex.map(row_task, range(N)))
        else:
            results = [row_task(j) for j in range(N)]

        rows = [vecs for (_, vecs, _) in results]
        if collect_prims:
            for j, (t, _, prim_row) in enumerate(results):
                for i in range(2 * g):
                    prims_rows[i].append((t, prim_row[i]))

        gen_v = vert_matrix(curve, bez, evalset)
        t0 = (p - 1) // 2
        R = None if naive else _vertical_fast_matrices(curve, gen_v, cfg)

        M_cols, E_rows = [], []
        for i in range(2 * g):
            v = [0] * (2 * g + L)
            for j in range(N - 1, -1, -1):
                hv = apply_correction(rows[j][i], evalset, 2, 2 * g, m)
                v = [(a + b) % m for a, b in zip(v, hv)]
                if naive:
                    lo = 1 if j == 0 else t0 + (j - 1) * p + 1
                    hi = t0 + j * p if j > 0 else t0
                    sink = prims_vert[i] if collect_prims else None
                    for tau in range(hi, lo - 1, -1):
                        v = _vert_step(gen_v, v, tau, ctx, sink, g)
                else:
                    v = R[j].matvec(v, m)
            v = apply_correction(v, evalset, -1, 2 * g, m)
            M_cols.append([ctx.truncate(x) for x in v[: 2 * g]])
            E_rows.append([ctx.truncate(x) for x in v[2 * g:]])
    except (InexactDivision, ExcessValuation) as e:
        raise PrecisionViolation(str(e)) from e

    M = [[M_cols[i][jrow] for i in range(2 * g)] for jrow in range(2 * g)]
    MI = [[(M[a][b] - (1 if a == b else 0)) % ctx.pN for b in range(2 * g)] for a in range(2 * g)]
    det = _det_mod(MI, ctx.pN)
    h_val = min(ctx.valuation(det), N)
    data = ColemanData(curve, evalset, M, E_rows, h_val)
    if collect_prims:
        return data, NaivePrimitives(curve, evalset, bez, prims_rows, prims_vert)
    return data


def make_evalset(curve: Curve, points: list) -> EvalSet:
    """EvalSet from (x, y) residue pairs; S_i(x) tables are filled lazily."""
    bez = build_bezout_data(curve.ctx, curve.Q, curve.g)
    return EvalSet.build(curve, points, bez)


def coleman_data(curve: Curve, evalset: EvalSet | list | None = None,
                 cfg: RecProdConfig | None = None, threads: int = 1) -> ColemanData:
    """Giant-step computation of the Coleman data."""
    evalset = _as_evalset(curve, evalset)
    return _compute(curve, evalset, naive=False, cfg=cfg, collect_prims=False, threads=threads)


def coleman_data_naive(curve: Curve, evalset: EvalSet | list | None = None,
                       collect_primitives: bool = True):
    """Sequential single-step oracle; returns (ColemanData, NaivePrimitives).

    Feasible for small p only: O(Np) steps per basis differential.
    """
    evalset = _as_evalset(curve, evalset)
    out = _compute(curve, evalset, naive=True, cfg=None, collect_prims=collect_primitives)
    return out if collect_primitives else (out, None)


def _as_evalset(curve: Curve, evalset) -> EvalSet:
    if evalset is None:
        evalset = []
    if isinstance(evalset, EvalSet):
        return evalset
    return make_evalset(curve, list(evalset))
