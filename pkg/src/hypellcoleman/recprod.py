"""Interval products M(a,b) = M(a+1)...M(b) over Z/p^W.

Two routes with bit-identical output:

* ``interval_product_naive``: fold b-a single evaluations (oracle and
  small-size fallback).
* ``interval_products``: baby-step/giant-step.  With beta a power of two,
  values of the block product C_c(x) = M(x+1)...M(x+c) on the canonical
  grid {i*beta} are doubled in c using shifted-evaluation convolutions;
  fractional shifts are always by c/beta, so every Lagrange offset factors
  as 2^e * (odd integer <= 2*beta+1) and stays invertible whenever
  3*beta + 2 < p.  Interval products are then assembled from giant values
  on the per-interval grid {a + i*beta} (one streamed shift of the
  canonical values, which tolerates a single p-divisible offset) plus
  fewer than beta trailing single steps.

Scalar denominators ride along as one extra diagonal-like sequence, so the
product of the D(s) over an interval costs nothing extra.

Convolutions go through Kronecker substitution: pack the residues into one
huge integer, one gmpy2 multiply, unpack.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2

from .padic import PrimeContext
from .redmat import BlockLinMat, BlockMatVal


class NonUnitDenominator(ArithmeticError):
    """A Lagrange shift needs the inverse of a non-unit."""


# ---------------------------------------------------------------------------
# operation counting (used by the scaling tests; counts modular mults, with
# a convolution of sizes (la, lb) charged la + lb, the quasi-linear model)

@dataclass
class OpCounter:
    mults: int = 0

    def bump(self, k: int):
        self.mults += k


_active_counter = OpCounter()


@contextmanager
def count_operations():
    """Swap in a fresh counter and yield it."""
    global _active_counter
    saved = _active_counter
    _active_counter = OpCounter()
    try:
        yield _active_counter
    finally:
        _active_counter = saved


def _mul_cost(m: int, n: int) -> int:
    return m * m * m + n * m * m + 2 * n * m + n


# ---------------------------------------------------------------------------
# convolution and batched inversion

_SCHOOLBOOK_MAX = 24


def _conv(a: list, b: list, m: int) -> list:
    """Linear convolution of residue sequences, entries reduced mod m."""
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return []
    _active_counter.bump(la + lb)
    if min(la, lb) <= _SCHOOLBOOK_MAX:
        out = [0] * (la + lb - 1)
        if la > lb:
            a, b, la, lb = b, a, lb, la
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return [x % m for x in out]
    slot = 2 * (m - 1).bit_length() + min(la, lb).bit_length() + 1
    za = gmpy2.pack(a, slot)
    zb = gmpy2.pack(b, slot)
    res = gmpy2.unpack(za * zb, slot)
    out = [x % m for x in res[: la + lb - 1]]
    if len(out) < la + lb - 1:
        out.extend([0] * (la + lb - 1 - len(out)))
    return out


def _batch_inv(vals: list, m: int) -> list:
    """Inverses of a list of units mod m, one pow call total."""
    n = len(vals)
    pre = [0] * n
    acc = 1
    for i, v in enumerate(vals):
        pre[i] = acc
        acc = acc * v % m
    try:
        inv = pow(acc, -1, m)
    except ValueError as e:
        raise NonUnitDenominator("non-unit among shift denominators") from e
    _active_counter.bump(3 * n)
    out = [0] * n
    for i in range(n - 1, -1, -1):
        out[i] = inv * pre[i] % m
        inv = inv * vals[i] % m
    return out


# ---------------------------------------------------------------------------
# shifting evaluations

class _LagrangeWeights:
    """w_j = (-1)^(d-j) / (j! (d-j)!) for nodes 0..d; needs d < p."""

    def __init__(self, d: int, m: int, p: int):
        if d >= p:
            raise NonUnitDenominator(f"window degree {d} >= p")
        self.d = d
        fact = [1] * (d + 1)
        for i in range(1, d + 1):
            fact[i] = fact[i - 1] * i % m
        inv_fact = [1] * (d + 1)
        inv_fact[d] = pow(fact[d], -1, m)
        for i in range(d, 0, -1):
            inv_fact[i - 1] = inv_fact[i] * i % m
        _active_counter.bump(3 * d)
        self.w = [
            (inv_fact[j] * inv_fact[d - j] if (d - j) % 2 == 0 else m - inv_fact[j] * inv_fact[d - j] % m) % m
            for j in range(d + 1)
        ]

    def weighted(self, vals: list, m: int) -> list:
        _active_counter.bump(len(vals))
        return [v * w % m for v, w in zip(vals, self.w)]


class _WindowShift:
    """Evaluate degree-<=d polynomials, known at unit-spaced nodes 0..d, at
    the points shift + out_start + i for 0 <= i < out_count, where
    shift = num/den.

    All node-independent data (offset inverses, rolling window products) is
    precomputed once and shared by every sequence pushed through ``apply``.
    At most one offset num + k*den may be divisible by p; it is excluded
    from the convolution and restored by a two-term correction.
    """

    def __init__(self, d: int, num: int, den: int, out_start: int, out_count: int,
                 m: int, p: int):
        self.d, self.m = d, m
        self.out_start, self.out_count = out_start, out_count
        lo = out_start - d
        hi = out_start + out_count - 1
        if den % p == 0:
            raise NonUnitDenominator("shift denominator divisible by p")
        # offset numerators num + k*den for k in [lo, hi], reduced mod m
        nur = [0] * (hi - lo + 1)
        v = (num + lo * den) % m
        step = den % m
        for idx in range(hi - lo + 1):
            nur[idx] = v
            v += step
            if v >= m:
                v -= m
        sing = [idx for idx, x in enumerate(nur) if x % p == 0]
        if len(sing) > 1:
            raise NonUnitDenominator("more than one p-divisible shift offset")
        self.sing_k = sing[0] + lo if sing else None
        self.nu_sing = nur[sing[0]] if sing else 0
        units = list(nur)
        if sing:
            units[sing[0]] = 1
        inv = _batch_inv(units, m)
        if sing:
            inv[sing[0]] = 0
        self.e = inv  # indexed by k - lo
        self.lo = lo
        # rolling window products P_i = prod_{j=0..d} nu_{a_i - j}, with the
        # singular offset (if any) left out, times den^-d
        delta = pow(pow(den, -1, m), d, m)
        P = [0] * out_count
        cur = delta
        a0 = out_start
        for k in range(a0 - d, a0 + 1):
            if k != self.sing_k:
                cur = cur * nur[k - lo] % m
        P[0] = cur
        for i in range(1, out_count):
            a = out_start + i
            if a != self.sing_k:
                cur = cur * nur[a - lo] % m
            drop = a - d - 1
            if drop != self.sing_k:
                cur = cur * inv[drop - lo] % m
            P[i] = cur
        _active_counter.bump(d + 3 * out_count)
        self.P = P

    def apply(self, cvals: list) -> list:
        """cvals: the node values already multiplied by Lagrange weights."""
        d, m = self.d, self.m
        conv = _conv(cvals, self.e, m)
        base = self.out_start - self.lo  # = d
        out = [0] * self.out_count
        sing = self.sing_k
        for i in range(self.out_count):
            s = conv[base + i]
            if sing is not None:
                jst = self.out_start + i - sing
                if 0 <= jst <= d:
                    s = (cvals[jst] + self.nu_sing * s) % m
            out[i] = self.P[i] * s % m
        _active_counter.bump(2 * self.out_count)
        return out


def shift_evaluations(values: list, shift, ctx: PrimeContext, out_count: int | None = None) -> list:
    """Values F(shift), ..., F(shift+d) of the degree-<=d object whose values
    F(0..d) are given.  ``values`` may be scalars or nested lists (matrices),
    all of one shape; ``shift`` an int or Fraction.  Exact: bit-identical to
    re-evaluating the interpolating polynomial.
    """
    if not values:
        return []
    d = len(values) - 1
    if out_count is None:
        out_count = d + 1
    sh = Fraction(shift)
    m, p = ctx.modulus, ctx.p

    def flatten(v):
        if not isinstance(v, (list, tuple)):
            return [v]
        out = []
        for x in v:
            out.extend(flatten(x))
        return out

    def reshape(template, flat_iter):
        if not isinstance(template, (list, tuple)):
            return next(flat_iter)
        return [reshape(x, flat_iter) for x in template]

    if d == 0:
        return [values[0] for _ in range(out_count)]
    flat = [flatten(v) for v in values]
    width = len(flat[0])
    wts = _LagrangeWeights(d, m, p)
    ws = _WindowShift(d, sh.numerator, sh.denominator, 0, out_count, m, p)
    cols = []
    for e in range(width):
        seq = [flat[i][e] for i in range(d + 1)]
        cols.append(ws.apply(wts.weighted(seq, m)))
    out = []
    for i in range(out_count):
        out.append(reshape(values[0], iter([cols[e][i] for e in range(width)])))
    return out


# ---------------------------------------------------------------------------
# naive interval product

def interval_product_naive(gen: BlockLinMat, a: int, b: int, ctx: PrimeContext):
    """M(a,b) = M(a+1)...M(b) and the denominator product, by direct fold.
    a = b yields the identity."""
    m = ctx.modulus
    acc = BlockMatVal.identity(gen.m, gen.n)
    den = 1
    cost = _mul_cost(gen.m, gen.n)
    for s in range(a + 1, b + 1):
        acc = acc.mul(gen.at(s, m), m)
        den = den * gen.denom_at(s, m) % m
        _active_counter.bump(cost)
    return acc, den


# ---------------------------------------------------------------------------
# packed sequence storage (12-ish bytes per 90-bit residue instead of a
# 40+ byte int object; the big-p runs hold tens of millions of these)

class _PackedSeq:
    __slots__ = ("n", "bits", "z")

    def __init__(self, vals: list, bits: int):
        self.n = len(vals)
        self.bits = bits
        self.z = gmpy2.pack(vals, bits) if vals else gmpy2.mpz(0)

    def window(self, start: int, count: int) -> list:
        count = min(count, self.n - start)
        piece = (self.z >> (start * self.bits)) & ((gmpy2.mpz(1) << (count * self.bits)) - 1)
        out = gmpy2.unpack(piece, self.bits)
        if len(out) < count:
            out = list(out) + [0] * (count - len(out))
        return out[:count]

    def all(self) -> list:
        return self.window(0, self.n)


class _SeqBuilder:
    """Incrementally build a _PackedSeq without holding all values as ints."""

    __slots__ = ("bits", "z", "n")

    def __init__(self, bits: int):
        self.bits = bits
        self.z = gmpy2.mpz(0)
        self.n = 0

    def extend(self, vals: list):
        if vals:
            self.z |= gmpy2.pack(vals, self.bits) << (self.n * self.bits)
            self.n += len(vals)

    def seq(self) -> _PackedSeq:
        ps = _PackedSeq([], self.bits)
        ps.n = self.n
        ps.z = self.z
        return ps


@dataclass
class RecProdConfig:
    block_size: int | None = None          # power of two; None: auto near sqrt(K)
    min_fast_K: int = 256                  # requests below this go naive
    min_len_blocks: int = 4                # intervals shorter than this many blocks go naive
    store_budget_bytes: int = 2_400_000_000   # caps the canonical grid (block size)
    chunk_budget_bytes: int = 2_000_000_000   # caps the streamed giant-value chunks


DEFAULT_CONFIG = RecProdConfig()


def _bytes_per_value(ctx: PrimeContext) -> int:
    return (ctx.modulus - 1).bit_length() // 8 + 2


def _auto_block_size(K: int, E: int, ctx: PrimeContext, cfg: RecProdConfig) -> int:
    beta = 1
    while beta * beta < K:
        beta *= 2
    bytes_per = _bytes_per_value(ctx)
    # the doubling holds two shifted copies of the top stage alongside fixups
    while beta > 8 and 2 * E * (beta + 1) * bytes_per > cfg.store_budget_bytes:
        beta //= 2
    while beta > 8 and 3 * beta + 3 >= ctx.p:
        beta //= 2
    return beta


class _GiantEngine:
    """Canonical giant-block values for one generator and block size."""

    def __init__(self, gen: BlockLinMat, beta: int, ctx: PrimeContext, cfg: RecProdConfig):
        self.gen = gen
        self.beta = beta
        self.ctx = ctx
        self.cfg = cfg
        self.m = ctx.modulus
        self.p = ctx.p
        self.bits = max(1, (self.m - 1).bit_length())
        self.polys = gen.entry_linpolys() + [gen.denom]
        self.E = len(self.polys)
        # streamed chunk width: larger chunks amortize the degree-beta
        # convolution inputs; capped so E packed chunks fit the budget
        per = self.E * _bytes_per_value(ctx)
        self.chunk = max(beta, min(1 << 26, cfg.chunk_budget_bytes // max(per, 1)))
        self.canon: list[_PackedSeq] = self._build()

    # -- doubling --------------------------------------------------------

    def _build(self) -> list:
        m, beta = self.m, self.beta
        gen = self.gen
        # start at c0 with direct products C_c0(i*beta) = M(i*beta+1)..M(i*beta+c0);
        # the first log2(c0) doubling stages are cheaper as (c0+1)*c0 plain mults
        c = min(32, beta)
        cols: list[list] = [[] for _ in range(self.E)]
        for i in range(c + 1):
            base = i * beta
            acc = gen.at(base + 1, m)
            den = gen.denom_at(base + 1, m)
            for s in range(base + 2, base + c + 1):
                acc = acc.mul(gen.at(s, m), m)
                den = den * gen.denom_at(s, m) % m
            _active_counter.bump(_mul_cost(gen.m, gen.n) * c)
            for e, v in enumerate(acc.entries()):
                cols[e].append(v)
            cols[self.E - 1].append(den)
        seqs = [_PackedSeq(vals, self.bits) for vals in cols]
        while c < beta:
            seqs = self._double(seqs, c)
            c *= 2
        return seqs

    def _double(self, seqs: list, c: int) -> list:
        """From C_c at i = 0..c produce C_2c at i = 0..2c."""
        m, p, beta = self.m, self.p, self.beta
        n_out = 2 * c + 1
        wts = _LagrangeWeights(c, m, p)
        ext = _WindowShift(c, c + 1, 1, 0, c, m, p)
        frac = _WindowShift(c, c, beta, 0, n_out, m, p)
        left, right = [], []
        for e in range(self.E):
            vals = seqs[e].all()
            seqs[e] = None  # free stage input as soon as consumed
            cvals = wts.weighted(vals, m)
            vals_ext = vals + ext.apply(cvals)          # C_c at i = 0..2c
            right.append(_PackedSeq(frac.apply(cvals), self.bits))  # C_c at i*beta + c
            left.append(_PackedSeq(vals_ext, self.bits))
        return self._pointwise(left, right, n_out)

    def _pointwise(self, left: list, right: list, count: int) -> list:
        """index-wise block products C_c(i*beta) * C_c(i*beta + c)."""
        m = self.m
        gen = self.gen
        chunk = 1 << 16
        builders = [_SeqBuilder(self.bits) for _ in range(self.E)]
        cost = _mul_cost(gen.m, gen.n)
        for start in range(0, count, chunk):
            w = min(chunk, count - start)
            lw = list(zip(*[sq.window(start, w) for sq in left]))
            rw = list(zip(*[sq.window(start, w) for sq in right]))
            out_chunk: list[list] = [[] for _ in range(self.E)]
            for i in range(w):
                lrow = lw[i]
                rrow = rw[i]
                a_val = BlockLinMat.from_entry_values(gen, lrow)
                b_val = BlockLinMat.from_entry_values(gen, rrow)
                prod = a_val.mul(b_val, m)
                _active_counter.bump(cost)
                for e, v in enumerate(prod.entries()):
                    out_chunk[e].append(v)
                out_chunk[self.E - 1].append(lrow[self.E - 1] * rrow[self.E - 1] % m)
            for e in range(self.E):
                builders[e].extend(out_chunk[e])
        return [b.seq() for b in builders]

    # -- assembly --------------------------------------------------------

    def interval(self, a: int, b: int):
        """Fold giant values on the grid {a + i*beta} plus trailing singles."""
        m, beta = self.m, self.beta
        gen = self.gen
        length = b - a
        n_giant = length // beta
        acc = BlockMatVal.identity(gen.m, gen.n)
        den = 1
        cost = _mul_cost(gen.m, gen.n)
        chunk = self.chunk
        if n_giant > 0:
            wts = None
            for start in range(0, n_giant, chunk):
                w = min(chunk, n_giant - start)
                if a == 0 and start + w <= self.beta + 1:
                    packs = [None] * self.E
                    direct = True
                else:
                    if wts is None:
                        wts = _LagrangeWeights(beta, m, self.p)
                    ws = _WindowShift(beta, a, beta, start, w, m, self.p)
                    packs = []
                    for sq in self.canon:
                        vals = ws.apply(wts.weighted(sq.all(), m))
                        packs.append(_PackedSeq(vals, self.bits))
                    direct = False
                # fold in small windows so w ints per entry never sit live at once
                sub = 1 << 16
                last = self.E - 1
                for s0 in range(0, w, sub):
                    sw = min(sub, w - s0)
                    if direct:
                        rows = list(zip(*[sq.window(start + s0, sw) for sq in self.canon]))
                    else:
                        rows = list(zip(*[pk.window(s0, sw) for pk in packs]))
                    for row in rows:
                        g_val = BlockLinMat.from_entry_values(gen, row)
                        acc = acc.mul(g_val, m)
                        den = den * row[last] % m
                        _active_counter.bump(cost)
        for s in range(a + n_giant * beta + 1, b + 1):
            acc = acc.mul(gen.at(s, m), m)
            den = den * gen.denom_at(s, m) % m
            _active_counter.bump(cost)
        return acc, den


@dataclass
class IntervalRequest:
    """Sorted non-overlapping intervals sharing one generator."""

    gen: BlockLinMat
    intervals: list

    def __post_init__(self):
        validate_intervals(self.intervals)

    def run(self, ctx: PrimeContext, cfg: "RecProdConfig | None" = None):
        return interval_products(self.gen, self.intervals, ctx, cfg=cfg)


def validate_intervals(intervals: list):
    prev_end = None
    for (a, b) in intervals:
        if a > b or a < 0:
            raise ValueError(f"bad interval ({a}, {b})")
        if prev_end is not None and a < prev_end:
            raise ValueError("intervals must be sorted and non-overlapping")
        prev_end = b


def interval_products(gen: BlockLinMat, intervals: list, ctx: PrimeContext,
                      cfg: RecProdConfig | None = None, force_fast: bool = False):
    """Products M(a,b) and denominator products for sorted non-overlapping
    intervals; giant-step route with naive fallback below the cutoffs.
    Output is bit-identical to the naive fold either way."""
    cfg = cfg or DEFAULT_CONFIG
    validate_intervals(intervals)
    if not intervals:
        return []
    K = max(b for _, b in intervals)
    E = gen.m * gen.m + gen.n * gen.m + gen.n + 1
    beta = cfg.block_size or _auto_block_size(K, E, ctx, cfg)
    fast_ok = force_fast or (K >= cfg.min_fast_K and beta >= 8 and 3 * beta + 3 < ctx.p)
    engine = None
    out = []
    for (a, b) in intervals:
        use_fast = fast_ok and (b - a) >= cfg.min_len_blocks * beta
        if force_fast:
            use_fast = (b - a) >= beta
        if not use_fast:
            out.append(interval_product_naive(gen, a, b, ctx))
            continue
        if engine is None:
            engine = _GiantEngine(gen, beta, ctx, cfg)
        try:
            out.append(engine.interval(a, b))
        except NonUnitDenominator:
            out.append(interval_product_naive(gen, a, b, ctx))
    return out


def interval_products_fast(gen: BlockLinMat, intervals: list, ctx: PrimeContext,
                           cfg: RecProdConfig | None = None):
    """The giant-step route with no size cutoffs (unit conditions permitting);
    used by tests that must exercise the fast machinery."""
    return interval_products(gen, intervals, ctx, cfg=cfg, force_fast=True)
