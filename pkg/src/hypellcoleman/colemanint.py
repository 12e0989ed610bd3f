"""Coleman integrals of the basis differentials omega_i = x^i dx/2y.

The basepoint is infinity.  For P in a non-Weierstrass disk, the integral
to infinity of the odd basis differentials satisfies

    (M - I) . (int_{P'}^inf omega_i)_i = (f_i(P'))_i

at the Teichmueller point P' of the disk (Frobenius equivariance), and a
tiny integral connects P to P'.  Weierstrass-disk endpoints contribute zero
from the Weierstrass point itself.  Solving through M - I costs
v_p(det(M - I)) digits of absolute precision; the result carries its own
``abs_prec``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .colemandata import ColemanData, _det_mod, coleman_data, make_evalset
from .curve import Curve
from .padic import PadicValue, padic_add, padic_neg, padic_sub
from .polyring import pderiv, peval


class WeierstrassDisk(ValueError):
    """Teichmueller lift requested in a Weierstrass residue disk."""


class DifferentDisks(ValueError):
    """Tiny integral endpoints reduce to different points."""


class SingularSystem(ArithmeticError):
    """det(M - I) = 0 mod p^N: rerun with higher N for any precision."""


class InvalidPoint(ValueError):
    """Input point not on the curve (or not liftable)."""


@dataclass(frozen=True)
class CurvePoint:
    x: int
    y: int
    at_infinity: bool = False

    def involution(self, m: int) -> "CurvePoint":
        if self.at_infinity:
            return self
        return CurvePoint(self.x, (-self.y) % m)


INFINITY = CurvePoint(0, 0, True)


def lift_point(curve: Curve, x, y) -> CurvePoint:
    """Build a point with y^2 = Q(x) holding exactly mod p^W.

    Accepts ints, Fractions or rational strings.  A point given to lower
    precision is Hensel-corrected inside its residue disk: for unit y the
    y-coordinate is recomputed from Q(x); for y = 0 mod p the x-coordinate
    is moved onto the solution of Q(x) = y^2 near the Weierstrass root.
    """
    ctx = curve.ctx
    m = ctx.modulus
    try:
        xr = ctx.reduce(x if isinstance(x, (int, Fraction)) else Fraction(str(x)))
        yr = ctx.reduce(y if isinstance(y, (int, Fraction)) else Fraction(str(y)))
    except ValueError as e:
        raise InvalidPoint(str(e)) from e
    qx = curve.q_at(xr)
    if (yr * yr - qx) % ctx.p != 0:
        raise InvalidPoint("y^2 != Q(x) mod p")
    if yr % ctx.p != 0:
        if (yr * yr - qx) % m != 0:
            yr = ctx.sqrt_unit(qx, yr % ctx.p)
        return CurvePoint(xr, yr)
    # Weierstrass residue disk: correct x so that Q(x) = y^2 exactly
    dQ = pderiv(curve.Q, m)
    y2 = yr * yr % m
    xc = xr
    for _ in range(ctx.W + 2):
        f = (curve.q_at(xc) - y2) % m
        if f == 0:
            break
        xc = (xc - f * ctx.invert_unit(peval(dQ, xc, m))) % m
    if (curve.q_at(xc) - y2) % m != 0:
        raise InvalidPoint("point does not lift (no curve point near the given one)")
    return CurvePoint(xc, yr)


def classify_disk(curve: Curve, P: CurvePoint):
    """('nonweierstrass', None) | ('weierstrass', root) | ('infinity', None)."""
    ctx = curve.ctx
    if P.at_infinity:
        return ("infinity", None)
    if P.y % ctx.p != 0:
        return ("nonweierstrass", None)
    m = ctx.modulus
    dQ = pderiv(curve.Q, m)
    r = P.x % ctx.p
    for _ in range(ctx.W + 2):
        f = curve.q_at(r)
        if f == 0:
            break
        r = (r - f * ctx.invert_unit(peval(dQ, r, m))) % m
    return ("weierstrass", r)


def teichmuller(curve: Curve, P: CurvePoint) -> CurvePoint:
    """The unique Frobenius-fixed point in P's residue disk: x^p = x and
    y = Hensel root of Q(x) agreeing with y(P) mod p."""
    ctx = curve.ctx
    if P.at_infinity or P.y % ctx.p == 0:
        raise WeierstrassDisk("Teichmueller point needs a non-Weierstrass disk")
    m = ctx.modulus
    x = P.x % ctx.p
    for _ in range(ctx.W):
        x = pow(x, ctx.p, m)
    if pow(x, ctx.p, m) != x:
        raise ArithmeticError("Teichmueller iteration did not stabilize")
    y = ctx.sqrt_unit(curve.q_at(x), P.y % ctx.p)
    return CurvePoint(x, y)


# ---------------------------------------------------------------------------
# truncated power series helpers (dense lists mod p^W, n terms)

def _ser_mul(a: list, b: list, n: int, m: int) -> list:
    out = [0] * n
    for i, ai in enumerate(a[:n]):
        if ai:
            for j, bj in enumerate(b[: n - i]):
                out[i + j] = (out[i + j] + ai * bj) % m
    return out


def _ser_inv(a: list, n: int, ctx) -> list:
    m = ctx.modulus
    i0 = ctx.invert_unit(a[0])
    out = [i0] + [0] * (n - 1)
    for k in range(1, n):
        s = 0
        for i in range(1, min(k, len(a) - 1) + 1):
            s += a[i] * out[k - i]
        out[k] = (-i0 * s) % m
    return out


def _ser_sqrt_one(a: list, n: int, ctx) -> list:
    """sqrt of a series with constant term 1, taking the root with constant 1."""
    m = ctx.modulus
    inv2 = ctx.inv_small(2)
    out = [1] + [0] * (n - 1)
    for k in range(1, n):
        s = a[k] if k < len(a) else 0
        for i in range(1, k):
            s -= out[i] * out[k - i]
        out[k] = s % m * inv2 % m
    return out


def _taylor_shift(coeffs: list, x0: int, m: int) -> list:
    """Coefficients of f(x0 + u) in u, by repeated Horner shifts."""
    c = [v % m for v in coeffs]
    n = len(c)
    for k in range(n - 1):
        for j in range(n - 2, k - 1, -1):
            c[j] = (c[j] + c[j + 1] * x0) % m
    return c


def _series_terms(ctx) -> int:
    """Least m_max with (m_max+1) - floor(log_p(m_max+1)) >= N, plus 1:
    the number of integrand terms kept so each discarded integrated term has
    valuation >= N at endpoints with v_p >= 1."""
    p, N = ctx.p, ctx.N
    mm = N - 1
    while True:
        k, ilog = mm + 1, 0
        q = p
        while q <= k:
            q *= p
            ilog += 1
        if k - ilog >= N:
            return mm + 1
        mm += 1


def tiny_integrals(curve: Curve, P: CurvePoint, Pp: CurvePoint, nterms: int | None = None) -> list:
    """(int_P^Pp omega_i)_i for P, Pp in one residue disk, as residues mod p^W
    correct mod p^N, by formal integration of the local expansion."""
    ctx = curve.ctx
    m = ctx.modulus
    p = ctx.p
    g = curve.g
    if P.at_infinity or Pp.at_infinity:
        raise DifferentDisks("tiny integrals need finite points")
    if (P.x - Pp.x) % p != 0 or (P.y - Pp.y) % p != 0:
        raise DifferentDisks("endpoints reduce to different points")
    n = nterms or _series_terms(ctx)
    if n >= p:
        raise ValueError("series truncation reaches non-unit divisors (p too small)")
    out = []
    if P.y % p != 0:
        # local coordinate u = x - x(P); y(u) = y(P) sqrt(Q(x(P)+u)/Q(x(P)))
        qshift = _taylor_shift(curve.Q, P.x, m)[: n]
        q0inv = ctx.invert_unit(qshift[0])
        T = [v * q0inv % m for v in qshift]
        s = _ser_sqrt_one(T, n, ctx)
        inv_2y = ctx.invert_unit(2 * P.y % m)
        base = [v * inv_2y % m for v in _ser_inv(s, n, ctx)]  # 1/(2y(u))
        u_end = (Pp.x - P.x) % m
        xpow = [1] + [0] * (n - 1)  # (x(P) + u)^i
        for i in range(2 * g):
            if i > 0:
                xpow = _ser_mul(xpow, [P.x, 1], n, m)
            integrand = _ser_mul(xpow, base, n, m)
            out.append(_integrate_eval(integrand, u_end, ctx))
        return out
    # Weierstrass disk: local coordinate v = y - y(P); x(v) solves Q(x) = (y(P)+v)^2
    dQ = pderiv(curve.Q, m)
    y2ser = [P.y * P.y % m, 2 * P.y % m, 1]
    xser = [P.x] + [0] * (n - 1)
    steps = 1
    while (1 << steps) < n + 1:
        steps += 1
    for _ in range(steps + 1):
        qx = _ser_eval_poly(curve.Q, xser, n, m)
        f = [(a - (y2ser[k] if k < 3 else 0)) % m for k, a in enumerate(qx)]
        dq = _ser_eval_poly(dQ, xser, n, m)
        corr = _ser_mul(f, _ser_inv(dq, n, ctx), n, m)
        xser = [(a - b) % m for a, b in zip(xser, corr)]
    v_end = (Pp.y - P.y) % m
    base = _ser_inv(_ser_eval_poly(dQ, xser, n, m), n, ctx)  # 1/Q'(x(v)), from dx/2y = dy/Q'(x)
    xpow = [1] + [0] * (n - 1)
    for i in range(2 * g):
        if i > 0:
            xpow = _ser_mul(xpow, xser, n, m)
        integrand = _ser_mul(xpow, base, n, m)
        out.append(_integrate_eval(integrand, v_end, ctx))
    return out


def _ser_eval_poly(poly: list, xser: list, n: int, m: int) -> list:
    """poly(xser) as a truncated series (Horner over series)."""
    acc = [0] * n
    for c in reversed(poly):
        acc = _ser_mul(acc, xser, n, m)
        acc[0] = (acc[0] + c) % m
    return acc


def _integrate_eval(series: list, end: int, ctx) -> int:
    """Integral from 0 of a truncated series, evaluated at ``end``."""
    m = ctx.modulus
    acc = 0
    for k in range(len(series) - 1, -1, -1):
        acc = (acc * end + series[k] * ctx.inv_small(k + 1)) % m
    return acc * end % m


@dataclass
class IntegralResult:
    values: list  # 2g PadicValue
    abs_prec: int


def _solve_m_minus_i(data: ColemanData, rhs: list) -> tuple[list, int]:
    """w with (M - I) w = rhs over Q_p, via the adjugate; returns mantissas
    (value_i = mantissa_i / p^h) and h = v_p(det(M - I))."""
    curve = data.curve
    ctx = curve.ctx
    n = 2 * curve.g
    pN = ctx.pN
    MI = [[(data.M[a][b] - (1 if a == b else 0)) % pN for b in range(n)] for a in range(n)]
    det = _det_mod(MI, pN)
    h = ctx.valuation(det)
    if h >= ctx.N:
        raise SingularSystem(
            "det(M - I) = 0 mod p^N; rerun with higher precision N"
        )
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[MI[r][c] for c in range(n) if c != i] for r in range(n) if r != j]
            cof = _det_mod(minor, pN) if n > 1 else 1
            adj[i][j] = (-cof if (i + j) % 2 else cof) % pN
    u = det // ctx.p ** h
    uinv = pow(u, -1, pN)
    mant = [sum(adj[i][j] * rhs[j] for j in range(n)) % pN * uinv % pN for i in range(n)]
    return mant, h


def integrals_to_infinity(data: ColemanData, P: CurvePoint) -> IntegralResult:
    """(int_P^inf omega_i)_i.  Weierstrass-disk endpoints need no column in
    the Coleman data; non-Weierstrass ones must have their Teichmueller
    point among the evaluation points."""
    curve = data.curve
    ctx = curve.ctx
    g = curve.g
    N = ctx.N
    kind, root = classify_disk(curve, P)
    if kind == "infinity":
        return IntegralResult([PadicValue(0, 0, N)] * (2 * g), N)
    if kind == "weierstrass":
        wpt = CurvePoint(root, 0)
        tiny = tiny_integrals(curve, P, wpt)
        return IntegralResult([PadicValue(ctx.truncate(v), 0, N) for v in tiny], N)
    Pp = teichmuller(curve, P)
    col = None
    for l in range(data.evalset.L):
        if data.evalset.x[l] == Pp.x and data.evalset.y[l] == Pp.y:
            col = l
            break
    if col is None:
        raise ValueError("Teichmueller point of the disk is not among the evaluation points")
    rhs = [data.E[i][col] for i in range(2 * g)]
    mant, h = _solve_m_minus_i(data, rhs)
    inf_part = [PadicValue(v % ctx.p ** N, h, N - h).normalized(ctx.p) for v in mant]
    tiny = tiny_integrals(curve, P, Pp)
    vals = [
        padic_add(ctx.p, PadicValue(ctx.truncate(t), 0, N), w)
        for t, w in zip(tiny, inf_part)
    ]
    return IntegralResult(vals, N - h)


def coleman_data_for_points(curve: Curve, points: list, cfg=None, threads: int = 1) -> ColemanData:
    """Coleman data with evaluations at the Teichmueller points of the
    non-Weierstrass disks among ``points`` (deduplicated)."""
    teichs = []
    seen = set()
    for P in points:
        if P.at_infinity or P.y % curve.ctx.p == 0:
            continue
        T = teichmuller(curve, P)
        key = (T.x % curve.ctx.p, T.y % curve.ctx.p)
        if key not in seen:
            seen.add(key)
            teichs.append((T.x, T.y))
    return coleman_data(curve, make_evalset(curve, teichs), cfg=cfg, threads=threads)


def integrate_with_data(data: ColemanData, P: CurvePoint, Q: CurvePoint) -> IntegralResult:
    """(int_P^Q omega_i)_i = (int_P^inf) - (int_Q^inf), componentwise."""
    ctx = data.curve.ctx
    IP = integrals_to_infinity(data, P)
    IQ = integrals_to_infinity(data, Q)
    vals = [padic_sub(ctx.p, a, b) for a, b in zip(IP.values, IQ.values)]
    return IntegralResult(vals, min(IP.abs_prec, IQ.abs_prec))


def integrate(curve: Curve, P: CurvePoint, Q: CurvePoint, cfg=None, threads: int = 1) -> IntegralResult:
    """One-shot integral between two points (builds the Coleman data)."""
    data = coleman_data_for_points(curve, [P, Q], cfg=cfg, threads=threads)
    return integrate_with_data(data, P, Q)


def combine(result: IntegralResult, coeffs: list, ctx) -> PadicValue:
    """The integral of sum_i a_i omega_i as the dot product with (a_i)."""
    acc = PadicValue(0, 0, result.abs_prec)
    for a, v in zip(coeffs, result.values):
        ar = ctx.reduce(a)
        term = PadicValue(ar * v.mantissa % ctx.p ** (v.abs_prec + v.shift), v.shift, v.abs_prec)
        acc = padic_add(ctx.p, acc, term)
    return acc


def find_point(curve: Curve, start_x: int = 0) -> CurvePoint:
    """First point with unit y at x = start_x, start_x + 1, ... (test helper)."""
    ctx = curve.ctx
    for x in range(start_x, start_x + 10 * ctx.p + 10):
        q = curve.q_at(x)
        if q % ctx.p == 0:
            continue
        r = ctx.sqrt_mod_p(q)
        if r is not None:
            return CurvePoint(x % ctx.modulus, ctx.sqrt_unit(q, r))
    raise ValueError("no affine point with unit y found")
