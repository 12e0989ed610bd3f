import random

import pytest

from hypellcoleman import Curve, InvalidCurve
from hypellcoleman.colemanint import find_point


def random_curve(rng: random.Random, p: int, N: int, g: int) -> Curve:
    """A random monic squarefree-mod-p curve of genus g."""
    while True:
        coeffs = [rng.randrange(p) for _ in range(2 * g + 1)] + [1]
        try:
            return Curve.from_rationals(p, N, coeffs)
        except InvalidCurve:
            continue


def random_points(rng: random.Random, curve: Curve, count: int) -> list:
    """Distinct non-Weierstrass affine points as (x, y) residue pairs."""
    pts = []
    seen = set()
    x = rng.randrange(curve.ctx.p)
    while len(pts) < count:
        P = find_point(curve, x)
        if P.x % curve.ctx.p not in seen:
            seen.add(P.x % curve.ctx.p)
            pts.append((P.x, P.y))
        x = P.x + 1
    return pts


@pytest.fixture
def rng():
    return random.Random(20260809)
