import random
from fractions import Fraction
from pathlib import Path

import pytest
import sympy
from hypothesis import HealthCheck, settings

from sparseres.arith import MultiPoly
from sparseres.elimination import essential_families
from sparseres.family import SupportFamily

settings.register_profile(
    "default", deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

DATA = Path(__file__).parent / "data"

SQUARE = ((0, 0), (0, 1), (1, 0), (1, 1))

# Heights (Cayley order) inducing the diagonal bilinear subdivision whose
# greedy matrix is 8x8; found by search and frozen.
BILINEAR_LIFTING = (4, 6, 3, 5, 7, 5, 3, 1, 0, 6, 0, 6)
QUARTER = (Fraction(1, 4), Fraction(1, 4))


def genres_family():
    return SupportFamily((((0,), (1,), (2,)), ((0,), (2,))),
                         names=[["a0", "a1", "a2"], ["b0", "b1"]])


def genres_resultant():
    """a1²b1b0 + a0²b1² − 2a2a0b1b0 + a2²b0² in the genres variable order."""
    vars = ("a0", "a1", "a2", "b0", "b1")
    return MultiPoly(vars, {
        (0, 2, 0, 1, 1): 1, (2, 0, 0, 0, 2): 1, (1, 0, 1, 1, 1): -2, (0, 0, 2, 2, 0): 1,
    })


def bilinear_family():
    return SupportFamily((SQUARE, SQUARE, SQUARE))


def linear_pair():
    return SupportFamily((((0,), (1,)), ((0,), (1,))))


def trinomial_pair():
    return SupportFamily((((0,), (1,), (2,)), ((0,), (1,), (2,))))


def ures_family(symbolic_rest=False):
    A = SupportFamily(
        (((0, 0), (0, 1), (1, 0)), ((0, 0), (2, 0), (0, 2)), ((0, 0), (1, 0), (0, 1))),
        names=[["u0", "u1", "u2"], ["c0", "c1", "c2"], ["d0", "d1", "d2"]],
    )
    if symbolic_rest:
        return A
    return A.with_coeffs([[None] * 3, [-4, 1, 1], [2, -1, 1]])


def buchberger_family():
    return SupportFamily((((0, 0), (1, 1)), ((0, 0), (1, 2)), ((0, 0), (2, 0))),
                         names=[["c00", "c01"], ["c10", "c11"], ["c20", "c21"]])


BICUBIC = (
    ((0, 0), (0, 1), (1, 0), (0, 2), (2, 0), (0, 3), (3, 0)),
    ((0, 0), (0, 1), (1, 0), (2, 0), (0, 3), (3, 0)),
    ((0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0), (1, 2), (2, 1), (1, 3), (2, 2),
     (3, 1), (2, 3), (3, 2), (3, 3)),
)


def bicubic_family():
    return SupportFamily(BICUBIC)


def three_poly_family():
    """u00 + u01 x, u10 + u11 y, u20 + u21 y."""
    return SupportFamily((((0, 0), (1, 0)), ((0, 0), (0, 1)), ((0, 0), (0, 1))))


def univariate_dense(d0, d1):
    return SupportFamily((tuple((k,) for k in range(d0 + 1)), tuple((k,) for k in range(d1 + 1))))


def sylvester_value(c0, c1, p=None):
    """Classical resultant of two univariate polynomials (coefficients low to high)."""
    x = sympy.Symbol("x")
    f = sum(sympy.Integer(c) * x**k for k, c in enumerate(c0))
    g = sum(sympy.Integer(c) * x**k for k, c in enumerate(c1))
    r = sympy.resultant(f, g, x)
    return int(r) % p if p else int(r)


def full_essential(A):
    fa = essential_families(A)
    return fa.nontrivial and fa.unique_essential == tuple(range(A.n + 1))


def random_small_family(rng: random.Random, max_points: int = 7):
    """A random essential family with |Cay(A)| <= max_points (n = 1 or 2)."""
    while True:
        n = rng.choice([1, 2])
        if n == 1:
            sizes = [rng.randint(2, 4) for _ in range(2)]
            if sum(sizes) > max_points:
                continue
            sups = [rng.sample([(k,) for k in range(5)], s) for s in sizes]
        else:
            sizes = [2, 2, 3]
            rng.shuffle(sizes)
            grid = [(a, b) for a in range(3) for b in range(3)]
            sups = [rng.sample(grid, s) for s in sizes]
        A = SupportFamily(tuple(map(tuple, sups)))
        if full_essential(A):
            return A


@pytest.fixture
def rng():
    return random.Random(12345)
