"""Coherent mixed subdivisions through the Cayley trick."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .arith import field_det, to_fraction
from .errors import RetryExhausted
from .family import SupportFamily
from .geometry import (
    Polytope,
    _Hull,
    _dot,
    _scale_points,
    affine_chart,
    convex_hull,
    int_rank,
    minkowski_points,
    volume,
)

LIFT_BOUND = 2**20
MAX_RETRIES = 16


@dataclass(frozen=True)
class CayleyConfig:
    """Points ``(a, e_i)`` in Z^{2n} with ``e_0 = 0``; ``labels[k] = (i, j)``."""

    points: tuple
    labels: tuple

    def matrix(self):
        """Columns ``(a; 1, e_i)`` as a list of rows (homogenized)."""
        cols = [p[: len(p) // 2] + _unit(i, len(p) // 2 + 1) for p, (i, _) in zip(self.points, self.labels)]
        return [list(r) for r in zip(*cols)]


def _unit(i, m):
    e = [0] * m
    e[i] = 1
    return tuple(e)


def cayley_embed(A: SupportFamily) -> CayleyConfig:
    n = A.n
    pts, labels = [], []
    for i, Ai in enumerate(A.supports):
        e = [0] * n
        if i:
            e[i - 1] = 1
        for j, a in enumerate(Ai):
            pts.append(tuple(a) + tuple(e))
            labels.append((i, j))
    return CayleyConfig(tuple(pts), tuple(labels))


# --------------------------------------------------------------------------
# regular subdivisions


def lex_combine(points: Sequence[Sequence[int]], levels: Sequence[Sequence]) -> list[int]:
    """Collapse lexicographic height levels into one integer height vector.

    The returned heights induce the regular subdivision of ``levels[0]``
    refined by ``levels[1]``, then ``levels[2]``, and so on.
    """
    P, _ = _scale_points(points)
    dim, coords = affine_chart(P)
    C = [[p[c] for c in coords] for p in P]
    maxc = max((abs(x) for p in C for x in p), default=1) or 1
    had = math.isqrt(dim) + 1
    had = (2 * had * maxc) ** dim
    ilevels = []
    for lv in levels:
        fr = [to_fraction(h) for h in lv]
        den = math.lcm(*(h.denominator for h in fr))
        ilevels.append([int(h * den) for h in fr])
    total = ilevels[0]
    for lv in ilevels[1:]:
        maxh = max((abs(h) for h in lv), default=0) or 1
        B = (dim + 2) ** 2 * 2 * maxh * had
        K = 2 * B + 1
        total = [K * a + b for a, b in zip(total, lv)]
    return total


def regular_subdivision(points: Sequence[Sequence], lifting: Sequence,
                        upper: bool = False) -> list[tuple[int, ...]]:
    """Cells (sorted index tuples) of the subdivision induced by the lower hull.

    ``upper=True`` projects the upper hull instead (same as negating the lifting).
    """
    if upper:
        lifting = [-to_fraction(h) for h in lifting]
    if len(points) != len(lifting):
        raise ValueError("one lifting value per point required")
    P, _ = _scale_points(points)
    dim, coords = affine_chart(P)
    if dim == 0:
        return [tuple(range(len(P)))]
    hs = [to_fraction(h) for h in lifting]
    hden = math.lcm(*(h.denominator for h in hs))
    L = [[p[c] for c in coords] + [int(h * hden)] for p, h in zip(P, hs)]
    if int_rank([[a - b for a, b in zip(q, L[0])] for q in L[1:]]) == dim:
        return [tuple(range(len(P)))]
    order = sorted(range(len(L)), key=lambda k: L[k])
    Ls = [L[k] for k in order]
    hull = _Hull(Ls)
    cells = set()
    for u, h in {(u, h) for _, u, h in hull.facets.values()}:
        if u[-1] > 0:
            cells.add(tuple(sorted(order[i] for i, q in enumerate(Ls) if _dot(u, q) == h)))
    return sorted(cells)


# --------------------------------------------------------------------------
# mixed subdivisions


@dataclass(frozen=True)
class MixedCell:
    """``components[i]`` lists indices into ``A_i`` of the points in D_i."""

    components: tuple
    dims: tuple
    family: SupportFamily = field(repr=False, compare=False)

    @property
    def n(self):
        return len(self.components) - 1

    def is_tight(self) -> bool:
        return sum(self.dims) == self.n

    def is_fine(self) -> bool:
        return all(len(c) == d + 1 for c, d in zip(self.components, self.dims))

    @property
    def mixed_index(self):
        """``i`` if the cell is i-mixed, else ``None``."""
        zero = [i for i, d in enumerate(self.dims) if d == 0]
        if len(zero) == 1 and self.is_tight():
            return zero[0]
        return None

    def point_sets(self):
        return [[self.family.supports[i][j] for j in c] for i, c in enumerate(self.components)]

    def polytope(self) -> Polytope:
        return _cell_polytope(self.family.supports, self.components)

    def volume(self) -> Fraction:
        if self.is_tight() and self.is_fine():
            rows = []
            for pts in self.point_sets():
                rows += [[a - b for a, b in zip(p, pts[0])] for p in pts[1:]]
            den = math.prod(math.factorial(d) for d in self.dims)
            return abs(to_fraction(field_det(rows))) / den
        return volume(self.polytope())

    def to_json(self) -> dict:
        mi = self.mixed_index
        return {
            "components": [[list(p) for p in pts] for pts in self.point_sets()],
            "dims": list(self.dims),
            "type": "non-mixed" if mi is None else f"{mi}-mixed",
        }


_cell_cache: dict = {}


def _cell_polytope(supports, components) -> Polytope:
    key = (supports, components)
    P = _cell_cache.get(key)
    if P is None:
        sets = [[supports[i][j] for j in c] for i, c in enumerate(components)]
        P = convex_hull(minkowski_points(sets))
        if len(_cell_cache) > 20000:
            _cell_cache.clear()
        _cell_cache[key] = P
    return P


def _affine_dim(pts) -> int:
    if len(pts) <= 1:
        return 0
    return int_rank([[a - b for a, b in zip(p, pts[0])] for p in pts[1:]])


@dataclass
class MixedSubdivision:
    family: SupportFamily
    lifting: tuple
    cells: list

    @property
    def tight(self) -> bool:
        return all(c.is_tight() for c in self.cells)

    def mixed_cells(self, i: int | None = None):
        return [c for c in self.cells if c.mixed_index is not None and (i is None or c.mixed_index == i)]

    def mixed_volume_sum(self, i: int) -> Fraction:
        return sum((c.volume() for c in self.mixed_cells(i)), Fraction(0))

    def locate(self, x):
        """The unique cell whose interior contains ``x``, else ``None``."""
        x = [to_fraction(c) for c in x]
        for c in self.cells:
            P = c.polytope()
            if all(_dot(u, x) > -o for u, o in P.facets) and P.dim == len(x):
                return c
        return None

    def to_json(self) -> dict:
        return {
            "lifting": [[str(to_fraction(w)) for w in row] for row in _nest(self.family, self.lifting)],
            "tight": self.tight,
            "cells": [c.to_json() for c in self.cells],
        }


def _nest(A: SupportFamily, flat):
    it = iter(flat)
    return [[next(it) for _ in Ai] for Ai in A.supports]


def flatten_lifting(A: SupportFamily, lifting) -> tuple:
    if len(lifting) == A.n + 1 and all(isinstance(r, (list, tuple)) for r in lifting):
        flat = [w for r in lifting for w in r]
    else:
        flat = list(lifting)
    if len(flat) != A.size:
        raise ValueError("lifting must have one value per support point")
    return tuple(flat)


def mixed_subdivision(A: SupportFamily, lifting) -> MixedSubdivision:
    """Mixed subdivision of Δ induced by ``lifting`` (flat in Cayley order or nested)."""
    flat = flatten_lifting(A, lifting)
    cay = cayley_embed(A)
    cells = []
    for cell in regular_subdivision(cay.points, flat):
        comps = [[] for _ in range(A.n + 1)]
        for k in cell:
            i, j = cay.labels[k]
            comps[i].append(j)
        comps = tuple(tuple(c) for c in comps)
        dims = tuple(
            _affine_dim([A.supports[i][j] for j in c]) for i, c in enumerate(comps)
        )
        cells.append(MixedCell(comps, dims, A))
    cells.sort(key=lambda c: c.components)
    return MixedSubdivision(A, flat, cells)


def random_lifting(A: SupportFamily, rng: random.Random, bound: int = LIFT_BOUND) -> tuple:
    return tuple(rng.randrange(bound) for _ in range(A.size))


def generic_mixed_subdivision(A: SupportFamily, rng: random.Random,
                              retries: int = MAX_RETRIES) -> MixedSubdivision:
    """A tight fine mixed subdivision from a random lifting, resampling if needed."""
    for _ in range(retries):
        S = mixed_subdivision(A, random_lifting(A, rng))
        if S.tight and all(c.is_fine() for c in S.cells):
            return S
    raise RetryExhausted("no tight subdivision after resampling")


def refine_check(S_phi: MixedSubdivision, S_psi: MixedSubdivision) -> bool:
    """True iff every cell of S_psi lies in a cell of S_phi componentwise."""
    big = [tuple(set(c) for c in cell.components) for cell in S_phi.cells]
    for cell in S_psi.cells:
        if not any(
            all(set(c) <= B for c, B in zip(cell.components, comps)) for comps in big
        ):
            return False
    return True
