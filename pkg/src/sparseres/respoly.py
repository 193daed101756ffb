"""Output-sensitive computation of (projections of) the resultant polytope.

Vertices of N(Res) are the vectors ``w_T(a) = Σ vol(σ)`` over a-mixed cells
σ of a fine mixed subdivision T.  The vertex oracle picks T so that the
projection of ``w_T`` maximizes a given linear functional, and
:func:`compute_pi` grows an inner approximation Q of the projection Π
until every hyperplane of Q is certified to be a facet of Π.
"""
from __future__ import annotations

import collections
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .arith import QQ, nullspace, primitive_vector, rank, solve, to_fraction
from .errors import DegenerateInput, RetryExhausted, SingularSystem, ZeroDimensional
from .family import SupportFamily
from .geometry import Polytope, _Hull, _dot, convex_hull, int_rank
from .subdivision import (
    LIFT_BOUND,
    MAX_RETRIES,
    cayley_embed,
    lex_combine,
    mixed_subdivision,
)


@dataclass(frozen=True)
class OracleResult:
    """A vertex ``w`` of N(Res) and its projection."""

    w: tuple
    projected: tuple


def _projection(A: SupportFamily, proj) -> tuple:
    """Normalize a projection to a sorted tuple of flat coordinate indices."""
    if proj is None:
        return tuple(range(A.size))
    keep = sorted(set(int(k) for k in proj))
    if not keep or keep[0] < 0 or keep[-1] >= A.size:
        raise DegenerateInput("projection indices out of range")
    return tuple(keep)


def mixed_cell_vector(S) -> tuple:
    """``w_T``: for each support point, the total volume of its mixed cells."""
    A = S.family
    w = [Fraction(0)] * A.size
    for c in S.mixed_cells():
        i = c.mixed_index
        w[A.flat_index(i, c.components[i][0])] += c.volume()
    if any(x.denominator != 1 for x in w):
        raise DegenerateInput("non-integral mixed cell volume")
    return tuple(int(x) for x in w)


class VertexOracle:
    """Vertex oracle for the projection of N(Res) onto coordinates ``proj``.

    ``oracle(nu)`` returns a vertex of Π maximizing ``<nu, ·>``; ties are
    broken by a random functional, so the answer is always a vertex.
    """

    def __init__(self, A: SupportFamily, proj=None, seed: int = 0):
        self.family = A
        self.proj = _projection(A, proj)
        self.rng = random.Random(seed)
        self.cayley = cayley_embed(A)
        self.calls = 0

    def _kept_level(self, values) -> list:
        lv = [0] * self.family.size
        for k, v in zip(self.proj, values):
            lv[k] = v
        return lv

    def __call__(self, nu: Sequence) -> OracleResult:
        if len(nu) != len(self.proj):
            raise ValueError("functional has the wrong length")
        self.calls += 1
        A = self.family
        pts = self.cayley.points
        first = self._kept_level([-to_fraction(x) for x in nu])
        for _ in range(MAX_RETRIES):
            tie = self._kept_level([-self.rng.randrange(LIFT_BOUND) for _ in self.proj])
            generic = [self.rng.randrange(LIFT_BOUND) for _ in pts]
            heights = lex_combine(pts, [first, tie, generic])
            S = mixed_subdivision(A, heights)
            if S.tight and all(c.is_fine() for c in S.cells):
                w = mixed_cell_vector(S)
                return OracleResult(w, tuple(w[k] for k in self.proj))
        raise RetryExhausted("no fine tight subdivision for the vertex oracle")


def homogeneity_matrix(A: SupportFamily) -> list[list[int]]:
    """Rows ``(a; e_i)`` over the support points: ``M w`` is constant on N(Res)."""
    n = A.n
    M = [[] for _ in range(2 * n + 1)]
    for i, Ai in enumerate(A.supports):
        for a in Ai:
            col = list(a) + [1 if k == i else 0 for k in range(n + 1)]
            for r, x in enumerate(col):
                M[r].append(x)
    return M


def projected_directions(A: SupportFamily, proj=None) -> list[tuple]:
    """Integer basis of the direction space of aff(Π)."""
    keep = _projection(A, proj)
    K = nullspace(homogeneity_matrix(A), QQ, A.size)
    rows = [[v[k] for k in keep] for v in K]
    if not rows:
        return []
    basis = []
    for r in rows:
        if rank(basis + [r]) > len(basis):
            basis.append(r)
    return [primitive_vector(b) for b in basis]


def _chart(directions, m):
    """Coordinates on which the direction space projects isomorphically."""
    cols = [[b[c] for b in directions] for c in range(m)]
    chosen, acc = [], []
    for c, col in enumerate(cols):
        if int_rank(acc + [col]) > len(acc):
            acc.append(col)
            chosen.append(c)
    return chosen


@dataclass
class PiStats:
    calls: int = 0
    init_calls: int = 0
    vertices: int = 0
    facets: int = 0

    @property
    def bound(self) -> int:
        return self.vertices + self.facets

    def to_json(self) -> dict:
        return {
            "oracle_calls": self.calls,
            "init_calls": self.init_calls,
            "vertices": self.vertices,
            "facets": self.facets,
            "bound": self.bound,
        }


@dataclass
class PiResult:
    polytope: Polytope
    stats: PiStats
    proj: tuple
    full_vertices: dict = field(default_factory=dict)


class _PiBuilder:
    def __init__(self, A: SupportFamily, proj, seed: int):
        self.oracle = VertexOracle(A, proj, seed)
        self.proj = self.oracle.proj
        self.dirs = projected_directions(A, self.proj)
        self.d = len(self.dirs)
        self.coords = _chart(self.dirs, len(self.proj))
        self.W: dict = {}
        self.found: dict = {}

    def key(self, nu) -> tuple:
        """Canonical form of a functional restricted to aff(Π)."""
        return primitive_vector([_dot(nu, b) for b in self.dirs])

    def extend(self, u_chart) -> list:
        nu = [0] * len(self.proj)
        for c, x in zip(self.coords, u_chart):
            nu[c] = x
        return nu

    def chart(self, v) -> tuple:
        return tuple(v[c] for c in self.coords)

    def call(self, nu) -> OracleResult:
        res = self.oracle(nu)
        k = self.key(nu)
        if any(k):
            self.W[k] = res
        self.found.setdefault(res.projected, res.w)
        return res


def initialize(b: _PiBuilder) -> list:
    """Affinely independent vertices of Π spanning aff(Π)."""
    if b.d == 0:
        res = b.call([0] * len(b.proj))
        raise ZeroDimensional("the projection is a single point", res.projected)
    Q: list = []
    while True:
        if not Q:
            w = [1] + [0] * (b.d - 1)
        else:
            q0 = b.chart(Q[0])
            diffs = [[x - y for x, y in zip(b.chart(q), q0)] for q in Q[1:]]
            if len(Q) == b.d + 1:
                return Q
            null = nullspace(diffs, QQ, b.d) if diffs else [[1] + [0] * (b.d - 1)]
            w = list(primitive_vector(null[0]))
        nu = b.extend(w)
        for sgn in (1, -1):
            v = b.call([sgn * x for x in nu]).projected
            if all(v != q for q in Q) and _outside_span(b, Q, v):
                Q.append(v)
        if not Q:
            raise DegenerateInput("vertex oracle returned nothing")


def _outside_span(b: _PiBuilder, Q, v) -> bool:
    if not Q:
        return True
    q0 = b.chart(Q[0])
    rows = [[x - y for x, y in zip(b.chart(q), q0)] for q in Q[1:]]
    new = [x - y for x, y in zip(b.chart(v), q0)]
    return int_rank(rows + [new]) > len(rows)


def compute_pi(A: SupportFamily, proj=None, seed: int = 0) -> PiResult:
    """The projection Π of the resultant polytope onto coordinates ``proj``.

    Args:
        A: an essential support family.
        proj: flat coordinate indices to keep (all by default).
        seed: seeds the oracle's random tie-breaking.

    Returns:
        A :class:`PiResult` with the polytope and oracle statistics.  The
        reported ``calls`` count the incremental phase only.
    """
    b = _PiBuilder(A, proj, seed)
    stats = PiStats()
    try:
        Q = initialize(b)
    except ZeroDimensional as exc:
        P = convex_hull([exc.point])
        stats.init_calls = b.oracle.calls
        stats.vertices = 1
        return PiResult(P, stats, b.proj, dict(b.found))
    stats.init_calls = b.oracle.calls
    hull = _Hull([b.chart(q) for q in Q])
    points = list(Q)
    queue = collections.deque(sorted(hull.hyperplanes()))
    alive = set(queue)
    while queue:
        H = queue.popleft()
        if H not in alive:
            continue
        u, h = H
        nu = b.extend([-x for x in u])
        if b.key(nu) in b.W:
            continue
        v = b.call(nu).projected
        if _dot(u, b.chart(v)) == h:
            continue
        before = hull.hyperplanes()
        hull.add_point(b.chart(v))
        points.append(v)
        after = hull.hyperplanes()
        alive -= before - after
        new = sorted(after - before)
        alive.update(new)
        queue.extend(new)
    stats.calls = b.oracle.calls - stats.init_calls
    P = convex_hull(points)
    stats.vertices = len(P.vertices)
    stats.facets = len(P.facets)
    full = {v: b.found[v] for v in P.vertices if v in b.found}
    return PiResult(P, stats, b.proj, full)


def brute_force_pi(A: SupportFamily, proj=None, samples: int = 500, seed: int = 0) -> Polytope:
    """Hull of projected ``w_T`` over many random liftings (a test oracle)."""
    keep = _projection(A, proj)
    rng = random.Random(seed)
    pts = set()
    cay = cayley_embed(A)
    for s in range(samples):
        scale = [3, 16, LIFT_BOUND][s % 3]
        coarse = [rng.randrange(scale) for _ in cay.points]
        generic = [rng.randrange(LIFT_BOUND) for _ in cay.points]
        S = mixed_subdivision(A, lex_combine(cay.points, [coarse, generic]))
        if not (S.tight and all(c.is_fine() for c in S.cells)):
            continue
        w = mixed_cell_vector(S)
        pts.add(tuple(w[k] for k in keep))
    return convex_hull(pts)


def preprocess_specialized(A: SupportFamily, specialized) -> tuple[SupportFamily, tuple]:
    """Drop specialized points inside the hull of the other specialized points.

    ``specialized`` lists flat indices whose coefficients are fixed.  Returns
    the reduced family and, for each of its points, the original flat index.
    """
    spec = set(specialized)
    sups, cs, names, kept = [], [], [], []
    for i, Ai in enumerate(A.supports):
        idx = [A.flat_index(i, j) for j in range(len(Ai))]
        sp = [j for j in range(len(Ai)) if idx[j] in spec]
        drop = set()
        if len(sp) > 1:
            H = convex_hull([Ai[j] for j in sp])
            verts = set(H.vertices)
            drop = {j for j in sp if Ai[j] not in verts}
        keep_j = [j for j in range(len(Ai)) if j not in drop]
        sups.append(tuple(Ai[j] for j in keep_j))
        cs.append([A.coeffs[i][j] for j in keep_j])
        names.append([A.names[i][j] for j in keep_j])
        kept += [idx[j] for j in keep_j]
    return SupportFamily(tuple(sups), cs, names, A.xvars), tuple(kept)


def lift_to_full(A: SupportFamily, proj, points, constant=None, seed: int = 0) -> list[tuple]:
    """Recover full vertices of N(Res) from projected ones via ``M w = C``.

    The dropped coordinates must form a nonsingular square block of M; with
    nothing dropped the points are returned unchanged.
    ``constant`` defaults to ``M w`` at one oracle vertex.
    """
    keep = _projection(A, proj)
    M = homogeneity_matrix(A)
    drop = [k for k in range(A.size) if k not in set(keep)]
    if not drop:
        return [tuple(v) for v in points]
    if len(drop) != len(M):
        raise SingularSystem(
            f"{len(drop)} dropped coordinates but {len(M)} homogeneity relations"
        )
    M1 = [[row[k] for k in drop] for row in M]
    if rank(M1) != len(M):
        raise SingularSystem("homogeneity block on the dropped coordinates is singular")
    if constant is None:
        w = VertexOracle(A, None, seed)([0] * A.size).w
        constant = [_dot(row, w) for row in M]
    out = []
    for v in points:
        rhs = [c - sum(row[k] * x for k, x in zip(keep, v)) for row, c in zip(M, constant)]
        X = solve(M1, rhs, QQ)
        full = [0] * A.size
        for k, x in zip(keep, v):
            full[k] = x
        for k, x in zip(drop, X):
            full[k] = int(x) if to_fraction(x).denominator == 1 else to_fraction(x)
        out.append(tuple(full))
    return out
