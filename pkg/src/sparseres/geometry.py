"""Exact lattice polytope geometry.

The hull engine is an integer beneath-and-beyond insertion over points taken
in lexicographic order.  Rational inputs are scaled to integers first and
lower-dimensional inputs are handled in a coordinate chart of their affine
hull.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .arith import field_det, int_det, nullspace, primitive_vector, solve, to_fraction
from .errors import DegenerateInput


# --------------------------------------------------------------------------
# integer helpers


def int_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank of an integer matrix by fraction-free elimination."""
    m = [list(r) for r in rows if any(r)]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pr = m[r]
        for i in range(r + 1, len(m)):
            a = m[i][c]
            if a:
                ri = m[i]
                m[i] = [x * pr[c] - a * y for x, y in zip(ri, pr)]
        r += 1
        if r == len(m):
            break
    return r


def _independent_rows(rows: Sequence[Sequence[int]]) -> list[int]:
    """Indices of a greedy maximal independent subset of rows."""
    chosen: list[int] = []
    basis: list[list[int]] = []
    for i, row in enumerate(rows):
        if int_rank(basis + [list(row)]) > len(basis):
            basis.append(list(row))
            chosen.append(i)
    return chosen


def _scale_points(points) -> tuple[list[tuple[int, ...]], int]:
    fr = [[to_fraction(x) for x in p] for p in points]
    den = math.lcm(*(x.denominator for p in fr for x in p)) if fr and fr[0] else 1
    return [tuple(int(x * den) for x in p) for p in fr], den


def _diff(p, q):
    return [a - b for a, b in zip(p, q)]


def _dot(u, x):
    return sum(a * b for a, b in zip(u, x))


def hyperplane_normal(pts: Sequence[Sequence[int]]) -> list[int]:
    """Primitive integer normal of the hyperplane through d points of Z^d."""
    p0 = pts[0]
    D = [_diff(p, p0) for p in pts[1:]]
    d = len(p0)
    u = []
    for j in range(d):
        minor = [r[:j] + r[j + 1:] for r in D]
        u.append((-1) ** j * int_det(minor))
    g = math.gcd(*u)
    if g == 0:
        raise ValueError("points are affinely dependent")
    return [x // g for x in u]


# --------------------------------------------------------------------------
# beneath-and-beyond


class _Hull:
    """Full-dimensional hull of integer points in Z^d (d >= 1).

    ``facets`` maps id -> (vertex index tuple, inward normal, level) with
    ``<normal, x> >= level`` valid on the hull.  ``simplices`` is the placing
    triangulation of the inserted points.
    """

    def __init__(self, P: Sequence[Sequence[int]]):
        self.P = [list(p) for p in P]
        d = len(self.P[0])
        self.d = d
        simplex = [0]
        rows: list[list[int]] = []
        for k in range(1, len(self.P)):
            if len(simplex) == d + 1:
                break
            cand = rows + [_diff(self.P[k], self.P[0])]
            if int_rank(cand) == len(cand):
                rows = cand
                simplex.append(k)
        if len(simplex) != d + 1:
            raise DegenerateInput("points are not full-dimensional")
        self.center = [sum(self.P[i][c] for i in simplex) for c in range(d)]
        self.facets: dict[int, tuple] = {}
        self.ridges: dict[tuple, set] = {}
        self._next = 0
        self.simplices = [tuple(simplex)]
        self.inserted = list(simplex)
        for k in range(d + 1):
            self._add_facet(tuple(simplex[:k] + simplex[k + 1:]))
        in_simplex = set(simplex)
        for q in range(len(self.P)):
            if q not in in_simplex:
                self._insert(q)

    def _add_facet(self, verts):
        verts = tuple(sorted(verts))
        pts = [self.P[i] for i in verts]
        u = hyperplane_normal(pts)
        h = _dot(u, pts[0])
        if _dot(u, self.center) < (self.d + 1) * h:
            u = [-x for x in u]
            h = -h
        fid = self._next
        self._next += 1
        self.facets[fid] = (verts, tuple(u), h)
        for k in range(len(verts)):
            self.ridges.setdefault(verts[:k] + verts[k + 1:], set()).add(fid)

    def _remove_facet(self, fid):
        verts = self.facets.pop(fid)[0]
        for k in range(len(verts)):
            r = verts[:k] + verts[k + 1:]
            s = self.ridges[r]
            s.discard(fid)
            if not s:
                del self.ridges[r]

    def _insert(self, q):
        x = self.P[q]
        visible = [f for f, (_, u, h) in self.facets.items() if _dot(u, x) < h]
        if not visible:
            return
        vis = set(visible)
        horizon = []
        for f in visible:
            verts = self.facets[f][0]
            for k in range(len(verts)):
                r = verts[:k] + verts[k + 1:]
                if any(g not in vis for g in self.ridges[r]):
                    horizon.append(r)
        for f in visible:
            self.simplices.append(tuple(sorted(self.facets[f][0] + (q,))))
            self._remove_facet(f)
        for r in horizon:
            self._add_facet(r + (q,))
        self.inserted.append(q)

    def add_point(self, p) -> int:
        """Insert a new point; returns its index."""
        self.P.append(list(p))
        q = len(self.P) - 1
        self._insert(q)
        return q

    def hyperplanes(self) -> set:
        return {(u, h) for _, u, h in self.facets.values()}

    def grouped(self) -> dict:
        """Map (normal, level) -> sorted tuple of point indices on that facet."""
        out: dict = {}
        for u, h in {(u, h) for _, u, h in self.facets.values()}:
            out[(u, h)] = tuple(i for i, p in enumerate(self.P) if _dot(u, p) == h)
        return out


# --------------------------------------------------------------------------
# charts for lower-dimensional inputs


def affine_chart(P: Sequence[Sequence[int]]):
    """Return ``(dim, coords)`` where ``coords`` are coordinate indices on which
    the projection of the affine hull of P is injective."""
    if len(P) <= 1:
        return 0, []
    diffs = [_diff(p, P[0]) for p in P[1:]]
    dim = int_rank(diffs)
    if dim == 0:
        return 0, []
    cols = [list(c) for c in zip(*diffs)]
    coords = _independent_rows(cols)
    return dim, coords


def affine_equations(P: Sequence[Sequence[int]]) -> list[tuple[tuple[int, ...], int]]:
    """Integer equations ``<e, x> = c`` cutting out the affine hull of P."""
    D = len(P[0])
    diffs = [_diff(p, P[0]) for p in P[1:]]
    if not diffs or not any(any(r) for r in diffs):
        basis = [[1 if i == j else 0 for i in range(D)] for j in range(D)]
    else:
        basis = nullspace(diffs, ncols=D)
    out = []
    for v in basis:
        e = primitive_vector(v)
        out.append((e, _dot(e, P[0])))
    return out


# --------------------------------------------------------------------------
# Polytope


class Polytope:
    """Exact polytope with V- and H-representations.

    ``facets`` holds pairs ``(normal, offset)`` meaning ``<normal, x> >= -offset``
    with primitive integer normals.  For lower-dimensional polytopes the
    ``equations`` ``(normal, offset)`` mean ``<normal, x> = -offset`` and the
    facet normals are only meaningful modulo those equations.
    """

    __slots__ = ("vertices", "facets", "equations", "dim", "ambient", "triangulation")

    def __init__(self, vertices, facets, equations, dim, ambient, triangulation):
        self.vertices = [tuple(v) for v in vertices]
        self.facets = [(tuple(u), o) for u, o in facets]
        self.equations = [(tuple(u), o) for u, o in equations]
        self.dim = dim
        self.ambient = ambient
        self.triangulation = [tuple(s) for s in triangulation]

    def __repr__(self):
        return f"Polytope(dim={self.dim}, vertices={len(self.vertices)}, facets={len(self.facets)})"

    def __eq__(self, other):
        return (
            isinstance(other, Polytope)
            and self.ambient == other.ambient
            and sorted(self.vertices) == sorted(other.vertices)
        )

    def __hash__(self):
        return hash(tuple(sorted(self.vertices)))

    def is_empty(self) -> bool:
        return not self.vertices

    def contains(self, x) -> bool:
        x = [to_fraction(c) for c in x]
        if self.is_empty():
            return False
        return all(_dot(u, x) >= -o for u, o in self.facets) and all(
            _dot(u, x) == -o for u, o in self.equations
        )

    def translate(self, t) -> "Polytope":
        t = [to_fraction(c) for c in t]
        shift = lambda u: _dot(u, t)  # noqa: E731
        return Polytope(
            [tuple(_norm_frac(a + b) for a, b in zip(v, t)) for v in self.vertices],
            [(u, _norm_frac(o - shift(u))) for u, o in self.facets],
            [(u, _norm_frac(o - shift(u))) for u, o in self.equations],
            self.dim, self.ambient, self.triangulation,
        )

    def to_json(self) -> dict:
        return {
            "vertices": [[_jnum(c) for c in v] for v in self.vertices],
            "facets": [{"normal": list(u), "offset": _jnum(o)} for u, o in self.facets],
            "equations": [{"normal": list(u), "offset": _jnum(o)} for u, o in self.equations],
            "dim": self.dim,
            "triangulation": [list(s) for s in self.triangulation],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Polytope":
        verts = [tuple(_parse_num(c) for c in v) for v in data["vertices"]]
        if "facets" not in data or "dim" not in data:
            return convex_hull(verts)
        ambient = len(verts[0]) if verts else len(data["facets"][0]["normal"])
        return cls(
            verts,
            [(f["normal"], _parse_num(f["offset"])) for f in data["facets"]],
            [(f["normal"], _parse_num(f["offset"])) for f in data.get("equations", [])],
            data["dim"], ambient, data.get("triangulation", []),
        )


def _norm_frac(x):
    x = to_fraction(x)
    return x.numerator if x.denominator == 1 else x


def _jnum(x):
    x = to_fraction(x)
    return x.numerator if x.denominator == 1 else str(x)


def _parse_num(x):
    if isinstance(x, int):
        return x
    return _norm_frac(Fraction(str(x)))


def _full_hull_facets(P):
    """Run the hull on full-dimensional integer points; return hull object."""
    return _Hull(P)


def convex_hull(points: Iterable[Sequence]) -> Polytope:
    """Convex hull with vertices, facets, affine equations and a triangulation."""
    pts = sorted({tuple(_norm_frac(c) for c in p) for p in points})
    if not pts:
        raise DegenerateInput("convex hull of no points")
    D = len(pts[0])
    P, den = _scale_points(pts)
    dim, coords = affine_chart(P)
    eqs = [(e, Fraction(-c, den)) for e, c in affine_equations(P)] if dim < D else []
    eqs = [(e, _norm_frac(o)) for e, o in eqs]
    if dim == 0:
        return Polytope([pts[0]], [], eqs, 0, D, [(0,)])
    C = [[p[c] for c in coords] for p in P]
    hull = _Hull(C)
    groups = hull.grouped()
    facets = []
    for (u, h), _ in sorted(groups.items()):
        full = [0] * D
        for c, x in zip(coords, u):
            full[c] = x
        facets.append((tuple(full), _norm_frac(Fraction(-h, den))))
    # vertices: inserted points whose tight normals have full rank
    vidx = []
    for i in sorted(hull.inserted):
        tight = [list(u) for (u, h) in groups if _dot(u, C[i]) == h]
        if int_rank(tight) == dim:
            vidx.append(i)
    verts = [pts[i] for i in vidx]
    tri = _Hull([C[i] for i in vidx]).simplices
    facets.sort()
    return Polytope(verts, facets, eqs, dim, D, sorted(tri))


def volume(P: Polytope) -> Fraction:
    """Euclidean volume (0 unless full-dimensional)."""
    if P.is_empty() or P.dim < P.ambient:
        return Fraction(0)
    V = [[to_fraction(c) for c in v] for v in P.vertices]
    total = Fraction(0)
    for s in P.triangulation:
        rows = [_diff(V[k], V[s[0]]) for k in s[1:]]
        total += abs(to_fraction(field_det(rows)))
    return total / math.factorial(P.dim)


def simplex_volume(pts: Sequence[Sequence]) -> Fraction:
    rows = [_diff(p, pts[0]) for p in pts[1:]]
    return abs(to_fraction(field_det(rows))) / math.factorial(len(rows))


def minkowski_sum(P, Q) -> Polytope:
    Pv = P.vertices if isinstance(P, Polytope) else list(P)
    Qv = Q.vertices if isinstance(Q, Polytope) else list(Q)
    if Pv and Qv and len(Pv[0]) != len(Qv[0]):
        raise DegenerateInput("Minkowski sum of different ambient dimensions")
    return convex_hull(
        tuple(_norm_frac(to_fraction(a) + to_fraction(b)) for a, b in zip(p, q))
        for p in Pv for q in Qv
    )


def minkowski_points(sets: Sequence[Sequence[Sequence]]) -> list:
    """Pointwise sums of point sets, pruned to hull vertices after each step."""
    acc = [tuple(0 for _ in sets[0][0])]
    for S in sets:
        acc = convex_hull(tuple(a + b for a, b in zip(p, q)) for p in acc for q in S).vertices
    return acc


@lru_cache(maxsize=4096)
def _vol_of_sum(key: tuple) -> Fraction:
    return volume(convex_hull(minkowski_points([list(s) for s in key])))


def _as_pointset(P) -> tuple:
    pts = P.vertices if isinstance(P, Polytope) else P
    return tuple(sorted(tuple(_norm_frac(c) for c in p) for p in pts))


def mixed_volume(polys: Sequence) -> Fraction:
    """Mixed volume by inclusion-exclusion, normalized so MV(P,...,P) = n! Vol(P).

    Arguments may be Polytopes or point sets.
    """
    n = len(polys)
    if n == 0:
        return Fraction(1)
    sets = [_as_pointset(P) for P in polys]
    if any(len(s[0]) != n for s in sets):
        raise DegenerateInput("mixed volume needs n polytopes in dimension n")
    total = Fraction(0)
    for k in range(1, n + 1):
        sign = (-1) ** (n - k)
        for S in itertools.combinations(range(n), k):
            key = tuple(sorted(sets[i] for i in S))
            total += sign * _vol_of_sum(key)
    return total


def mixed_volume_minus(supports: Sequence, i: int) -> int:
    """MV_{-i}: mixed volume of all supports except the i-th."""
    v = mixed_volume([A for k, A in enumerate(supports) if k != i])
    assert v.denominator == 1
    return v.numerator


def lattice_points(P: Polytope, shift=None) -> list[tuple[int, ...]]:
    """Integer points of ``P + shift`` in lexicographic order."""
    if P.is_empty():
        return []
    if shift is not None:
        P = P.translate(shift)
    lo = [math.floor(min(to_fraction(v[k]) for v in P.vertices)) for k in range(P.ambient)]
    hi = [math.ceil(max(to_fraction(v[k]) for v in P.vertices)) for k in range(P.ambient)]
    out = []
    for x in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
        if all(_dot(u, x) >= -o for u, o in P.facets) and all(
            _dot(u, x) == -o for u, o in P.equations
        ):
            out.append(x)
    return out


def polytope_from_inequalities(facets: Sequence[tuple], box: int | None = None) -> list:
    """Lattice points of ``{m : <u_j, m> >= -a_j}`` (bounded case).

    The bounding box is derived from LP-free reasoning: each coordinate is
    bounded using pairs of opposite-signed normals when available, otherwise
    via the explicit ``box`` fallback.
    """
    from .errors import Unbounded

    if not facets:
        raise Unbounded("no inequalities")
    n = len(facets[0][0])
    verts = inequality_vertices(facets)
    if verts is None:
        raise Unbounded("inequalities do not define a bounded polytope")
    if not verts:
        return []
    lo = [math.floor(min(v[k] for v in verts)) for k in range(n)]
    hi = [math.ceil(max(v[k] for v in verts)) for k in range(n)]
    out = []
    for x in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
        if all(_dot(u, x) >= -a for u, a in facets):
            out.append(x)
    return out


def inequality_vertices(facets: Sequence[tuple]):
    """Vertices of ``{m : <u_j, m> >= -a_j}`` by enumerating n-subsets.

    Returns ``None`` if the region is unbounded (normals do not positively
    span), ``[]`` if empty.
    """
    n = len(facets[0][0])
    normals = [list(u) for u, _ in facets]
    if int_rank(normals) < n or not _positively_spanning(normals):
        return None
    verts = set()
    for S in itertools.combinations(range(len(facets)), n):
        A = [list(facets[j][0]) for j in S]
        if int_rank(A) < n:
            continue
        x = solve(A, [-to_fraction(facets[j][1]) for j in S])
        x = tuple(to_fraction(c) for c in x)
        if all(_dot(u, x) >= -to_fraction(a) for u, a in facets):
            verts.add(x)
    return sorted(verts)


def _positively_spanning(normals) -> bool:
    """True iff the cone generated by the normals is the whole space.

    Equivalently no nonzero x has ``<u, x> >= 0`` for all u.  Checked by
    testing that each of +-e_k is a nonnegative combination, via the
    facets of the normals' convex hull containing the origin in the interior.
    """
    n = len(normals[0])
    pts = [tuple(u) for u in normals] + [tuple([0] * n)]
    H = convex_hull(pts)
    if H.dim < n:
        return False
    origin = [0] * n
    return all(_dot(u, origin) > -o for u, o in H.facets)


def normal_fan_rays(P: Polytope) -> list[tuple[int, ...]]:
    """Primitive inward facet normals of a full-dimensional polytope."""
    if P.dim < P.ambient:
        raise DegenerateInput("normal fan requires a full-dimensional polytope")
    return sorted({u for u, _ in P.facets})
