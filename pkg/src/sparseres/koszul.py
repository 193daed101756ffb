"""Graded pieces of the Koszul complex and Cayley's determinant of a complex."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .arith import QQ, Field, LabeledMatrix, field_det, rref, to_fraction
from .errors import DegenerateInput, NoValidChain, Unbounded
from .family import SupportFamily
from .geometry import (
    _dot,
    convex_hull,
    minkowski_points,
    normal_fan_rays,
    polytope_from_inequalities,
)


@dataclass(frozen=True)
class DivisorDegree:
    """A degree α = [Σ a_j D_j] with per-support offsets ``support_offsets[i][j]``.

    The polytope of α is ``{m : <rays[j], m> >= -offsets[j]}``.
    """

    rays: tuple
    offsets: tuple
    support_offsets: tuple

    def shifted(self, I: Sequence[int]) -> tuple:
        """Offsets of α - α_I."""
        return tuple(
            a - sum(self.support_offsets[i][j] for i in I) for j, a in enumerate(self.offsets)
        )

    def to_json(self) -> dict:
        return {
            "rays": [list(u) for u in self.rays],
            "offsets": list(self.offsets),
            "support_offsets": [list(r) for r in self.support_offsets],
        }


def support_offsets(A: SupportFamily, rays) -> tuple:
    """``a_ij = -min_{m in A_i} <u_j, m>``."""
    return tuple(
        tuple(-min(_dot(u, m) for m in Ai) for u in rays) for Ai in A.supports
    )


def reference_rays(A: SupportFamily, extra=()) -> tuple:
    """Rays of the normal fan of Δ, optionally with extra primitive rays."""
    total = convex_hull(minkowski_points([list(Ai) for Ai in A.supports]))
    rays = set(normal_fan_rays(total))
    rays.update(tuple(u) for u in extra)
    return tuple(sorted(rays))


def degree_choice(A: SupportFamily, delta, refine: bool | None = None) -> DivisorDegree:
    """α = Σ D_i − Σ c_j D_j with ``c_j = 1`` iff ``<u_j, δ> > 0``.

    With ``refine=None`` the conv(B) facet normals are added to the fan only
    when the polytope of α would otherwise miss them.
    """
    delta = [to_fraction(d) for d in delta]
    rays = reference_rays(A)

    def build(rs):
        so = support_offsets(A, rs)
        offs = tuple(
            sum(so[i][j] for i in range(A.n + 1)) - (1 if _dot(u, delta) > 0 else 0)
            for j, u in enumerate(rs)
        )
        return DivisorDegree(tuple(rs), offs, so)

    deg = build(rays)
    if refine is False:
        return deg
    pts = graded_piece_basis(deg)
    extra = []
    if pts:
        H = convex_hull(pts)
        if H.dim == A.n:
            extra = [u for u, _ in H.facets if u not in rays]
    if extra or refine:
        deg = build(reference_rays(A, extra))
    return deg


def graded_piece_basis(deg: DivisorDegree, I: Sequence[int] = ()) -> list:
    """Lattice points of the polytope of α − α_I (its monomial basis)."""
    offs = deg.shifted(I)
    try:
        return polytope_from_inequalities(list(zip(deg.rays, offs)))
    except Unbounded:
        raise Unbounded("degree polytope is unbounded") from None


@dataclass
class GradedComplex:
    """Terms ``terms[k]`` (labels ``(I, m)``) and differentials ``diffs[k]``.

    ``diffs[k-1]`` is the matrix of ∂_k : C_k -> C_{k-1} with rows labeled by
    C_k and columns by C_{k-1}; entries are ``(sign, i, j)`` coefficient
    references or ``None``.
    """

    family: SupportFamily
    degree: DivisorDegree
    terms: list
    diffs: list

    def dims(self) -> list[int]:
        return [len(t) for t in self.terms]

    def euler(self) -> int:
        return sum((-1) ** k * d for k, d in enumerate(self.dims()))

    def matrix(self, k: int, values, field: Field = QQ) -> list[list]:
        """Scalar matrix of ∂_k at coefficient ``values[i][j]``."""
        src, dst = self.terms[k], self.terms[k - 1]
        col = {lab: c for c, lab in enumerate(dst)}
        M = [[0] * len(dst) for _ in src]
        for r, entries in enumerate(self.diffs[k - 1]):
            for target, (s, i, j) in entries.items():
                v = field(values[i][j])
                M[r][col[target]] = field.neg(v) if s < 0 else v
        return M

    def labeled(self, k: int, values=None, field: Field = QQ) -> LabeledMatrix:
        if values is None:
            from .arith import MultiPoly

            A = self.family.symbolic()
            vars = A.coefficient_vars()
            src, dst = self.terms[k], self.terms[k - 1]
            col = {lab: c for c, lab in enumerate(dst)}
            M = [[MultiPoly(vars)] * len(dst) for _ in src]
            for r, entries in enumerate(self.diffs[k - 1]):
                row = list(M[r])
                for target, (s, i, j) in entries.items():
                    v = A.coeff_value(i, j, vars)
                    row[col[target]] = -v if s < 0 else v
                M[r] = row
            return LabeledMatrix(src, dst, M)
        return LabeledMatrix(self.terms[k], self.terms[k - 1], self.matrix(k, values, field))

    def to_json(self) -> dict:
        return {
            "degree": self.degree.to_json(),
            "dims": self.dims(),
            "terms": [[{"I": list(I), "m": list(m)} for I, m in t] for t in self.terms],
        }


def build_koszul(A: SupportFamily, deg: DivisorDegree) -> GradedComplex:
    m = A.n + 1
    terms = []
    for k in range(m + 1):
        t = []
        for I in itertools.combinations(range(m), k):
            t += [(I, pt) for pt in graded_piece_basis(deg, I)]
        terms.append(t)
    diffs = []
    for k in range(1, m + 1):
        dst = set(terms[k - 1])
        rows = []
        for I, pt in terms[k]:
            entries = {}
            for pos, i in enumerate(I):
                J = I[:pos] + I[pos + 1:]
                s = -1 if pos % 2 else 1
                for j, a in enumerate(A.supports[i]):
                    target = (J, tuple(x + y for x, y in zip(pt, a)))
                    if target not in dst:
                        raise DegenerateInput("differential leaves the graded piece")
                    entries[target] = (s, i, j)
            rows.append(entries)
        diffs.append(rows)
    return GradedComplex(A, deg, terms, diffs)


def koszul_complex(A: SupportFamily, delta, refine: bool | None = None) -> GradedComplex:
    return build_koszul(A, degree_choice(A, delta, refine))


def compose_is_zero(C: GradedComplex, values, field: Field = QQ) -> bool:
    """Check ∂_k ∘ ∂_{k+1} = 0 for all k at a specialization."""
    for k in range(1, len(C.terms) - 1):
        M1 = C.matrix(k + 1, values, field)
        M0 = C.matrix(k, values, field)
        for row in M1:
            for c in range(len(C.terms[k - 1])):
                acc = 0
                for r, x in enumerate(row):
                    if x:
                        acc = field.add(acc, field.mul(x, M0[r][c]))
                if acc != 0:
                    return False
    return True


def _pivot_columns(rows, field, order):
    """Pivot columns of ``rows`` (restricted to, and in the order of, ``order``)."""
    sub = [[r[c] for c in order] for r in rows]
    _, piv = rref(sub, field, len(order))
    return [order[p] for p in piv]


def det_complex(C: GradedComplex, values, field: Field = QQ,
                rng: random.Random | None = None, strict: bool = False):
    """Cayley's determinant ∏ det(H_k)^((-1)^(k+1)) at a specialization.

    The chain of square submatrices is chosen from the top term down: the
    columns of H_k are pivot columns of the rows of ∂_k left over by H_{k+1}.
    ``rng`` shuffles the pivot order to pick a different chain.  A complex
    that is not exact gives 0 (or NoValidChain when ``strict``).
    """
    top = len(C.terms) - 1
    while top > 0 and not C.terms[top]:
        top -= 1
    rows = list(range(len(C.terms[top])))
    result = 1 if field.modular else Fraction(1)
    for k in range(top, 0, -1):
        M = C.matrix(k, values, field)
        sub = [M[r] for r in rows]
        order = list(range(len(C.terms[k - 1])))
        if rng is not None:
            rng.shuffle(order)
        cols = _pivot_columns(sub, field, order) if sub else []
        if len(cols) != len(rows):
            if strict:
                raise NoValidChain(f"differential {k} is not injective on the chosen rows")
            return 0
        cols.sort()
        d = field_det([[r[c] for c in cols] for r in sub], field)
        if (k + 1) % 2 == 0:
            result = field.mul(result, d)
        else:
            result = field.div(result, d)
        chosen = set(cols)
        rows = [c for c in range(len(C.terms[k - 1])) if c not in chosen]
        if _perm_parity(cols + rows):
            result = field.neg(result)
    if rows:
        if strict:
            raise NoValidChain("the last differential is not surjective")
        return 0
    return result


def _perm_parity(seq) -> int:
    """Parity of the permutation listing ``seq`` (a rearrangement of 0..n-1)."""
    seen = [False] * len(seq)
    parity = 0
    for i in range(len(seq)):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = seq[j]
                length += 1
            parity ^= (length - 1) & 1
    return parity


def homogenize(A: SupportFamily, rays) -> list[list[tuple]]:
    """Exponents ``U m + a_i`` of the homogenized F_i in the Cox variables."""
    so = support_offsets(A, rays)
    return [
        [tuple(_dot(u, m) + so[i][j] for j, u in enumerate(rays)) for m in Ai]
        for i, Ai in enumerate(A.supports)
    ]


def dehomogenize(exps: list[tuple], rays, cone: Sequence[int]) -> list[tuple]:
    """Drop Cox variables outside ``cone`` (rays listed by index, in coordinate order)."""
    return [tuple(e[j] for j in cone) for e in exps]
