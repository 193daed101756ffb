"""Essential subfamilies and the codimension of the eliminant variety."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_decomp

from .arith import MultiPoly
from .errors import DegenerateInput, TooManySupports
from .family import SupportFamily
from .geometry import int_rank, mixed_volume_minus

MAX_SUPPORTS = 12


@dataclass
class FamilyAnalysis:
    ranks: dict
    essential: list
    codim: int

    @property
    def unique_essential(self):
        return self.essential[0] if len(self.essential) == 1 else None

    @property
    def nontrivial(self) -> bool:
        """Whether the resultant is a nonconstant polynomial."""
        return self.codim == 1 and len(self.essential) == 1

    def to_json(self) -> dict:
        return {
            "ranks": [{"subset": list(J), "rank": r} for J, r in sorted(self.ranks.items())],
            "essential": [list(I) for I in self.essential],
            "codim": self.codim,
        }


def _generators(A: SupportFamily, J) -> list[list[int]]:
    gens = []
    for j in J:
        a0 = A.supports[j][0]
        gens += [[x - y for x, y in zip(a, a0)] for a in A.supports[j][1:]]
    return gens


def subset_rank(A: SupportFamily, J) -> int:
    return int_rank(_generators(A, J))


def essential_families(A: SupportFamily) -> FamilyAnalysis:
    m = A.n + 1
    if m > MAX_SUPPORTS:
        raise TooManySupports(f"{m} supports exceed the enumeration limit {MAX_SUPPORTS}")
    ranks = {}
    for k in range(1, m + 1):
        for J in itertools.combinations(range(m), k):
            ranks[J] = subset_rank(A, J)
    essential = []
    for I, r in ranks.items():
        if r != len(I) - 1:
            continue
        if all(
            ranks[J] >= len(J)
            for k in range(1, len(I))
            for J in itertools.combinations(I, k)
        ):
            essential.append(I)
    codim = max([0] + [len(J) - r for J, r in ranks.items()])
    essential.sort(key=lambda I: (len(I), I))
    return FamilyAnalysis(ranks, essential, codim)


def lattice_basis(gens: list[list[int]], n: int):
    """Basis of the lattice spanned by ``gens`` and a coordinate map into it.

    Returns ``(basis, coords)`` where ``coords(x)`` gives the integer
    coordinates of a lattice vector x in that basis.
    """
    if not gens:
        return [], lambda x: ()
    M = Matrix(gens)
    D, _, V = smith_normal_decomp(M, domain=ZZ)
    r = sum(1 for k in range(min(D.shape)) if D[k, k] != 0)
    Vinv = V.inv()
    basis = [[int(D[k, k] * Vinv[k, c]) for c in range(n)] for k in range(r)]

    def coords(x):
        y = Matrix([list(x)]) * V
        out = []
        for k in range(r):
            q, rem = divmod(int(y[0, k]), int(D[k, k]))
            if rem:
                raise DegenerateInput(f"{x} is not in the lattice")
            out.append(q)
        if any(int(y[0, k]) for k in range(r, n)):
            raise DegenerateInput(f"{x} is not in the lattice")
        return tuple(out)

    return basis, coords


def restrict_to(A: SupportFamily, I) -> SupportFamily:
    """Restrict to the subfamily I, re-embedded in its lattice L_I.

    Each support is translated so its first point is the origin; translation
    does not change the resultant.
    """
    gens = _generators(A, I)
    basis, coords = lattice_basis(gens, A.n)
    if len(basis) != len(I) - 1:
        raise DegenerateInput("subfamily is not essential (rank mismatch)")
    sups, cs, names = [], [], []
    for i in I:
        a0 = A.supports[i][0]
        pts = [coords([x - y for x, y in zip(a, a0)]) for a in A.supports[i]]
        order = sorted(range(len(pts)), key=lambda j: pts[j])
        sups.append(tuple(pts[j] for j in order))
        cs.append([A.coeffs[i][j] for j in order])
        names.append([A.names[i][j] for j in order])
    return SupportFamily(tuple(sups), cs, names)


def sparse_resultant(A: SupportFamily, mode: str = "symbolic", **kw):
    """Resultant for any family, dispatching on the essential family.

    Trivial cases give 1; a singleton essential support {a} gives
    ``u_{i,a} ** MV_{-i}``; a proper essential family is restricted to its
    lattice first.
    """
    from .canny_emiris import resultant_ce

    fa = essential_families(A)
    if not fa.nontrivial:
        return MultiPoly.constant(1, A.symbolic().coefficient_vars()) if mode == "symbolic" else 1
    I = fa.unique_essential
    if len(I) == 1:
        i = I[0]
        e = mixed_volume_minus(A.supports, i)
        if mode == "symbolic":
            sym = A.symbolic()
            return MultiPoly.var(sym.names[i][0], sym.coefficient_vars()) ** e
        field = kw.get("field")
        c = A.coeffs[i][0]
        return field.pow(field(c), e) if field else c ** e
    if len(I) == A.n + 1:
        return resultant_ce(A, mode, **kw)
    sub = restrict_to(A, I)
    res = resultant_ce(sub, mode, **kw)
    if mode == "symbolic":
        return res.with_vars(A.symbolic().coefficient_vars())
    return res
