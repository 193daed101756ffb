"""Canny-Emiris matrices and the rational formula Res = det(H) / det(E)."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .arith import (
    DEFAULT_PRIME,
    QQ,
    Field,
    LabeledMatrix,
    MultiPoly,
    SYMBOLIC_LIMIT,
    det,
    exact_divide,
    to_fraction,
    upoly_divmod,
    upoly_interpolate,
)
from .errors import (
    DegenerateInput,
    EssentialProper,
    NotDivisible,
    NotTight,
    RetryExhausted,
)
from .family import SupportFamily
from .geometry import convex_hull, lattice_points, minkowski_points, mixed_volume_minus
from .subdivision import (
    MAX_RETRIES,
    LIFT_BOUND,
    MixedSubdivision,
    cayley_embed,
    lex_combine,
    mixed_subdivision,
)

DELTA_RETRIES = 64
DELTA_DEN = 1009


# --------------------------------------------------------------------------
# lifting selection


def chain_lifting(A: SupportFamily, rng: random.Random, retries: int = MAX_RETRIES):
    """Tight fine subdivision refining the incremental chain ``omega^{<i}``.

    The heights are lexicographic in ``omega^{<1}, ..., omega^{<n}``, then
    ``omega`` itself, then a generic tie-breaker, so the result refines each
    member of the chain in turn.
    """
    cay = cayley_embed(A)
    for _ in range(retries):
        omega = [rng.randrange(LIFT_BOUND) for _ in range(A.size)]
        levels = []
        for i in range(1, A.n + 1):
            cut = sum(A.sizes[:i])
            levels.append(omega[:cut] + [0] * (A.size - cut))
        levels.append(omega)
        levels.append([rng.randrange(LIFT_BOUND) for _ in range(A.size)])
        S = mixed_subdivision(A, lex_combine(cay.points, levels))
        if S.tight and all(c.is_fine() for c in S.cells):
            return S
    raise RetryExhausted("no tight subdivision after resampling")


def generic_lifting(A: SupportFamily, rng: random.Random, retries: int = MAX_RETRIES):
    for _ in range(retries):
        S = mixed_subdivision(A, [rng.randrange(LIFT_BOUND) for _ in range(A.size)])
        if S.tight and all(c.is_fine() for c in S.cells):
            return S
    raise RetryExhausted("no tight subdivision after resampling")


# --------------------------------------------------------------------------
# delta and row content


def check_delta(S: MixedSubdivision, delta) -> bool:
    """True iff every point of (Δ+δ)∩Z^n lies in the interior of a full cell."""
    delta = [to_fraction(d) for d in delta]
    for b in _translated_points(S.family, delta):
        if S.locate([x - d for x, d in zip(b, delta)]) is None:
            return False
    return True


def _translated_points(A: SupportFamily, delta):
    total = convex_hull(minkowski_points([list(Ai) for Ai in A.supports]))
    return lattice_points(total, shift=delta)


def select_delta(S: MixedSubdivision, rng: random.Random, retries: int = DELTA_RETRIES):
    n = S.family.n
    for _ in range(retries):
        delta = tuple(Fraction(rng.randrange(1, DELTA_DEN // 2), DELTA_DEN) for _ in range(n))
        if check_delta(S, delta):
            return delta
    raise RetryExhausted("no generic translation vector found")


@dataclass
class RowContent:
    """``content[b] = (i, j)``: row b holds x^(b - a) F_i with a = A_i[j]."""

    points: list
    content: dict
    cell_of: dict

    def partition(self, n1: int):
        out = [[] for _ in range(n1)]
        for b in self.points:
            out[self.content[b][0]].append(b)
        return out


def row_content(S: MixedSubdivision, delta) -> RowContent:
    A = S.family
    delta = [to_fraction(d) for d in delta]
    pts = _translated_points(A, delta)
    content, cell_of = {}, {}
    for b in pts:
        cell = S.locate([x - d for x, d in zip(b, delta)])
        if cell is None:
            raise DegenerateInput(f"point {b} lies on a cell boundary; delta is not generic")
        if not cell.is_tight():
            raise NotTight(f"cell {cell.components} is not tight")
        i = max(k for k, d in enumerate(cell.dims) if d == 0)
        content[b] = (i, cell.components[i][0])
        cell_of[b] = cell
    return RowContent(pts, content, cell_of)


# --------------------------------------------------------------------------
# matrices


@dataclass
class CEMatrixPair:
    family: SupportFamily
    subdivision: MixedSubdivision
    delta: tuple
    rc: RowContent
    rows: list
    rows_E: list
    greedy: bool = False
    pattern: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.rows)

    def partition(self):
        out = [[] for _ in range(self.family.n + 1)]
        for b in self.rows:
            out[self.rc.content[b][0]].append(b)
        return out

    def partition_E(self):
        out = [[] for _ in range(self.family.n + 1)]
        for b in self.rows_E:
            out[self.rc.content[b][0]].append(b)
        return out

    def entry(self, b, b2):
        """Index pair (i, j) of the coefficient at H[b, b2], or None."""
        return self.pattern.get((b, b2))

    def _matrix(self, rows, fn) -> LabeledMatrix:
        return LabeledMatrix(
            rows, rows,
            [[fn(self.pattern.get((b, b2))) for b2 in rows] for b in rows],
        )

    def symbolic(self, rows=None) -> LabeledMatrix:
        A = self.family
        vars = A.coefficient_vars()
        zero = MultiPoly(vars)
        return self._matrix(
            self.rows if rows is None else rows,
            lambda ij: zero if ij is None else A.coeff_value(ij[0], ij[1], vars),
        )

    def H(self, values=None, field: Field = QQ) -> LabeledMatrix:
        """H with scalar entries from ``values`` (nested i, j) or the family."""
        if values is None:
            return self.symbolic()
        return self._scalar(self.rows, values, field)

    def E(self, values=None, field: Field = QQ) -> LabeledMatrix:
        if values is None:
            return self.symbolic(self.rows_E)
        return self._scalar(self.rows_E, values, field)

    def _scalar(self, rows, values, field):
        return self._matrix(rows, lambda ij: 0 if ij is None else field(values[ij[0]][ij[1]]))

    def evaluate(self, values, field: Field = QQ):
        """``(det H, det E)`` at scalar coefficients."""
        return det(self.H(values, field), field), det(self.E(values, field), field)

    def to_json(self) -> dict:
        A = self.family

        def lab(b):
            i, j = self.rc.content[b]
            return {"b": list(b), "i": i, "a": list(A.supports[i][j])}

        def mat(rows):
            return [[None if self.pattern.get((b, b2)) is None
                     else A.names[self.pattern[(b, b2)][0]][self.pattern[(b, b2)][1]]
                     for b2 in rows] for b in rows]

        return {
            "delta": [str(d) for d in self.delta],
            "greedy": self.greedy,
            "rows": [lab(b) for b in self.rows],
            "E_rows": [list(b) for b in self.rows_E],
            "H": mat(self.rows),
            "E": mat(self.rows_E),
        }


def build_ce_matrices(A: SupportFamily, S: MixedSubdivision, delta, greedy: bool = False) -> CEMatrixPair:
    rc = row_content(S, delta)
    delta = tuple(to_fraction(d) for d in delta)
    Bset = set(rc.points)
    mixed = [b for b in rc.points if rc.cell_of[b].mixed_index is not None]
    if greedy:
        G = set(mixed)
        stack = list(mixed)
        while stack:
            b = stack.pop()
            i, j = rc.content[b]
            a = A.supports[i][j]
            for a2 in A.supports[i]:
                b2 = tuple(x - y + z for x, y, z in zip(b, a, a2))
                if b2 not in Bset:
                    raise DegenerateInput("row content closure leaves B")
                if b2 not in G:
                    G.add(b2)
                    stack.append(b2)
        rows = sorted(G)
    else:
        rows = list(rc.points)
    rowset = set(rows)
    rows_E = [b for b in rows if rc.cell_of[b].mixed_index is None]
    pattern = {}
    for b in rows:
        i, j = rc.content[b]
        a = A.supports[i][j]
        for j2, a2 in enumerate(A.supports[i]):
            b2 = tuple(x - y + z for x, y, z in zip(b, a, a2))
            if b2 in rowset:
                pattern[(b, b2)] = (i, j2)
            elif b2 not in Bset:
                raise DegenerateInput("row content closure leaves B")
    return CEMatrixPair(A, S, delta, rc, rows, rows_E, greedy, pattern)


def probe_divisible(pair: CEMatrixPair, rng: random.Random, p: int = DEFAULT_PRIME,
                    probes: int = 3) -> bool:
    """Check det(E) | det(H) on random lines through coefficient space.

    Along ``u(t) = u0 + t*u1`` both determinants are univariate polynomials
    recovered by interpolation mod p; a non-polynomial quotient survives the
    restriction to a random line with high probability.
    """
    A = pair.family
    F = Field(p)
    N = pair.size
    for _ in range(probes):
        u0 = [[rng.randrange(p) for _ in Ai] for Ai in A.supports]
        u1 = [[rng.randrange(p) for _ in Ai] for Ai in A.supports]
        ts = list(range(1, N + 2))
        hs, es = [], []
        for t in ts:
            vals = [[(a + t * b) % p for a, b in zip(r0, r1)] for r0, r1 in zip(u0, u1)]
            dH, dE = pair.evaluate(vals, F)
            hs.append(dH)
            es.append(dE)
        h = upoly_interpolate(ts, hs, p)
        e = upoly_interpolate(ts, es, p)
        if not e:
            return False
        _, r = upoly_divmod(h, e, p)
        if r:
            return False
    return True


def degree_certificate(pair: CEMatrixPair) -> list[tuple[int, int]]:
    """Per polynomial: (|B_i| - |B°_i|, MV_{-i})."""
    A = pair.family
    P, PE = pair.partition(), pair.partition_E()
    return [
        (len(P[i]) - len(PE[i]), mixed_volume_minus(A.supports, i)) for i in range(A.n + 1)
    ]


def ce_pair(A: SupportFamily, rng: random.Random, greedy: bool = False,
            lifting: str = "chain", delta=None, certify: bool = True) -> CEMatrixPair:
    """Sample a lifting and a translation, assemble H and E.

    With ``certify`` the pair is accepted only if det(E) divides det(H) on
    random lines; otherwise the lifting is resampled.
    """
    for _ in range(MAX_RETRIES):
        if A.n == 0:
            S = mixed_subdivision(A, [0] * A.size)
        elif lifting == "chain":
            S = chain_lifting(A, rng)
        else:
            S = generic_lifting(A, rng)
        d = delta
        if d is None:
            d = select_delta(S, rng) if A.n else ()
        pair = build_ce_matrices(A, S, d, greedy)
        if not certify or probe_divisible(pair, rng):
            return pair
    raise NotDivisible("det(E) does not divide det(H) for any sampled lifting")


# --------------------------------------------------------------------------
# resultant


def _check_essential(A: SupportFamily):
    from .elimination import essential_families

    fa = essential_families(A)
    full = tuple(range(A.n + 1))
    if fa.codim != 1 or fa.essential != [full]:
        raise EssentialProper(
            f"essential family is {fa.essential} (codim {fa.codim}), not the full family",
            fa.essential,
        )


class CEEvaluator:
    """Specialized evaluation of det(H)/det(E) for a fixed matrix pair."""

    def __init__(self, A: SupportFamily, seed: int = 0, greedy: bool = False,
                 lifting: str = "chain", check: bool = True):
        if check:
            _check_essential(A)
        self.family = A
        self.rng = random.Random(seed)
        self.greedy = greedy
        self.lifting = lifting
        self.pair = ce_pair(A, self.rng, greedy, lifting)

    def relift(self):
        self.pair = ce_pair(self.family, self.rng, self.greedy, self.lifting)

    def __call__(self, values, field: Field = QQ):
        """Resultant value at nested or flat coefficient values."""
        A = self.family
        if values and not isinstance(values[0], (list, tuple)):
            it = iter(values)
            values = [[next(it) for _ in Ai] for Ai in A.supports]
        for _ in range(MAX_RETRIES):
            dH, dE = self.pair.evaluate(values, field)
            if dE != 0:
                return field.div(dH, dE)
            self.relift()
        raise RetryExhausted("det(E) vanished for every sampled lifting")


def resultant_ce(A: SupportFamily, mode: str = "symbolic", seed: int = 0,
                 field: Field | None = None, greedy: bool = False,
                 symbolic_limit: int = SYMBOLIC_LIMIT, lifting: str = "chain"):
    """Sparse resultant via the rational Canny-Emiris formula.

    Args:
        A: the support family; in specialized mode all coefficients must be set.
        mode: ``"symbolic"`` returns a MultiPoly in the coefficient names,
            ``"specialized"`` returns a scalar.
        seed: seeds the lifting and translation sampling.
        field: scalar field for specialized mode (defaults to QQ).
        greedy: use the greedy submatrix closed around mixed-cell points.

    Returns:
        The resultant polynomial or its value.
    """
    _check_essential(A)
    rng = random.Random(seed)
    if mode == "symbolic":
        sym = A.symbolic()
        pair = ce_pair(sym, rng, greedy, lifting)
        if pair.size > symbolic_limit:
            from .errors import SymbolicTooLarge

            raise SymbolicTooLarge(
                f"|B| = {pair.size} exceeds the symbolic limit {symbolic_limit}"
            )
        dH = det(pair.H(), symbolic_limit=symbolic_limit)
        dE = det(pair.E(), symbolic_limit=symbolic_limit)
        if not isinstance(dE, MultiPoly):
            dE = MultiPoly.constant(dE, sym.coefficient_vars())
        if not isinstance(dH, MultiPoly):
            dH = MultiPoly.constant(dH, sym.coefficient_vars())
        if dE.is_zero():
            raise NotDivisible("det(E) is identically zero")
        return exact_divide(dH, dE)
    if mode != "specialized":
        raise ValueError(f"unknown mode {mode!r}")
    if not A.is_specialized():
        raise DegenerateInput("specialized mode needs every coefficient assigned")
    field = field or QQ
    ev = CEEvaluator(A, seed, greedy, lifting, check=False)
    return ev([list(r) for r in A.coeffs], field)


# --------------------------------------------------------------------------
# Macaulay map


def macaulay_matrix(A: SupportFamily, columns: Sequence) -> LabeledMatrix:
    """Matrix of (G_0, ..., G_n) -> Σ G_i F_i restricted to monomials in ``columns``.

    Rows are labeled ``(i, m)`` for every shift m with ``m + A_i`` inside the
    column set; entries are symbolic (or scalar when coefficients are set).
    """
    cols = sorted(tuple(c) for c in columns)
    colset = set(cols)
    vars = A.coefficient_vars()
    rows, entries = [], []
    for i, Ai in enumerate(A.supports):
        shifts = sorted({tuple(c - a for c, a in zip(b, Ai[0])) for b in cols})
        for m in shifts:
            targets = [tuple(x + y for x, y in zip(m, a)) for a in Ai]
            if not all(t in colset for t in targets):
                continue
            row = {t: j for j, t in enumerate(targets)}
            rows.append((i, m))
            entries.append([
                (A.coeff_value(i, row[c], vars) if vars else A.coeffs[i][row[c]])
                if c in row else (MultiPoly(vars) if vars else 0)
                for c in cols
            ])
    return LabeledMatrix(rows, cols, entries)


def h_rows_as_macaulay(pair: CEMatrixPair) -> list:
    """Labels ``(i(b), b - a(b))`` of the rows of H."""
    A = pair.family
    out = []
    for b in pair.rows:
        i, j = pair.rc.content[b]
        out.append((i, tuple(x - y for x, y in zip(b, A.supports[i][j]))))
    return out
