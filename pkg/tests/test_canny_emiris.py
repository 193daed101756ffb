import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, strategies as st

from sparseres.arith import GF, QQ, MultiPoly, det, initial_form, rank, solve, weight_substitute
from sparseres.canny_emiris import (
    CEEvaluator,
    build_ce_matrices,
    ce_pair,
    check_delta,
    degree_certificate,
    h_rows_as_macaulay,
    macaulay_matrix,
    probe_divisible,
    resultant_ce,
    row_content,
)
from sparseres.errors import DegenerateInput, EssentialProper
from sparseres.family import SupportFamily
from sparseres.interp import planted_sample
from sparseres.subdivision import cayley_embed, lex_combine, mixed_subdivision, refine_check

from conftest import (
    BILINEAR_LIFTING,
    QUARTER,
    bilinear_family,
    genres_family,
    genres_resultant,
    linear_pair,
    three_poly_family,
    trinomial_pair,
)

P = 2**31 - 1
THIRD = (Fraction(1, 3),)


def frozen_bilinear(greedy=False):
    A = bilinear_family()
    return build_ce_matrices(A, mixed_subdivision(A, BILINEAR_LIFTING), QUARTER, greedy)


def test_delta_checks():
    S = mixed_subdivision(bilinear_family(), BILINEAR_LIFTING)
    assert check_delta(S, QUARTER)
    assert not check_delta(S, (0, 0))
    T = mixed_subdivision(linear_pair(), (0, 1, 0, 2))
    assert check_delta(T, THIRD)


def test_bilinear_matrix_sizes():
    full, greedy = frozen_bilinear(), frozen_bilinear(greedy=True)
    assert full.size == 9 and len(full.rows_E) == 3
    assert greedy.size == 8 and len(greedy.rows_E) == 2
    assert set(greedy.rows) < set(full.rows)


def test_row_content_uses_max_index():
    pair = frozen_bilinear()
    for b in pair.rows:
        i, j = pair.rc.content[b]
        cell = pair.rc.cell_of[b]
        assert i == max(k for k, d in enumerate(cell.dims) if d == 0)
        assert cell.components[i] == (j,)


def test_genres_row_sizes_match_mixed_volumes():
    A = genres_family()
    pair = ce_pair(A, random.Random(0), delta=THIRD)
    assert pair.size == 4
    for got, mv in degree_certificate(pair):
        assert got == mv == 2


def test_linear_case_is_two_by_two():
    A = linear_pair()
    pair = ce_pair(A, random.Random(0), delta=THIRD)
    assert pair.size == 2 and pair.rows_E == []
    vs = A.coefficient_vars()
    u = {v: MultiPoly.var(v, vs) for v in vs}
    assert resultant_ce(A) == u["u0_0"] * u["u1_1"] - u["u0_1"] * u["u1_0"]


def test_single_point_family():
    A = SupportFamily((((),),), names=[["u"]])
    assert resultant_ce(A) == MultiPoly.var("u", ("u",))


def test_genres_symbolic():
    assert resultant_ce(genres_family()) == genres_resultant()
    for seed in range(3):
        assert resultant_ce(genres_family(), seed=seed, greedy=True) == genres_resultant()


def test_bilinear_degrees():
    pair = frozen_bilinear(greedy=True)
    dH, dE = det(pair.H()), det(pair.E())
    assert dH.total_degree() == 8 and dE.total_degree() == 2
    assert [len(x) for x in pair.partition()] == [2, 3, 3]
    res = resultant_ce(bilinear_family(), seed=1)
    assert res.total_degree() == 6
    assert [res.degree([f"u{i}_{j}" for j in range(4)]) for i in range(3)] == [2, 2, 2]


def test_planted_root_gives_zero():
    A = bilinear_family()
    vals = planted_sample(A, random.Random(5), GF(P))
    assert resultant_ce(A.with_flat_coeffs(vals), "specialized", field=GF(P)) == 0


def test_non_essential_family_is_rejected():
    with pytest.raises(EssentialProper):
        resultant_ce(three_poly_family())


def test_macaulay_contains_h_rows():
    pair = frozen_bilinear()
    M = macaulay_matrix(pair.family, pair.rows)
    assert set(h_rows_as_macaulay(pair)) <= set(M.rows)
    sym = pair.symbolic()
    for b, label in zip(pair.rows, h_rows_as_macaulay(pair)):
        assert [M[label, c] for c in pair.rows] == [sym[b, c] for c in pair.rows]


def test_macaulay_linear_case():
    A = linear_pair().with_coeffs([[2, 3], [5, 7]])
    M = macaulay_matrix(A, [(0,), (1,)])
    assert M.entries == [[2, 3], [5, 7]]


def test_macaulay_corank_at_planted_root():
    A = bilinear_family()
    vals = planted_sample(A, random.Random(9), GF(P))
    cols = frozen_bilinear().rows
    M = macaulay_matrix(A.with_flat_coeffs(vals), cols)
    assert rank(M.entries, GF(P)) <= len(cols) - 1


def test_diagonal_is_row_content():
    pair = frozen_bilinear()
    for b in pair.rows:
        assert pair.entry(b, b) == pair.rc.content[b]
        assert not pair.symbolic()[b, b].is_zero()


def _envelope(S):
    """rho as the max of the affine functions interpolating each cell's heights."""
    A = S.family
    it = iter(S.lifting)
    w = [[next(it) for _ in Ai] for Ai in A.supports]
    pieces = []
    for cell in S.cells:
        rows, rhs = [], []
        for combo in product(*cell.components):
            pt = [sum(A.supports[i][j][k] for i, j in enumerate(combo)) for k in range(A.n)]
            rows.append(pt + [1])
            rhs.append(sum(w[i][j] for i, j in enumerate(combo)))
        pieces.append(solve(rows, rhs, QQ))
    return w, lambda x: max(sum(c * v for c, v in zip(f, list(x) + [1])) for f in pieces)


def test_diagonal_minimality():
    pair = frozen_bilinear()
    w, rho = _envelope(pair.subdivision)
    d = pair.delta
    for b in pair.rows:
        i, j = pair.rc.content[b]
        for b2 in pair.rows:
            ij = pair.entry(b, b2)
            if ij is None:
                continue
            val = rho([x - y for x, y in zip(b, d)]) - w[i][j] + w[i][ij[1]]
            lower = rho([x - y for x, y in zip(b2, d)])
            if b2 == b:
                assert val == lower
            else:
                assert val > lower


def _init_vs_cells(A, phi, omega, delta):
    S_phi = mixed_subdivision(A, phi)
    S = mixed_subdivision(A, lex_combine(cayley_embed(A).points, [phi, omega]))
    assert refine_check(S_phi, S)
    pair = build_ce_matrices(A, S, delta)
    vars = A.coefficient_vars()
    names = [v for row in A.names for v in row]
    _, lead = initial_form(weight_substitute(det(pair.symbolic()), dict(zip(names, phi))))
    prod = MultiPoly.constant(1, vars)
    for D in S_phi.cells:
        poly = D.polytope()
        rows = [b for b in pair.rows if poly.contains([x - y for x, y in zip(b, delta)])]
        sub = []
        for b in rows:
            line = []
            for b2 in rows:
                ij = pair.entry(b, b2)
                keep = ij is not None and ij[1] in D.components[ij[0]]
                line.append(A.coeff_value(*ij, vars) if keep else MultiPoly(vars))
            sub.append(line)
        if rows:
            prod = prod * det(sub)
    return len(S_phi.cells), lead == prod


@pytest.mark.parametrize("family", [genres_family, linear_pair, trinomial_pair])
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_initial_form_is_product_over_coarse_cells(family, seed):
    A = family()
    rng = random.Random(seed)
    phi = [rng.randrange(3) for _ in range(A.size)]
    omega = [rng.randrange(1000) for _ in range(A.size)]
    cells, ok = _init_vs_cells(A, phi, omega, THIRD)
    assert cells <= 3 and ok


def test_initial_form_of_frozen_bilinear_is_diagonal():
    pair = frozen_bilinear()
    A = pair.family
    names = [v for row in A.names for v in row]
    order, lead = initial_form(weight_substitute(det(pair.symbolic()), dict(zip(names, BILINEAR_LIFTING))))
    diag = MultiPoly.constant(1, A.coefficient_vars())
    for b in pair.rows:
        diag = diag * pair.symbolic()[b, b]
    assert lead == diag or lead == -diag


@given(st.integers(0, 10**6))
def test_symbolic_matches_specialized(seed):
    rng = random.Random(seed)
    A = genres_family()
    res = genres_resultant()
    vals = [[rng.randint(-20, 20) for _ in Ai] for Ai in A.supports]
    flat = [v for r in vals for v in r]
    assert resultant_ce(A.with_coeffs(vals), "specialized", seed=seed) == res.evaluate(flat)


def test_evaluator_matches_symbolic_on_bilinear():
    A = bilinear_family()
    res = resultant_ce(A, seed=1)
    ev = CEEvaluator(A, seed=4)
    rng = random.Random(2)
    for _ in range(3):
        flat = [rng.randint(-9, 9) for _ in range(A.size)]
        assert ev(flat) == res.evaluate(flat)


def test_probe_accepts_frozen_pair():
    assert probe_divisible(frozen_bilinear(greedy=True), random.Random(0))


def test_row_content_rejects_boundary_delta():
    S = mixed_subdivision(bilinear_family(), BILINEAR_LIFTING)
    with pytest.raises(DegenerateInput):
        row_content(S, (0, 0))
