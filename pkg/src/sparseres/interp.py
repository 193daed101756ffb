"""Sparse interpolation of (specialized) resultants over a predicted support.

Candidate monomials are the lattice points of the computed Newton polytope.
The unknown coefficients span the kernel of the matrix of candidate monomials
evaluated at points of the resultant hypersurface.  Arithmetic is modulo a
prime; rational coefficients are recovered by Chinese remaindering and
rational reconstruction.
"""
from __future__ import annotations

import math
import random
from typing import Callable, Sequence

import numpy as np

from .arith import DEFAULT_PRIME, GF, QQ, Field, MultiPoly, nullspace, rational_reconstruct, solve
from .errors import CorankTooHigh, DegenerateInput, DegenerateSample, RetryExhausted
from .family import SupportFamily
from .geometry import Polytope, lattice_points

MAX_RETRIES = 16
EXTRA_SAMPLES = 10
NUMPY_THRESHOLD = 60
PRIMES = (2**31 - 1, 2147483629, 2147483587, 2147483579, 2147483563, 2147483549)


def candidate_monomials(P: Polytope) -> list[tuple]:
    return lattice_points(P)


def _mono(point, exp, p) -> int:
    v = 1
    for x, e in zip(point, exp):
        v = v * pow(x, e, p) % p
    return v


def planted_sample(A: SupportFamily, rng: random.Random, field: Field) -> list:
    """One coefficient vector (flat, over ``field``) with a common torus root.

    Symbolic coefficients are random except the first symbolic one of each
    polynomial, which is solved so that the polynomial vanishes at a random
    torus point.  Specialized coefficients keep their values.
    """
    p = field.p
    xs = [rng.randrange(1, p) for _ in range(A.n)]
    out = []
    for i, Ai in enumerate(A.supports):
        free = [j for j, c in enumerate(A.coeffs[i]) if c is None]
        if not free:
            raise DegenerateInput(f"polynomial {i} has no symbolic coefficient to solve for")
        d = free[0]
        row = [field(c) if c is not None else field.random(rng, p) for c in A.coeffs[i]]
        mons = [_mono(xs, a, p) for a in Ai]
        acc = 0
        for j, (c, m) in enumerate(zip(row, mons)):
            if j != d:
                acc = (acc + c * m) % p
        row[d] = field.div(field.neg(acc), mons[d])
        if row[d] == 0:
            raise DegenerateSample(f"solved coefficient of polynomial {i} is 0")
        out += row
    return out


def sample_on_resultant(A: SupportFamily, count: int, rng: random.Random,
                        field: Field | None = None) -> list[list]:
    """``count`` points of the resultant hypersurface via planted roots."""
    field = field or GF(DEFAULT_PRIME)
    out = []
    failures = 0
    while len(out) < count:
        try:
            out.append(planted_sample(A, rng, field))
        except DegenerateSample:
            failures += 1
            if failures > MAX_RETRIES + count:
                raise
    return out


def _kernel_mod_p(rows: list[list[int]], ncols: int, p: int) -> list[list[int]]:
    if ncols <= NUMPY_THRESHOLD:
        return nullspace(rows, GF(p), ncols)
    M = np.array(rows, dtype=np.int64) % p
    pivots = []
    r = 0
    for c in range(ncols):
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            M[[r, k]] = M[[k, r]]
        inv = pow(int(M[r, c]), -1, p)
        M[r] = (M[r] * inv) % p
        col = M[:, c].copy()
        col[r] = 0
        idx = np.nonzero(col)[0]
        if idx.size:
            M[idx] = (M[idx] - (col[idx, None] * M[r][None, :]) % p) % p
        pivots.append(c)
        r += 1
        if r == M.shape[0]:
            break
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for row, pc in enumerate(pivots):
            v[pc] = int(-M[row, f]) % p
        basis.append(v)
    return basis


def kernel_coefficients(monomials: Sequence[tuple], points: Sequence[Sequence[int]],
                        p: int = DEFAULT_PRIME) -> list[int]:
    """The unique (up to scale) kernel vector mod p, scaled so its first nonzero entry is 1."""
    rows = [[_mono(pt, m, p) for m in monomials] for pt in points]
    K = _kernel_mod_p(rows, len(monomials), p)
    if len(K) > 1:
        raise CorankTooHigh(f"kernel has dimension {len(K)}")
    if not K:
        raise DegenerateInput("no polynomial on the candidate monomials vanishes on the samples")
    v = K[0]
    lead = next(x for x in v if x % p)
    inv = pow(lead, -1, p)
    return [x * inv % p for x in v]


def _reconstruct(residues: list[int], modulus: int):
    try:
        return [rational_reconstruct(r, modulus) for r in residues]
    except ValueError:
        return None


def _primitive(monomials, coeffs, vars) -> MultiPoly:
    poly = MultiPoly(vars, {m: c for m, c in zip(monomials, coeffs) if c})
    poly = poly.primitive()
    if poly.leading_term()[1] < 0:
        poly = -poly
    return poly


def interpolate(Pi: Polytope, sampler: Callable[[int], list], vars: Sequence[str],
                primes: Sequence[int] = PRIMES, extra: int = EXTRA_SAMPLES,
                monomials=None) -> MultiPoly:
    """Recover the polynomial supported on the lattice points of ``Pi``.

    Args:
        Pi: predicted Newton polytope.
        sampler: ``sampler(p, count)`` returns ``count`` points (over GF(p),
            one coordinate per variable) on the hypersurface.
        vars: variable names, one per coordinate of Pi.
        primes: moduli tried in turn until the rational reconstruction
            stabilizes.
        extra: samples beyond the number of candidates.

    Returns:
        The primitive polynomial with positive leading coefficient.
    """
    mons = list(monomials) if monomials is not None else candidate_monomials(Pi)
    residues, modulus, prev = None, 1, None
    for p in primes:
        pts = sampler(p, len(mons) + extra)
        v = kernel_coefficients(mons, pts, p)
        if residues is None:
            residues = v
        else:
            residues = [_crt(a, modulus, b, p) for a, b in zip(residues, v)]
        modulus *= p
        cur = _reconstruct(residues, modulus)
        if cur is not None and cur == prev:
            return _primitive(mons, cur, vars)
        prev = cur
    raise RetryExhausted("rational reconstruction did not stabilize")


def _crt(a: int, m: int, b: int, p: int) -> int:
    t = (b - a) * pow(m, -1, p) % p
    return a + m * t


def interpolate_mod_p(Pi: Polytope, points, p: int = DEFAULT_PRIME, monomials=None) -> dict:
    """Kernel vector mod p as ``{monomial: coefficient}`` (nonzero entries only)."""
    mons = list(monomials) if monomials is not None else candidate_monomials(Pi)
    v = kernel_coefficients(mons, points, p)
    return {m: c for m, c in zip(mons, v) if c}


def interpolate_values(monomials: Sequence[tuple], points, values, vars: Sequence[str],
                       field: Field) -> MultiPoly:
    """Solve for the polynomial on ``monomials`` taking ``values`` at ``points``.

    Uses exact evaluations (e.g. of the resultant by a matrix formula) rather
    than points on the hypersurface, so the scale is fixed.
    """
    rows = []
    for pt in points:
        row = []
        for m in monomials:
            v = field(1)
            for x, e in zip(pt, m):
                v = field.mul(v, field.pow(field(x), e))
            row.append(v)
        rows.append(row)
    if nullspace(rows, field, len(monomials)):
        raise CorankTooHigh("evaluation points do not determine the coefficients")
    sol = solve(rows, [field(v) for v in values], field)
    if sol is None:
        raise DegenerateInput("values are not those of a polynomial on the candidate monomials")
    return MultiPoly(vars, {m: c for m, c in zip(monomials, sol) if c})


def interpolate_by_values(A: SupportFamily, coords: Sequence[int], Pi: Polytope,
                          vars: Sequence[str], seed: int = 0) -> MultiPoly:
    """Interpolate exact resultant values at random choices of the free coordinates.

    For families where some polynomial has no symbolic coefficient, so no
    root can be planted.  Coefficients outside ``coords`` keep their values.
    """
    from .canny_emiris import CEEvaluator

    rng = random.Random(seed)
    mons = candidate_monomials(Pi)
    base = [c if c is not None else 1 for c in A.flat_coeffs()]
    ev = CEEvaluator(A.with_flat_coeffs(base), seed)
    pts, vals = [], []
    for _ in range(len(mons) + 3):
        flat = [c if c is not None else rng.randrange(-50, 51) for c in A.flat_coeffs()]
        pts.append([flat[k] for k in coords])
        vals.append(ev(flat, QQ))
    poly = interpolate_values(mons, pts, vals, vars, QQ)
    if poly.is_zero():
        return poly
    return poly if poly.leading_term()[1] > 0 else -poly


def projected_sampler(A: SupportFamily, coords: Sequence[int], seed: int = 0):
    """A sampler for :func:`interpolate` restricted to flat coordinates ``coords``."""
    rng = random.Random(seed)

    def sampler(p, count):
        vecs = sample_on_resultant(A, count, rng, GF(p))
        return [[v[k] for k in coords] for v in vecs]

    return sampler


def shift_variables(terms: dict, shifts: Sequence[int], p: int) -> dict:
    """Expand ``Σ c_e ∏ (s_k - x_k)^{e_k}`` mod p as ``{exponent: coefficient}``."""
    out: dict = {}
    binoms = {}
    for e, c in terms.items():
        parts = []
        for k, ek in enumerate(e):
            key = (k, ek)
            if key not in binoms:
                binoms[key] = [
                    (j, math.comb(ek, j) * pow(shifts[k], ek - j, p) * (-1) ** j % p)
                    for j in range(ek + 1)
                ]
            parts.append(binoms[key])
        for combo in _product(parts):
            exp = tuple(j for j, _ in combo)
            val = c
            for _, b in combo:
                val = val * b % p
            out[exp] = (out.get(exp, 0) + val) % p
    return {e: c for e, c in out.items() if c}


def _product(parts):
    if not parts:
        yield ()
        return
    for head in parts[0]:
        for rest in _product(parts[1:]):
            yield (head,) + rest
