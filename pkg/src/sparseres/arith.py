"""Exact scalars, sparse multivariate polynomials and labeled matrices.

Scalars are either :class:`fractions.Fraction` values (the field ``QQ``) or
plain ``int`` residues in ``[0, p)`` handled through a :class:`Field`
instance.  Polynomials keep their terms in a dict keyed by exponent tuple, so
two polynomials over the same variables are equal iff their dicts are equal.
"""
from __future__ import annotations

import math
from random import Random
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import NotDivisible, SymbolicTooLarge

DEFAULT_PRIME = 2**31 - 1
SYMBOLIC_LIMIT = 10


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {x!r} to a rational")


class Field:
    """The rationals (``p is None``) or the prime field of order ``p``."""

    __slots__ = ("p",)

    def __init__(self, p: int | None = None):
        if p is not None and p < 3:
            raise ValueError("prime must be odd")
        self.p = p

    @property
    def modular(self) -> bool:
        return self.p is not None

    def __repr__(self):
        return "QQ" if self.p is None else f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __call__(self, x):
        if self.p is None:
            return _norm(to_fraction(x)) if not isinstance(x, int) else x
        if isinstance(x, int):
            return x % self.p
        x = to_fraction(x)
        return x.numerator * pow(x.denominator, -1, self.p) % self.p

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def add(self, a, b):
        return (a + b) % self.p if self.p else _norm(a + b)

    def sub(self, a, b):
        return (a - b) % self.p if self.p else _norm(a - b)

    def mul(self, a, b):
        return a * b % self.p if self.p else _norm(a * b)

    def neg(self, a):
        return -a % self.p if self.p else -a

    def inv(self, a):
        if self.p:
            return pow(a, -1, self.p)
        return _norm(1 / Fraction(a))

    def div(self, a, b):
        if self.p:
            return a * pow(b, -1, self.p) % self.p
        return _norm(Fraction(a) / b)

    def pow(self, a, e: int):
        if self.p:
            return pow(a, e, self.p)
        return _norm(Fraction(a) ** e)

    def random(self, rng: Random, bound: int = 2**20):
        """A random nonzero element (small integers over QQ)."""
        if self.p:
            return rng.randrange(1, self.p)
        v = 0
        while v == 0:
            v = rng.randrange(-bound, bound + 1)
        return v


QQ = Field()


def GF(p: int = DEFAULT_PRIME) -> Field:
    return Field(p)


# --------------------------------------------------------------------------
# dense linear algebra over a Field


def int_det(rows: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant of a square integer matrix."""
    n = len(rows)
    if n == 0:
        return 1
    m = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pk = m[k][k]
        rk = m[k]
        for i in range(k + 1, n):
            ri = m[i]
            a = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * pk - a * rk[j]) // prev
            ri[k] = 0
        prev = pk
    return sign * m[n - 1][n - 1]


def field_det(rows: Sequence[Sequence], field: Field = QQ):
    """Determinant over ``field``; rationals go through Bareiss on integers."""
    n = len(rows)
    if n == 0:
        return 1
    if any(len(r) != n for r in rows):
        raise ValueError("matrix is not square")
    if not field.modular:
        scale = 1
        irows = []
        for r in rows:
            fr = [to_fraction(x) for x in r]
            den = math.lcm(*(x.denominator for x in fr)) if fr else 1
            scale *= den
            irows.append([int(x * den) for x in fr])
        return _norm(Fraction(int_det(irows), scale))
    p = field.p
    m = [[x % p for x in r] for r in rows]
    det = 1
    for k in range(n):
        piv = next((r for r in range(k, n) if m[r][k]), None)
        if piv is None:
            return 0
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            det = -det
        pk = m[k][k]
        det = det * pk % p
        inv = pow(pk, -1, p)
        rk = m[k]
        for i in range(k + 1, n):
            f = m[i][k] * inv % p
            if f:
                ri = m[i]
                for j in range(k + 1, n):
                    ri[j] = (ri[j] - f * rk[j]) % p
    return det % p


def rref(rows: Sequence[Sequence], field: Field = QQ, ncols: int | None = None):
    """Reduced row echelon form.  Returns ``(matrix, pivot_columns)``."""
    m = [[field(x) for x in r] for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = field.inv(m[r][c])
        m[r] = [field.mul(x, inv) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [field.sub(a, field.mul(f, b)) for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Sequence[Sequence], field: Field = QQ) -> int:
    if not rows or not rows[0]:
        return 0
    return len(rref(rows, field)[1])


def nullspace(rows: Sequence[Sequence], field: Field = QQ, ncols: int | None = None):
    """Basis of ``{x : A x = 0}`` as a list of vectors."""
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if not rows:
        return [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    m, pivots = rref(rows, field, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for r, pc in enumerate(pivots):
            v[pc] = field.neg(m[r][f])
        basis.append(v)
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence, field: Field = QQ):
    """One solution of ``A x = rhs``, or ``None`` if inconsistent."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    m, pivots = rref(aug, field, ncols + 1)
    if ncols in pivots:
        return None
    x = [0] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = m[r][ncols]
    return x


def rational_reconstruct(a: int, p: int) -> Fraction:
    """Smallest fraction ``n/d`` with ``n = a*d (mod p)`` (Wang's bound)."""
    a %= p
    bound = math.isqrt(p // 2)
    r0, r1 = p, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        raise ValueError(f"no rational reconstruction of {a} mod {p}")
    return Fraction(r1, s1)


def primitive_vector(v: Sequence) -> tuple[int, ...]:
    """Scale a rational vector to coprime integers (sign preserved)."""
    fr = [to_fraction(x) for x in v]
    den = math.lcm(*(x.denominator for x in fr)) if fr else 1
    iv = [int(x * den) for x in fr]
    g = math.gcd(*iv)
    if g == 0:
        return tuple(iv)
    return tuple(x // g for x in iv)


# --------------------------------------------------------------------------
# polynomials


class MultiPoly:
    """Sparse polynomial with rational coefficients over named variables."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars: Sequence[str], terms: dict | None = None):
        self.vars = tuple(vars)
        clean = {}
        if terms:
            nv = len(self.vars)
            for e, c in terms.items():
                if c == 0:
                    continue
                if len(e) != nv:
                    raise ValueError("exponent length does not match variables")
                clean[tuple(e)] = _norm(c)
        self.terms = clean

    # -- construction -------------------------------------------------------
    @classmethod
    def constant(cls, c, vars: Sequence[str] = ()):
        return cls(vars, {(0,) * len(vars): c})

    @classmethod
    def var(cls, name: str, vars: Sequence[str]):
        vars = tuple(vars)
        e = [0] * len(vars)
        e[vars.index(name)] = 1
        return cls(vars, {tuple(e): 1})

    @classmethod
    def monomial(cls, exp: Sequence[int], vars: Sequence[str], coeff=1):
        return cls(vars, {tuple(exp): coeff})

    def _new(self, terms):
        p = MultiPoly.__new__(MultiPoly)
        p.vars = self.vars
        p.terms = terms
        return p

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.vars != self.vars:
                raise ValueError(f"variable mismatch: {self.vars} vs {other.vars}")
            return other
        return MultiPoly.constant(other, self.vars)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            v = t.get(e, 0) + c
            if v:
                t[e] = _norm(v)
            else:
                t.pop(e, None)
        return self._new(t)

    __radd__ = __add__

    def __neg__(self):
        return self._new({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            if other == 0:
                return self._new({})
            return self._new({e: _norm(c * other) for e, c in self.terms.items()})
        other = self._coerce(other)
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = t.get(e, 0) + c1 * c2
                if v:
                    t[e] = v
                else:
                    del t[e]
        return self._new({e: _norm(c) for e, c in t.items()})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = MultiPoly.constant(1, self.vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.vars == other.vars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == MultiPoly.constant(other, self.vars)
        return NotImplemented

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # -- inspection ---------------------------------------------------------
    def __len__(self):
        return len(self.terms)

    def sorted_terms(self):
        """Terms in decreasing lexicographic exponent order."""
        return sorted(self.terms.items(), reverse=True)

    def leading_term(self):
        e = max(self.terms)
        return e, self.terms[e]

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree(self, var: str | Iterable[str]) -> int:
        """Degree in one variable, or in a group of variables jointly."""
        names = [var] if isinstance(var, str) else list(var)
        idx = [self.vars.index(v) for v in names]
        return max((sum(e[i] for i in idx) for e in self.terms), default=-1)

    def is_homogeneous_in(self, group: Iterable[str]) -> bool:
        idx = [self.vars.index(v) for v in group]
        return len({sum(e[i] for i in idx) for e in self.terms}) <= 1

    def evaluate(self, values: dict | Sequence, field: Field = QQ):
        """Evaluate at a point (dict by name or sequence aligned with vars)."""
        if isinstance(values, dict):
            vals = [field(values[v]) for v in self.vars]
        else:
            vals = [field(v) for v in values]
        total = 0
        for e, c in self.terms.items():
            term = field(c)
            for x, k in zip(vals, e):
                if k:
                    term = field.mul(term, field.pow(x, k))
            total = field.add(total, term)
        return total

    def partial_evaluate(self, values: dict) -> "MultiPoly":
        """Substitute rational values for some variables, keeping the rest."""
        keep = [v for v in self.vars if v not in values]
        kidx = [self.vars.index(v) for v in keep]
        sidx = [(self.vars.index(v), to_fraction(x)) for v, x in values.items()]
        t: dict = {}
        for e, c in self.terms.items():
            val = Fraction(c)
            for i, x in sidx:
                if e[i]:
                    val *= x ** e[i]
            ne = tuple(e[i] for i in kidx)
            t[ne] = t.get(ne, 0) + val
        return MultiPoly(keep, t)

    def with_vars(self, vars: Sequence[str]) -> "MultiPoly":
        """Re-express over a superset (or reordering) of the variables."""
        vars = tuple(vars)
        pos = [vars.index(v) for v in self.vars]
        for v in vars:
            if v not in self.vars:
                continue
        t = {}
        for e, c in self.terms.items():
            ne = [0] * len(vars)
            for p, k in zip(pos, e):
                ne[p] = k
            t[tuple(ne)] = c
        if any(v not in vars for v in self.vars):
            raise ValueError("target variables must contain all current ones")
        return MultiPoly(vars, t)

    def content(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        cs = [to_fraction(c) for c in self.terms.values()]
        num = math.gcd(*(c.numerator for c in cs))
        den = math.lcm(*(c.denominator for c in cs))
        return Fraction(num, den)

    def primitive(self) -> "MultiPoly":
        """Integer coefficients with gcd 1 and positive leading coefficient."""
        if not self.terms:
            return self
        c = self.content()
        if self.leading_term()[1] < 0:
            c = -c
        return self._new({e: _norm(Fraction(v) / c) for e, v in self.terms.items()})

    # -- formatting / serialization -----------------------------------------
    def __repr__(self):
        return f"MultiPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> dict:
        terms = []
        for e, c in self.sorted_terms():
            f = to_fraction(c)
            terms.append({"exp": list(e), "num": str(f.numerator), "den": str(f.denominator)})
        return {"vars": list(self.vars), "terms": terms}

    @classmethod
    def from_json(cls, data: dict) -> "MultiPoly":
        terms = {}
        for t in data["terms"]:
            terms[tuple(t["exp"])] = Fraction(int(t["num"]), int(t.get("den", "1")))
        return cls(data["vars"], terms)


def exact_divide(num: MultiPoly, den: MultiPoly) -> MultiPoly:
    """Quotient ``q`` with ``q * den == num``; raises NotDivisible otherwise."""
    if den.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    den = num._coerce(den)
    de, dc = den.leading_term()
    rem = dict(num.terms)
    quot = {}
    while rem:
        re_ = max(rem)
        rc = rem[re_]
        qe = tuple(a - b for a, b in zip(re_, de))
        if any(k < 0 for k in qe):
            raise NotDivisible("remainder term is not divisible by the leading term")
        qc = _norm(Fraction(rc) / dc) if not isinstance(rc, int) or rc % dc else rc // dc
        quot[qe] = qc
        for e, c in den.terms.items():
            te = tuple(a + b for a, b in zip(qe, e))
            v = rem.get(te, 0) - qc * c
            if v:
                rem[te] = _norm(v)
            else:
                rem.pop(te, None)
    return MultiPoly(num.vars, quot)


def initial_form(poly: MultiPoly, var: str = "t") -> tuple[int, MultiPoly]:
    """Lowest-order part in ``var``: returns ``(order, coefficient)``.

    The coefficient is a polynomial in the remaining variables.  The zero
    polynomial gives ``(0, 0)``.
    """
    idx = poly.vars.index(var)
    rest = poly.vars[:idx] + poly.vars[idx + 1:]
    if poly.is_zero():
        return 0, MultiPoly(rest)
    low = min(e[idx] for e in poly.terms)
    t = {e[:idx] + e[idx + 1:]: c for e, c in poly.terms.items() if e[idx] == low}
    return low, MultiPoly(rest, t)


def weight_substitute(poly: MultiPoly, weights: dict[str, int], var: str = "t") -> MultiPoly:
    """Replace each variable ``u`` by ``u * t**weights[u]``; appends ``t``."""
    vars = poly.vars + (var,)
    w = [weights.get(v, 0) for v in poly.vars]
    t = {}
    for e, c in poly.terms.items():
        t[e + (sum(a * b for a, b in zip(e, w)),)] = c
    return MultiPoly(vars, t)


# --------------------------------------------------------------------------
# labeled matrices and determinants


class LabeledMatrix:
    """A matrix whose rows and columns carry hashable labels."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: Sequence, cols: Sequence, entries: Sequence[Sequence]):
        self.rows = tuple(rows)
        self.cols = tuple(cols)
        self.entries = [list(r) for r in entries]
        if len(set(self.rows)) != len(self.rows) or len(set(self.cols)) != len(self.cols):
            raise ValueError("labels must be unique per axis")
        if len(self.entries) != len(self.rows) or any(
            len(r) != len(self.cols) for r in self.entries
        ):
            raise ValueError("entry count does not match labels")

    @property
    def shape(self):
        return len(self.rows), len(self.cols)

    def __getitem__(self, key):
        r, c = key
        return self.entries[self.rows.index(r)][self.cols.index(c)]

    def submatrix(self, rows: Sequence, cols: Sequence) -> "LabeledMatrix":
        ri = {r: i for i, r in enumerate(self.rows)}
        ci = {c: i for i, c in enumerate(self.cols)}
        return LabeledMatrix(
            rows, cols, [[self.entries[ri[r]][ci[c]] for c in cols] for r in rows]
        )

    def map(self, fn) -> "LabeledMatrix":
        return LabeledMatrix(self.rows, self.cols, [[fn(x) for x in r] for r in self.entries])

    def transpose(self) -> "LabeledMatrix":
        return LabeledMatrix(self.cols, self.rows, [list(c) for c in zip(*self.entries)] if self.entries else [])

    def __eq__(self, other):
        return (
            isinstance(other, LabeledMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __repr__(self):
        return f"LabeledMatrix({len(self.rows)}x{len(self.cols)})"


def _cofactor_det(entries: Sequence[Sequence], one):
    """Laplace expansion memoized over column subsets; skips zero entries."""
    n = len(entries)
    dp = {0: one}
    for r in range(n):
        row = entries[r]
        nz = [(c, x) for c, x in enumerate(row) if x != 0]
        new: dict = {}
        for mask, val in dp.items():
            for c, x in nz:
                bit = 1 << c
                if mask & bit:
                    continue
                above = bin(mask >> (c + 1)).count("1")
                term = val * x
                if above & 1:
                    term = -term
                key = mask | bit
                if key in new:
                    new[key] = new[key] + term
                else:
                    new[key] = term
        dp = {k: v for k, v in new.items() if v != 0}
        if not dp:
            return one * 0
    return dp.get((1 << n) - 1, one * 0)


def det(M: LabeledMatrix | Sequence[Sequence], field: Field = QQ,
        symbolic_limit: int = SYMBOLIC_LIMIT):
    """Exact determinant of a square matrix of scalars or polynomials."""
    entries = M.entries if isinstance(M, LabeledMatrix) else [list(r) for r in M]
    n = len(entries)
    if any(len(r) != n for r in entries):
        raise ValueError("matrix is not square")
    polys = [x for r in entries for x in r if isinstance(x, MultiPoly)]
    if not polys:
        return field_det(entries, field)
    if n > symbolic_limit:
        raise SymbolicTooLarge(f"symbolic determinant of size {n} exceeds {symbolic_limit}")
    vars = polys[0].vars
    one = MultiPoly.constant(1, vars)
    conv = [[x if isinstance(x, MultiPoly) else MultiPoly.constant(x, vars) for x in r]
            for r in entries]
    return _cofactor_det(conv, one)


# --------------------------------------------------------------------------
# univariate polynomials mod p (coefficient lists, lowest degree first)


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def upoly_interpolate(xs: Sequence[int], ys: Sequence[int], p: int) -> list[int]:
    """Coefficients of the unique polynomial of degree < len(xs) through the points."""
    n = len(xs)
    coef = [y % p for y in ys]
    # Newton divided differences
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) * pow(xs[i] - xs[i - j], -1, p) % p
    out = [0] * n
    for k in range(n - 1, -1, -1):
        # out = out * (x - xs[k]) + coef[k]
        nxt = [0] * n
        for d in range(n - 1):
            nxt[d + 1] = (nxt[d + 1] + out[d]) % p
        for d in range(n):
            nxt[d] = (nxt[d] - xs[k] * out[d]) % p
        nxt[0] = (nxt[0] + coef[k]) % p
        out = nxt
    return _trim(out)


def upoly_divmod(a: Sequence[int], b: Sequence[int], p: int):
    a = _trim([x % p for x in a])
    b = _trim([x % p for x in b])
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    for k in range(len(a) - len(b), -1, -1):
        c = r[k + len(b) - 1] * inv % p
        q[k] = c
        if c:
            for d, bd in enumerate(b):
                r[k + d] = (r[k + d] - c * bd) % p
    return _trim(q), _trim(r)
