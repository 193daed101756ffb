"""Support families A = (A_0, ..., A_n) with optional coefficients."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .arith import MultiPoly, to_fraction
from .errors import DegenerateInput


@dataclass(frozen=True)
class SupportFamily:
    """n+1 finite supports in Z^n, each sorted lexicographically.

    ``coeffs[i][j]`` is the coefficient of the j-th point of ``A_i``: a
    Fraction, or ``None`` for a symbolic coefficient.  ``names[i][j]`` is the
    name used for that coefficient when it is symbolic.
    """

    supports: tuple
    coeffs: tuple = None
    names: tuple = None
    xvars: tuple = field(default=None)

    def __post_init__(self):
        sups = []
        for i, A in enumerate(self.supports):
            pts = sorted({tuple(int(c) for c in a) for a in A})
            if not pts:
                raise DegenerateInput(f"support {i} is empty")
            sups.append(tuple(pts))
        if not sups:
            raise DegenerateInput("no supports given")
        dims = {len(a) for A in sups for a in A}
        if len(dims) != 1:
            raise DegenerateInput("points of different dimensions")
        n = dims.pop()
        if len(sups) != n + 1:
            raise DegenerateInput(f"expected {n + 1} supports in dimension {n}, got {len(sups)}")
        object.__setattr__(self, "supports", tuple(sups))
        if self.coeffs is None:
            object.__setattr__(self, "coeffs", tuple((None,) * len(A) for A in sups))
        else:
            cs = tuple(
                tuple(None if c is None else to_fraction(c) for c in row) for row in self.coeffs
            )
            if [len(r) for r in cs] != [len(A) for A in sups]:
                raise DegenerateInput("coefficient shape does not match supports")
            object.__setattr__(self, "coeffs", cs)
        if self.names is None:
            object.__setattr__(
                self, "names",
                tuple(tuple(f"u{i}_{j}" for j in range(len(A))) for i, A in enumerate(sups)),
            )
        else:
            nm = tuple(tuple(r) for r in self.names)
            if [len(r) for r in nm] != [len(A) for A in sups]:
                raise DegenerateInput("name shape does not match supports")
            flat = [x for r in nm for x in r]
            if len(set(flat)) != len(flat):
                raise DegenerateInput("coefficient names must be unique")
            object.__setattr__(self, "names", nm)
        if self.xvars is None:
            object.__setattr__(self, "xvars", tuple(f"x{k + 1}" for k in range(n)))

    @classmethod
    def from_dict(cls, supports: Sequence, coeff_map: dict | None = None, **kw):
        """Build from unsorted supports and a map ``(i, point) -> value``."""
        fam = cls(tuple(tuple(map(tuple, A)) for A in supports), **kw)
        if coeff_map:
            cs = [list(r) for r in fam.coeffs]
            for (i, a), v in coeff_map.items():
                cs[i][fam.supports[i].index(tuple(a))] = v
            fam = fam.with_coeffs(cs)
        return fam

    @property
    def n(self) -> int:
        return len(self.supports) - 1

    @property
    def sizes(self) -> tuple:
        return tuple(len(A) for A in self.supports)

    @property
    def size(self) -> int:
        return sum(self.sizes)

    def index(self):
        """Cayley order: list of (i, j) pairs sorted by (i, lex(a))."""
        return [(i, j) for i, A in enumerate(self.supports) for j in range(len(A))]

    def flat_index(self, i: int, j: int) -> int:
        return sum(self.sizes[:i]) + j

    def flat_names(self) -> list:
        return [x for r in self.names for x in r]

    def flat_coeffs(self) -> list:
        return [c for r in self.coeffs for c in r]

    def with_coeffs(self, coeffs) -> "SupportFamily":
        return SupportFamily(self.supports, coeffs, self.names, self.xvars)

    def with_flat_coeffs(self, flat) -> "SupportFamily":
        it = iter(flat)
        return self.with_coeffs([[next(it) for _ in A] for A in self.supports])

    def symbolic(self) -> "SupportFamily":
        return SupportFamily(self.supports, None, self.names, self.xvars)

    def is_specialized(self) -> bool:
        return all(c is not None for c in self.flat_coeffs())

    def coefficient_vars(self) -> tuple:
        """Names of symbolic coefficients, in Cayley order."""
        return tuple(
            nm for nm, c in zip(self.flat_names(), self.flat_coeffs()) if c is None
        )

    def coeff_value(self, i, j, vars=None):
        """The coefficient as a MultiPoly over ``vars`` (or a scalar)."""
        c = self.coeffs[i][j]
        if vars is None:
            return c
        if c is None:
            return MultiPoly.var(self.names[i][j], vars)
        return MultiPoly.constant(c, vars)

    def polynomial(self, i: int) -> MultiPoly:
        """F_i over x-variables then symbolic coefficient variables."""
        cv = self.coefficient_vars()
        vars = self.xvars + cv
        p = MultiPoly(vars)
        for j, a in enumerate(self.supports[i]):
            c = self.coeffs[i][j]
            mono = tuple(a) + (0,) * len(cv)
            if c is None:
                e = list(mono)
                e[len(self.xvars) + cv.index(self.names[i][j])] = 1
                p = p + MultiPoly(vars, {tuple(e): 1})
            else:
                p = p + MultiPoly(vars, {mono: c})
        return p

    def to_json(self) -> dict:
        out = {"n": self.n, "supports": [[list(a) for a in A] for A in self.supports]}
        if any(c is not None for c in self.flat_coeffs()):
            out["coefficients"] = [
                ["symbolic" if c is None else str(c) for c in row] for row in self.coeffs
            ]
        default = tuple(tuple(f"u{i}_{j}" for j in range(len(A))) for i, A in enumerate(self.supports))
        if self.names != default:
            out["names"] = [list(r) for r in self.names]
        return out

    @classmethod
    def from_json(cls, data: dict) -> "SupportFamily":
        sups = [[tuple(a) for a in A] for A in data["supports"]]
        # coefficient rows follow the input point order; re-sort alongside
        order = [sorted(range(len(A)), key=lambda j, A=A: A[j]) for A in sups]
        coeffs = None
        if "coefficients" in data:
            coeffs = [
                [None if row[j] == "symbolic" else Fraction(row[j]) for j in o]
                for row, o in zip(data["coefficients"], order)
            ]
        names = None
        if "names" in data:
            names = [[row[j] for j in o] for row, o in zip(data["names"], order)]
        for A in sups:
            if len(set(A)) != len(A):
                raise DegenerateInput("duplicate points in a support")
        return cls(tuple(tuple(A) for A in sups), coeffs, names)
