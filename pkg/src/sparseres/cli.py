"""Command-line front end.

Every subcommand reads a system description (JSON file or ``-`` for stdin)
and writes JSON to stdout, except ``plot`` which writes SVG or OBJ.  Exit
status is 0 on success, 2 when a mathematical hypothesis fails and 1 on
input errors.
"""
from __future__ import annotations

import argparse
import json
import math
import random
import sys
from fractions import Fraction

import jsonschema

from .arith import DEFAULT_PRIME, GF, QQ
from .canny_emiris import _check_essential, ce_pair, select_delta
from .elimination import essential_families, sparse_resultant
from .errors import HypothesisFailure, SparseResError
from .family import SupportFamily
from .geometry import Polytope, _dot, lattice_points, mixed_volume_minus
from .interp import interpolate, interpolate_by_values, projected_sampler
from .koszul import compose_is_zero, det_complex, koszul_complex
from .respoly import compute_pi, preprocess_specialized
from .subdivision import generic_mixed_subdivision, mixed_subdivision

_VECTOR = {"type": "array", "items": {"type": "integer"}}
_COEFF = {
    "anyOf": [
        {"const": "symbolic"},
        {"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*\d+)?\s*$"},
        {"type": "integer"},
    ]
}

SYSTEM_SCHEMA = {
    "type": "object",
    "required": ["n", "supports"],
    "properties": {
        "n": {"type": "integer", "minimum": 0},
        "supports": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "minItems": 1, "items": _VECTOR},
        },
        "coefficients": {"type": "array", "items": {"type": "array", "items": _COEFF}},
        "names": {"type": "array", "items": {"type": "array", "items": {"type": "string"}}},
        "seed": {"type": "integer"},
    },
}

POLYTOPE_SCHEMA = {
    "type": "object",
    "required": ["vertices"],
    "properties": {
        "vertices": {"type": "array", "minItems": 1, "items": {"type": "array"}},
        "facets": {"type": "array"},
    },
}


class InputError(SparseResError):
    pass


def _load(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _validate(data, schema, what: str):
    errors = sorted(jsonschema.Draft202012Validator(schema).iter_errors(data), key=str)
    if errors:
        err = errors[0]
        pointer = "/" + "/".join(str(p) for p in err.absolute_path)
        raise InputError(f"{what} {pointer}: {err.message}")


def load_system(path: str) -> tuple[SupportFamily, dict]:
    data = _load(path)
    _validate(data, SYSTEM_SCHEMA, "system")
    if len(data["supports"]) != data["n"] + 1:
        raise InputError(f"system /supports: expected {data['n'] + 1} supports")
    for i, A in enumerate(data["supports"]):
        for j, a in enumerate(A):
            if len(a) != data["n"]:
                raise InputError(f"system /supports/{i}/{j}: expected {data['n']} coordinates")
    for key in ("coefficients", "names"):
        if key in data:
            if [len(r) for r in data[key]] != [len(A) for A in data["supports"]]:
                raise InputError(f"system /{key}: shape does not match supports")
    if "coefficients" in data:
        data = dict(data)
        data["coefficients"] = [[str(c) for c in r] for r in data["coefficients"]]
    return SupportFamily.from_json(data), data


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _seed(args, data) -> int:
    return args.seed if args.seed is not None else data.get("seed", 0)


def _field(args):
    return GF(args.prime) if args.prime else QQ


def _num(x):
    x = Fraction(x)
    return str(x)


# --------------------------------------------------------------------------
# subcommands


def cmd_analyze(args):
    A, _ = load_system(args.input)
    return essential_families(A).to_json()


def cmd_mixedvol(args):
    A, _ = load_system(args.input)
    return {"mixed_volumes": [mixed_volume_minus(A.supports, i) for i in range(A.n + 1)]}


def cmd_subdivision(args):
    A, data = load_system(args.input)
    if args.lifting:
        S = mixed_subdivision(A, [Fraction(x) for x in args.lifting.split(",")])
    else:
        S = generic_mixed_subdivision(A, random.Random(_seed(args, data)))
    out = S.to_json()
    out["mixed_volumes"] = [str(S.mixed_volume_sum(i)) for i in range(A.n + 1)]
    return out


def cmd_ce_matrix(args):
    A, data = load_system(args.input)
    _check_essential(A)
    pair = ce_pair(A, random.Random(_seed(args, data)), greedy=args.greedy)
    out = pair.to_json()
    out["size"] = pair.size
    return out


def cmd_resultant(args):
    A, data = load_system(args.input)
    seed = _seed(args, data)
    if args.mode == "symbolic":
        res = sparse_resultant(A, "symbolic", seed=seed, greedy=args.greedy)
        return {"resultant": res.to_json(), "text": str(res)}
    val = sparse_resultant(A, "specialized", seed=seed, greedy=args.greedy, field=_field(args))
    return {"value": _num(val), "field": repr(_field(args))}


def _parse_delta(text, A, rng):
    if text:
        return tuple(Fraction(x) for x in text.split(","))
    return select_delta(generic_mixed_subdivision(A, rng), rng)


def cmd_koszul(args):
    A, data = load_system(args.input)
    rng = random.Random(_seed(args, data))
    delta = _parse_delta(args.delta, A, rng)
    C = koszul_complex(A, delta)
    out = C.to_json()
    out["delta"] = [str(d) for d in delta]
    if A.is_specialized():
        field = _field(args)
        values = [list(r) for r in A.coeffs]
    else:
        field = GF(args.prime or DEFAULT_PRIME)
        values = [[field.random(rng) for _ in Ai] for Ai in A.supports]
        out["specialization"] = [[str(v) for v in r] for r in values]
    out["field"] = repr(field)
    out["exact"] = compose_is_zero(C, values, field)
    out["determinant"] = _num(det_complex(C, values, field))
    return out


def resolve_projection(A: SupportFamily, spec: str | None):
    """Parse ``--project``; returns ``(family, kept flat indices, names)``.

    ``free`` keeps the symbolic coefficients and drops redundant specialized
    points first; otherwise a comma list of indices or coefficient names.
    """
    if spec is None:
        return A, None, A.flat_names()
    if spec.strip() == "free":
        specialized = [k for k, c in enumerate(A.flat_coeffs()) if c is not None]
        B, kept = preprocess_specialized(A, specialized)
        proj = [kept.index(k) for k in range(A.size) if A.flat_coeffs()[k] is None]
        return B, proj, [B.flat_names()[k] for k in proj]
    names = A.flat_names()
    proj = []
    for tok in spec.split(","):
        tok = tok.strip()
        if tok.lstrip("-").isdigit():
            k = int(tok)
        elif tok in names:
            k = names.index(tok)
        else:
            raise InputError(f"--project: unknown coordinate {tok!r}")
        if not 0 <= k < A.size:
            raise InputError(f"--project: index {k} out of range")
        proj.append(k)
    proj = sorted(set(proj))
    return A, proj, [names[k] for k in proj]


def cmd_respoly(args):
    A, data = load_system(args.input)
    B, proj, names = resolve_projection(A, args.project)
    res = compute_pi(B, proj, _seed(args, data))
    P = res.polytope
    js = P.to_json()
    out = {"coordinates": names}
    if args.emit == "vrep":
        out.update(vertices=js["vertices"], dim=P.dim)
    elif args.emit == "hrep":
        out.update(facets=js["facets"], equations=js["equations"], dim=P.dim)
    elif args.emit == "triangulation":
        out.update(vertices=js["vertices"], triangulation=js["triangulation"])
    else:
        out.update(res.stats.to_json())
        out["within_bound"] = res.stats.calls <= res.stats.bound
    if args.emit != "stats":
        out["oracle_calls"] = res.stats.calls
    return out


def _load_polytope(path) -> Polytope:
    data = _load(path)
    _validate(data, POLYTOPE_SCHEMA, "polytope")
    return Polytope.from_json(data)


def cmd_interp(args):
    A, data = load_system(args.input)
    seed = _seed(args, data)
    B, proj, names = resolve_projection(A, args.project)
    if args.polytope:
        Pi = _load_polytope(args.polytope)
    else:
        Pi = compute_pi(B, proj, seed).polytope
    coords = proj if proj is not None else list(range(B.size))
    if len(Pi.vertices[0]) != len(coords):
        raise InputError("polytope dimension does not match the projection")
    if all(any(c is None for c in r) for r in B.coeffs):
        poly = interpolate(Pi, projected_sampler(B, coords, seed), names)
        method = "kernel"
    else:
        poly = interpolate_by_values(B, coords, Pi, names, seed)
        method = "values"
    return {"method": method, "polynomial": poly.to_json(), "text": str(poly),
            "candidates": len(lattice_points(Pi))}


def _svg(P: Polytope) -> str:
    verts = _cyclic(P.vertices)
    xs = [float(v[0]) for v in verts]
    ys = [float(v[1]) for v in verts]
    lo_x, lo_y = min(xs) - 1, min(ys) - 1
    w, h = max(xs) - lo_x + 1, max(ys) - lo_y + 1
    s = 400 / max(w, h)
    pts = " ".join(f"{(x - lo_x) * s:.2f},{(h - (y - lo_y)) * s:.2f}" for x, y in zip(xs, ys))
    dots = "".join(
        f'<circle cx="{(x - lo_x) * s:.2f}" cy="{(h - (y - lo_y)) * s:.2f}" r="3"/>'
        for x, y in zip(xs, ys)
    )
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w * s:.0f}" height="{h * s:.0f}">'
        f'<polygon points="{pts}" fill="#cde" stroke="#135"/>{dots}</svg>\n'
    )


def _cyclic(verts):
    """Order the vertices of a polygon counterclockwise."""
    if len(verts) < 3:
        return list(verts)
    cx = sum(Fraction(v[0]) for v in verts) / len(verts)
    cy = sum(Fraction(v[1]) for v in verts) / len(verts)
    return sorted(verts, key=lambda v: math.atan2(float(Fraction(v[1]) - cy), float(Fraction(v[0]) - cx)))


def _obj(P: Polytope) -> str:
    lines = [f"v {' '.join(str(c) for c in v)}" for v in P.vertices]
    idx = {v: k + 1 for k, v in enumerate(P.vertices)}
    if P.dim == 3:
        for u, o in P.facets:
            face = [v for v in P.vertices if _dot(u, v) == -o]
            lines.append("f " + " ".join(str(idx[v]) for v in _face_cycle(face, u)))
    elif P.dim == 2:
        lines.append("f " + " ".join(str(idx[v]) for v in P.vertices))
    else:
        lines += [f"l {a + 1} {b + 1}" for a in range(len(P.vertices)) for b in range(a + 1, len(P.vertices))]
    return "\n".join(lines) + "\n"


def _face_cycle(face, u):
    """Order a 3D facet's vertices around its centroid."""
    c = [sum(Fraction(v[k]) for v in face) / len(face) for k in range(3)]
    a = [Fraction(face[0][k]) - c[k] for k in range(3)]
    b = [u[1] * a[2] - u[2] * a[1], u[2] * a[0] - u[0] * a[2], u[0] * a[1] - u[1] * a[0]]

    def ang(v):
        d = [Fraction(v[k]) - c[k] for k in range(3)]
        return math.atan2(float(_dot(b, d)), float(_dot(a, d)))

    return sorted(face, key=ang)


def cmd_plot(args):
    P = _load_polytope(args.input)
    if P.ambient == 2:
        return _svg(P)
    if P.ambient == 3:
        return _obj(P)
    raise InputError("plot needs a polytope in 2 or 3 dimensions")


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="JSON file, or - for stdin")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--prime", type=int, default=None, help="work modulo this prime")
    common.add_argument("--greedy", action="store_true", help="greedy Canny-Emiris submatrix")
    common.add_argument("--mode", choices=["symbolic", "specialized"], default="symbolic")

    parser = argparse.ArgumentParser(prog="sparseres", description="Sparse resultants and resultant polytopes.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="essential subfamilies and codimension")
    sub.add_parser("mixedvol", parents=[common], help="mixed volumes MV_-i")
    p = sub.add_parser("subdivision", parents=[common], help="coherent mixed subdivision")
    p.add_argument("--lifting", help="comma-separated heights in Cayley order")
    sub.add_parser("ce-matrix", parents=[common], help="Canny-Emiris matrices H and E")
    sub.add_parser("resultant", parents=[common], help="the sparse resultant")
    p = sub.add_parser("koszul", parents=[common], help="graded Koszul complex and its determinant")
    p.add_argument("--delta", help="comma-separated translation vector")
    p = sub.add_parser("respoly", parents=[common], help="resultant polytope or a projection")
    p.add_argument("--project", help="indices or coefficient names to keep, or 'free'")
    p.add_argument("--emit", choices=["vrep", "hrep", "triangulation", "stats"], default="vrep")
    p = sub.add_parser("interp", parents=[common], help="interpolate over a Newton polytope")
    p.add_argument("--project", help="as for respoly")
    p.add_argument("--polytope", help="Newton polytope JSON (computed if omitted)")
    p = sub.add_parser("plot", help="SVG (2D) or OBJ (3D) scene of a polytope JSON")
    p.add_argument("input")
    return parser


COMMANDS = {
    "analyze": cmd_analyze,
    "mixedvol": cmd_mixedvol,
    "subdivision": cmd_subdivision,
    "ce-matrix": cmd_ce_matrix,
    "resultant": cmd_resultant,
    "koszul": cmd_koszul,
    "respoly": cmd_respoly,
    "interp": cmd_interp,
    "plot": cmd_plot,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = COMMANDS[args.command](args)
    except HypothesisFailure as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (SparseResError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(out if isinstance(out, str) else _dump(out) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
