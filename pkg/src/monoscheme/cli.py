"""Declarative command line front end.

Input documents are JSON objects carrying a "format": 1 field and a
"kind" of "monoid", "fan", or "scheme-build-script".  A monoid document
gives an ambient group ({"rank": r, "torsion": [...]}), generators as
integer vectors (or {"free": [...], "torsion": [...]} pairs), and an
optional collapsed "ideal"; ideal generators and element fields may
also be written as products of named generators ("x^2*y", "xy²" style
superscripts included), with names taken from an optional "names" list
defaulting to x, y, z for up to three generators and x1, x2, ... past
that.  A fan document lists primitive "rays" and "cones" by ray index.
A build script constructs a scheme through named steps (mspec of a
monoid, a fan, projective space, products, wedges, disjoint unions,
gluing along the generic point, or a verbatim point/stalk/map table).

Every command reads one document from a file argument or stdin, writes
its result to stdout, and keeps diagnostics on stderr.  Group-valued
results always appear as {"rank": r, "invariant_factors": [d1, ...]}
with d1 | d2 | ... ; identical invocations produce byte-identical
output.  Exit status is 0 on success (including a verdict of REFUTED
from the verify command, which is a successful determination), 2 on a
malformed document or violated precondition, 3 when a verification is
inconclusive, and 1 when a cross-check refutes a computed answer.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from .divisors import (
    cartier_report,
    class_group,
    is_locally_factorial,
    mayer_vietoris,
    nor_comparison,
    picard_group,
    principal_divisor,
    units_sheaf,
)
from .ideals import MonoidIdeal, mspec
from .lattice import IntMatrix, PresentedAbGroup
from .monoid import (
    ZERO,
    AffineMonoid,
    AmbientGroup,
    GroupElement,
    GroupHom,
    MonoidHom,
    PcMonoid,
)
from .normalization import (
    is_normal,
    is_seminormal,
    normalization_scheme,
    normalize,
    seminormalize,
)
from .oracle import EnumerationBudget, verify
from .scheme import (
    Fan,
    MonoidScheme,
    _label_key,
    disjoint_union,
    from_fan,
    glue_along_generic,
    mspec_scheme,
    product,
    projective_space,
    wedge,
)


class DocumentError(ValueError):
    """A schema or invariant failure, annotated with the position of
    the offending field."""


def _fail(path: str, msg: str):
    raise DocumentError(f"{path}: {msg}")


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _get(doc: dict, path: str, key: str, required: bool = True):
    if key not in doc:
        if required:
            _fail(path, f"missing field {key!r}")
        return None
    return doc[key]


def _check_keys(doc: dict, path: str, allowed: set):
    for k in doc:
        if k not in allowed:
            _fail(f"{path}.{k}", "unknown field")


# ---------------------------------------------------------------------------
# element and monoid parsing

_SUPERSCRIPTS = str.maketrans("⁰¹²³⁴⁵⁶⁷⁸⁹", "0123456789")
_TERM = re.compile(r"([A-Za-z][A-Za-z0-9_]*)(?:\^(-?\d+))?\Z")


def _default_names(n: int) -> list[str]:
    if n <= 3:
        return ["x", "y", "z"][:n]
    return [f"x{i + 1}" for i in range(n)]


class _MonoidContext:
    """Ambient group plus named generators, for resolving elements."""

    def __init__(self, ambient: AmbientGroup, gens: list, names: list[str]):
        self.ambient = ambient
        self.gens = gens
        self.names = dict(zip(names, gens))


def _resolve_named(text: str, ctx: _MonoidContext, path: str) -> GroupElement:
    s = re.sub(r"[⁰¹²³⁴⁵⁶⁷⁸⁹]+",
               lambda m: "^" + m.group(0).translate(_SUPERSCRIPTS), text)
    s = s.replace("·", "*").replace(" ", "")
    if not s:
        _fail(path, "empty element expression")
    total = ctx.ambient.zero()
    for term in s.split("*"):
        m = _TERM.match(term)
        if m is None:
            _fail(path, f"malformed term {term!r} (expected name or name^k)")
        name, exp = m.group(1), int(m.group(2) or 1)
        if name not in ctx.names:
            _fail(path, f"unknown generator name {name!r}")
        total = total + ctx.names[name].scaled(exp)
    return total


def _parse_vector(v, length: int, path: str) -> tuple:
    if not isinstance(v, list) or not all(_is_int(c) for c in v):
        _fail(path, "expected a list of integers")
    if len(v) != length:
        _fail(path, f"expected {length} coordinates, got {len(v)}")
    return tuple(v)


def _parse_element(v, ctx: _MonoidContext, path: str) -> GroupElement:
    amb = ctx.ambient
    if isinstance(v, str):
        return _resolve_named(v, ctx, path)
    if isinstance(v, list):
        return amb.element(_parse_vector(v, amb.rank, path))
    if isinstance(v, dict):
        _check_keys(v, path, {"free", "torsion"})
        free = _parse_vector(_get(v, path, "free"), amb.rank, f"{path}.free")
        tors = v.get("torsion", [0] * len(amb.torsion))
        return amb.element(free, _parse_vector(tors, len(amb.torsion),
                                               f"{path}.torsion"))
    _fail(path, "expected a vector, a free/torsion pair, or a named product")


def _parse_elements(vs, ctx: _MonoidContext, path: str) -> list[GroupElement]:
    if not isinstance(vs, list):
        _fail(path, "expected a list of elements")
    return [_parse_element(v, ctx, f"{path}[{i}]") for i, v in enumerate(vs)]


_MONOID_KEYS = {"format", "kind", "ambient", "generators", "names", "ideal",
                "element", "left", "right", "claim"}


def _parse_monoid_body(doc: dict, path: str):
    """Returns (cancellative monoid, ideal generators or None, context)."""
    _check_keys(doc, path, _MONOID_KEYS)
    amb_doc = _get(doc, path, "ambient")
    if not isinstance(amb_doc, dict):
        _fail(f"{path}.ambient", "expected an object")
    _check_keys(amb_doc, f"{path}.ambient", {"rank", "torsion"})
    rank = _get(amb_doc, f"{path}.ambient", "rank")
    if not _is_int(rank) or rank < 0:
        _fail(f"{path}.ambient.rank", "expected a nonnegative integer")
    torsion = amb_doc.get("torsion", [])
    if not isinstance(torsion, list) or not all(_is_int(t) for t in torsion):
        _fail(f"{path}.ambient.torsion", "expected a list of integers")
    try:
        amb = AmbientGroup(rank, tuple(torsion))
    except ValueError as e:
        _fail(f"{path}.ambient", str(e))
    gens_doc = _get(doc, path, "generators")
    if not isinstance(gens_doc, list):
        _fail(f"{path}.generators", "expected a list")
    bare = _MonoidContext(amb, [], [])
    gens = []
    for i, g in enumerate(gens_doc):
        if isinstance(g, str):
            _fail(f"{path}.generators[{i}]",
                  "generators must be vectors; names refer to them")
        gens.append(_parse_element(g, bare, f"{path}.generators[{i}]"))
    names = doc.get("names", _default_names(len(gens)))
    if (not isinstance(names, list) or len(names) != len(gens)
            or len(set(names)) != len(names)
            or not all(isinstance(n, str) and _TERM.match(n) and "^" not in n
                       for n in names)):
        _fail(f"{path}.names", "expected distinct identifiers, one per generator")
    ctx = _MonoidContext(amb, gens, names)
    canc = AffineMonoid(amb, gens)
    ideal = None
    if "ideal" in doc:
        ideal = _parse_elements(doc["ideal"], ctx, f"{path}.ideal")
    return canc, ideal, ctx


def _parse_fan_body(doc: dict, path: str) -> Fan:
    _check_keys(doc, path, {"format", "kind", "dim", "rays", "cones", "element"})
    dim = _get(doc, path, "dim")
    if not _is_int(dim) or dim < 0:
        _fail(f"{path}.dim", "expected a nonnegative integer")
    rays_doc = _get(doc, path, "rays")
    if not isinstance(rays_doc, list):
        _fail(f"{path}.rays", "expected a list")
    rays = [_parse_vector(r, dim, f"{path}.rays[{i}]")
            for i, r in enumerate(rays_doc)]
    cones_doc = _get(doc, path, "cones")
    if not isinstance(cones_doc, list):
        _fail(f"{path}.cones", "expected a list")
    cones = []
    for i, c in enumerate(cones_doc):
        if not isinstance(c, list) or not all(_is_int(j) for j in c):
            _fail(f"{path}.cones[{i}]", "expected a list of ray indices")
        cones.append(frozenset(c))
    try:
        return Fan(dim, tuple(rays), frozenset(cones))
    except ValueError as e:
        _fail(path, str(e))


# ---------------------------------------------------------------------------
# scheme build scripts

def _label_from_json(v, path: str):
    if _is_int(v) or isinstance(v, str):
        return v
    if isinstance(v, list):
        return tuple(_label_from_json(x, path) for x in v)
    if isinstance(v, dict) and set(v) == {"set"} and isinstance(v["set"], list):
        return frozenset(_label_from_json(x, path) for x in v["set"])
    _fail(path, "expected a point label (integer, string, list, or set)")


def _label_to_json(lab):
    if isinstance(lab, frozenset):
        return {"set": [_label_to_json(x)
                        for x in sorted(lab, key=_label_key)]}
    if isinstance(lab, tuple):
        return [_label_to_json(x) for x in lab]
    return lab


def _parse_explicit_step(step: dict, path: str) -> MonoidScheme:
    for key in ("points", "generizations", "stalks", "maps"):
        if not isinstance(_get(step, path, key), list):
            _fail(f"{path}.{key}", "expected a list")
    points = [_label_from_json(p, f"{path}.points[{i}]")
              for i, p in enumerate(step["points"])]
    if len({_label_key(p) for p in points}) != len(points):
        _fail(f"{path}.points", "duplicate point label")
    if len(step["stalks"]) != len(points) or len(step["generizations"]) != len(points):
        _fail(path, "stalks and generizations must parallel the points")
    stalks = {}
    for p, body in zip(points, step["stalks"]):
        if not isinstance(body, dict):
            _fail(f"{path}.stalks", "expected monoid objects")
        canc, ideal, _ = _parse_monoid_body(body, f"{path}.stalks")
        stalks[p] = PcMonoid(canc, ideal or [])
    gen = {}
    for p, labs in zip(points, step["generizations"]):
        if not isinstance(labs, list):
            _fail(f"{path}.generizations", "expected lists of labels")
        gen[p] = frozenset(_label_from_json(v, f"{path}.generizations")
                           for v in labs)
    maps = {}
    for i, entry in enumerate(step["maps"]):
        epath = f"{path}.maps[{i}]"
        if not isinstance(entry, dict):
            _fail(epath, "expected an object")
        _check_keys(entry, epath, {"from", "to", "matrix"})
        x = _label_from_json(_get(entry, epath, "from"), f"{epath}.from")
        y = _label_from_json(_get(entry, epath, "to"), f"{epath}.to")
        if x not in stalks or y not in stalks:
            _fail(epath, "map endpoint is not a listed point")
        src, dst = stalks[x].ambient, stalks[y].ambient
        rows_doc = _get(entry, epath, "matrix")
        if not isinstance(rows_doc, list) or len(rows_doc) != dst.pres_dim:
            _fail(f"{epath}.matrix", f"expected {dst.pres_dim} rows")
        rows = [_parse_vector(r, src.pres_dim, f"{epath}.matrix[{j}]")
                for j, r in enumerate(rows_doc)]
        gh = GroupHom(src, dst, IntMatrix.from_rows(rows, cols=src.pres_dim))
        maps[(x, y)] = MonoidHom(stalks[x], stalks[y], gh)
    return MonoidScheme(points, gen, stalks, maps)


_STEP_KEYS = {"define", "op", "monoid", "fan", "n", "of", "at",
              "points", "generizations", "stalks", "maps"}


def _parse_script(doc: dict, path: str) -> MonoidScheme:
    _check_keys(doc, path, {"format", "kind", "steps", "result", "element"})
    steps = _get(doc, path, "steps")
    if not isinstance(steps, list) or not steps:
        _fail(f"{path}.steps", "expected a nonempty list of steps")
    env: dict[str, MonoidScheme] = {}
    last = None
    for i, step in enumerate(steps):
        spath = f"{path}.steps[{i}]"
        if not isinstance(step, dict):
            _fail(spath, "expected an object")
        _check_keys(step, spath, _STEP_KEYS)
        name = _get(step, spath, "define")
        if not isinstance(name, str) or name in env:
            _fail(f"{spath}.define", "expected a fresh step name")
        op = _get(step, spath, "op")

        def pieces(count=None):
            of = _get(step, spath, "of")
            if not isinstance(of, list) or not all(n in env for n in of):
                _fail(f"{spath}.of", "expected a list of defined step names")
            if count is not None and len(of) != count:
                _fail(f"{spath}.of", f"expected exactly {count} operands")
            return [env[n] for n in of]

        if op == "mspec":
            body = _get(step, spath, "monoid")
            if not isinstance(body, dict):
                _fail(f"{spath}.monoid", "expected a monoid object")
            canc, ideal, _ = _parse_monoid_body(body, f"{spath}.monoid")
            env[name] = mspec_scheme(PcMonoid(canc, ideal or []))
        elif op == "fan":
            body = _get(step, spath, "fan")
            if not isinstance(body, dict):
                _fail(f"{spath}.fan", "expected a fan object")
            env[name] = from_fan(_parse_fan_body(body, f"{spath}.fan"))
        elif op == "projective-space":
            n = _get(step, spath, "n")
            if not _is_int(n) or n < 1:
                _fail(f"{spath}.n", "expected a positive integer")
            env[name] = projective_space(n)
        elif op == "glue-along-generic":
            env[name] = glue_along_generic(pieces())
        elif op == "disjoint-union":
            env[name] = disjoint_union(pieces())
        elif op == "product":
            a, b = pieces(2)
            env[name] = product(a, b)
        elif op == "wedge":
            a, b = pieces(2)
            at = _get(step, spath, "at")
            if not isinstance(at, list) or len(at) != 2:
                _fail(f"{spath}.at", "expected the two points to join")
            la = _label_from_json(at[0], f"{spath}.at[0]")
            lb = _label_from_json(at[1], f"{spath}.at[1]")
            env[name] = wedge(a, la, b, lb)
        elif op == "explicit":
            env[name] = _parse_explicit_step(step, spath)
        else:
            _fail(f"{spath}.op", f"unknown operation {op!r}")
        last = name
    result = doc.get("result", last)
    if result not in env:
        _fail(f"{path}.result", f"undefined step name {result!r}")
    return env[result]


# ---------------------------------------------------------------------------
# parsing and serialization of whole documents

_KINDS = ("monoid", "fan", "scheme-build-script")


def _document_kind(doc) -> str:
    if not isinstance(doc, dict):
        raise DocumentError("$: expected a JSON object")
    if doc.get("format") != 1:
        _fail("$.format", "expected the field format: 1")
    kind = _get(doc, "$", "kind")
    if kind not in _KINDS:
        _fail("$.kind", f"expected one of {', '.join(_KINDS)}")
    return kind


def parse_document(doc: dict):
    """The object a document describes: an affine monoid, a pc monoid
    (when an ideal field is present), a fan, or a monoid scheme."""
    kind = _document_kind(doc)
    if kind == "monoid":
        canc, ideal, _ = _parse_monoid_body(doc, "$")
        return canc if ideal is None else PcMonoid(canc, ideal)
    if kind == "fan":
        return _parse_fan_body(doc, "$")
    return _parse_script(doc, "$")


def _element_json(el: GroupElement):
    if el.group.torsion:
        return {"free": list(el.free), "torsion": list(el.tors)}
    return list(el.free)


def _element_sort_key(el: GroupElement):
    return el.key()


def _monoid_body_json(canc: AffineMonoid, ideal) -> dict:
    amb = canc.ambient
    ambient = {"rank": amb.rank}
    if amb.torsion:
        ambient["torsion"] = list(amb.torsion)
    body = {"ambient": ambient,
            "generators": [_element_json(g) for g in canc.gens]}
    if ideal is not None:
        body["ideal"] = [_element_json(g) for g in ideal]
    return body


def _monoid_document(canc: AffineMonoid, ideal) -> dict:
    return {"format": 1, "kind": "monoid", **_monoid_body_json(canc, ideal)}


def serialize(obj) -> dict:
    """A document that parses back to an equal object."""
    if isinstance(obj, AffineMonoid):
        return _monoid_document(obj, None)
    if isinstance(obj, PcMonoid):
        return _monoid_document(obj.cancellative, obj.ideal_gens)
    if isinstance(obj, Fan):
        cones = sorted((sorted(c) for c in obj.cones),
                       key=lambda c: (len(c), c))
        return {"format": 1, "kind": "fan", "dim": obj.rank,
                "rays": [list(r) for r in obj.rays], "cones": cones}
    if isinstance(obj, MonoidScheme):
        step = {"define": "X", "op": "explicit",
                "points": [_label_to_json(p) for p in obj.points],
                "generizations": [
                    [_label_to_json(y) for y in sorted(obj.gen[p], key=_label_key)]
                    for p in obj.points],
                "stalks": [_monoid_body_json(obj.stalks[p].cancellative,
                                             obj.stalks[p].ideal_gens)
                           for p in obj.points],
                "maps": [{"from": _label_to_json(x), "to": _label_to_json(y),
                          "matrix": [list(r)
                                     for r in obj.maps[(x, y)].ghom.matrix.entries]}
                         for x, y in sorted(obj.maps,
                                            key=lambda k: (_label_key(k[0]),
                                                           _label_key(k[1])))]}
        return {"format": 1, "kind": "scheme-build-script",
                "steps": [step], "result": "X"}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# ---------------------------------------------------------------------------
# output rendering

def _group_json(g: PresentedAbGroup) -> dict:
    return {"rank": g.rank, "invariant_factors": list(g.invariant_factors)}


def _group_str(v: dict) -> str:
    parts = []
    if v["rank"] == 1:
        parts.append("Z")
    elif v["rank"] > 1:
        parts.append(f"Z^{v['rank']}")
    parts += [f"Z/{d}" for d in v["invariant_factors"]]
    return " + ".join(parts) if parts else "0"


def _is_scalar(v) -> bool:
    return v is None or isinstance(v, (int, str, bool))


def _text_lines(v, label=None, indent=0):
    pad = "  " * indent
    tag = f"{label}: " if label is not None else ""
    if isinstance(v, dict) and set(v) == {"rank", "invariant_factors"}:
        yield f"{pad}{tag}{_group_str(v)}"
    elif isinstance(v, dict):
        if label is not None:
            yield f"{pad}{label}:"
            indent += 1
        for k in sorted(v):
            yield from _text_lines(v[k], k, indent)
    elif isinstance(v, list) and not all(_is_scalar(x) for x in v):
        if label is not None:
            yield f"{pad}{label}:"
            indent += 1
        for i, item in enumerate(v):
            yield from _text_lines(item, str(i), indent)
    else:
        yield f"{pad}{tag}{json.dumps(v, sort_keys=True)}"


def _emit(payload, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=True)
    return "\n".join(_text_lines(payload))


def _json_safe(v):
    if v is ZERO:
        return "0"
    if isinstance(v, GroupElement):
        return _element_json(v)
    if isinstance(v, (tuple, list)):
        return [_json_safe(x) for x in v]
    if _is_scalar(v):
        return v
    return repr(v)


# ---------------------------------------------------------------------------
# command helpers

def _require_kind(kind: str, wanted: str, command: str):
    if kind != wanted:
        raise DocumentError(f"{command} needs a {wanted} document")


def _doc_pc_monoid(doc: dict):
    canc, ideal, ctx = _parse_monoid_body(doc, "$")
    return PcMonoid(canc, ideal or []), ctx


def _doc_scheme(doc: dict, kind: str):
    """The scheme a document denotes, with the monoid context when the
    document was a monoid (for resolving named elements)."""
    if kind == "monoid":
        pc, ctx = _doc_pc_monoid(doc)
        return mspec_scheme(pc), ctx
    if kind == "fan":
        return from_fan(_parse_fan_body(doc, "$")), None
    return _parse_script(doc, "$"), None


def _doc_base_ideal(doc: dict, command: str):
    """The collapsed ideal of a monoid document, as the zero ideal of
    the quotient: the ideal the ideal-theory commands operate on."""
    if "ideal" not in doc:
        raise DocumentError(f"{command} needs an ideal field")
    pc, ctx = _doc_pc_monoid(doc)
    return MonoidIdeal(pc, ()), ctx


def _budget(args) -> EnumerationBudget:
    return EnumerationBudget(max_degree=args.degree_bound)


def _no_verify(args, command: str):
    if args.verify:
        raise DocumentError(f"--verify is not supported for {command}")


def _prime_json(prime) -> dict:
    return {"face": list(prime.face.ray_indices), "height": prime.height()}


def _minimal_copy(m: AffineMonoid) -> AffineMonoid:
    """The same submonoid regenerated from units and atoms, when that
    smaller list still generates; otherwise the monoid as given."""
    slim = AffineMonoid(m.ambient, list(m.unit_group.gens) + list(m.atoms))
    if slim.same_submonoid(m):
        return slim
    return m


def _ideal_gens_json(ideal: MonoidIdeal) -> list:
    return [_element_json(g)
            for g in sorted(ideal.cgens, key=_element_sort_key)]


# ---------------------------------------------------------------------------
# commands

_HANDLERS = {}


def _command(name):
    def register(fn):
        _HANDLERS[name] = fn
        return fn
    return register


@_command("mspec")
def _cmd_mspec(doc, kind, args):
    _require_kind(kind, "monoid", "mspec")
    _no_verify(args, "mspec")
    pc, _ = _doc_pc_monoid(doc)
    primes = mspec(pc)
    pts = sorted((_prime_json(p) for p in primes),
                 key=lambda d: (d["height"], d["face"]))
    return {"count": len(primes), "points": pts}, []


@_command("ideal-op")
def _cmd_ideal_op(doc, kind, args):
    _require_kind(kind, "monoid", "ideal-op")
    _no_verify(args, "ideal-op")
    pc, ctx = _doc_pc_monoid(doc)
    if "left" not in doc or "right" not in doc:
        raise DocumentError("ideal-op needs left and right fields")
    left = MonoidIdeal(pc, _parse_elements(doc["left"], ctx, "$.left"))
    rgens = _parse_elements(doc["right"], ctx, "$.right")
    bound = args.degree_bound
    if args.op == "colon":
        if not rgens:
            raise DocumentError("colon needs a nonempty right hand side")
        out = left.colon(rgens[0], degree_bound=bound)
        for g in rgens[1:]:
            out = out.intersection(left.colon(g, degree_bound=bound),
                                   degree_bound=bound)
    else:
        right = MonoidIdeal(pc, rgens)
        if args.op == "sum":
            out = left.sum(right)
        elif args.op == "product":
            out = left.product(right)
        else:
            out = left.intersection(right, degree_bound=bound)
    return {"operation": args.op, "generators": _ideal_gens_json(out),
            "is_unit_ideal": out.is_unit_ideal}, []


@_command("radical")
def _cmd_radical(doc, kind, args):
    _require_kind(kind, "monoid", "radical")
    base, _ = _doc_base_ideal(doc, "radical")
    rad = base.radical()
    verdicts = []
    if args.verify:
        for g in rad.cgens:
            claim = {"kind": "radical-membership", "ideal": base,
                     "element": g, "budget": _budget(args)}
            verdicts.append((f"power of {_json_safe(g)} in the ideal",
                             verify(claim)))
    payload = {"generators": _ideal_gens_json(rad),
               "is_prime": rad.is_prime()}
    return payload, verdicts


@_command("primary-decomp")
def _cmd_primary_decomp(doc, kind, args):
    _require_kind(kind, "monoid", "primary-decomp")
    base, _ = _doc_base_ideal(doc, "primary-decomp")
    comps = base.primary_decomposition(degree_bound=args.degree_bound)
    out = []
    for c in comps:
        primes = c.minimal_primes()
        out.append({"generators": _ideal_gens_json(c),
                    "prime": _prime_json(primes[0])})
    verdicts = []
    if args.verify:
        for i, c in enumerate(comps):
            verdicts.append((f"component {i} primary",
                             verify({"kind": "primary", "ideal": c,
                                     "budget": _budget(args)})))
        if comps:
            inter = comps[0]
            for c in comps[1:]:
                inter = inter.intersection(c, degree_bound=args.degree_bound)
            verdicts.append(("intersection equals the ideal",
                             verify({"kind": "ideal-equality", "left": base,
                                     "right": inter, "budget": _budget(args)})))
    return {"count": len(comps), "components": out}, verdicts


@_command("ass")
def _cmd_ass(doc, kind, args):
    _require_kind(kind, "monoid", "ass")
    _no_verify(args, "ass")
    base, _ = _doc_base_ideal(doc, "ass")
    primes = base.associated_primes(degree_bound=args.degree_bound)
    return {"associated_primes": [_prime_json(p) for p in primes]}, []


@_command("normalize")
def _cmd_normalize(doc, kind, args):
    _require_kind(kind, "monoid", "normalize")
    canc, ideal, _ = _parse_monoid_body(doc, "$")
    if ideal:
        raise DocumentError("normalize needs a cancellative monoid; "
                            "use normalization-scheme for a quotient")
    nor = normalize(canc)
    verdicts = []
    if args.verify:
        verdicts.append(("hilbert basis of the normalization",
                         verify({"kind": "hilbert-basis", "monoid": nor,
                                 "units": nor.unit_group.gens,
                                 "atoms": nor.atoms,
                                 "budget": _budget(args)})))
    return {"monoid": _monoid_document(_minimal_copy(nor), None),
            "already_normal": is_normal(canc)}, verdicts


@_command("seminormalize")
def _cmd_seminormalize(doc, kind, args):
    _require_kind(kind, "monoid", "seminormalize")
    canc, ideal, _ = _parse_monoid_body(doc, "$")
    if ideal:
        raise DocumentError("seminormalize needs a cancellative monoid")
    sn = seminormalize(canc)
    verdicts = []
    if args.verify:
        for g in sn.gens:
            claim = {"kind": "seminormal-membership", "monoid": canc,
                     "element": g, "budget": _budget(args)}
            verdicts.append((f"{_json_safe(g)} in the seminormalization",
                             verify(claim)))
    return {"monoid": _monoid_document(_minimal_copy(sn), None),
            "already_seminormal": is_seminormal(canc)}, verdicts


@_command("normalization-scheme")
def _cmd_normalization_scheme(doc, kind, args):
    _require_kind(kind, "monoid", "normalization-scheme")
    _no_verify(args, "normalization-scheme")
    pc, _ = _doc_pc_monoid(doc)
    ns = normalization_scheme(pc)
    branches = sorted(ns.branches, key=lambda b: b[0].face.ray_indices)
    out = [{"minimal_prime": list(p.face.ray_indices),
            "monoid": _monoid_document(nor, None)}
           for p, nor in branches]
    return {"count": len(out), "branches": out}, []


@_command("class-group")
def _cmd_class_group(doc, kind, args):
    _no_verify(args, "class-group")
    X, _ = _doc_scheme(doc, kind)
    return _group_json(class_group(X)), []


@_command("divisor")
def _cmd_divisor(doc, kind, args):
    _no_verify(args, "divisor")
    X, ctx = _doc_scheme(doc, kind)
    spec = doc.get("element")
    if args.element is not None:
        try:
            spec = json.loads(args.element)
        except json.JSONDecodeError:
            spec = args.element
    if spec is None:
        raise DocumentError("divisor needs an element field or --element")
    if len(X.generic_points) != 1:
        raise ValueError("divisor needs an irreducible scheme")
    if ctx is None:
        amb = X.stalks[X.generic_points[0]].ambient
        ctx = _MonoidContext(amb, [], [])
    f = _parse_element(spec, ctx, "$.element")
    div = principal_divisor(X, f)
    coeffs = [{"point": _label_to_json(z), "value": div.coeffs.get(z, 0)}
              for z in sorted(X.height_one_points(), key=_label_key)]
    return {"element": _json_safe(f), "coefficients": coeffs}, []


@_command("picard")
def _cmd_picard(doc, kind, args):
    X, _ = _doc_scheme(doc, kind)
    pic = picard_group(X)
    verdicts = []
    if args.verify:
        sheaf = units_sheaf(X)
        claim = {"kind": "h1-cocycles",
                 "points": list(X.points),
                 "gen": {x: sorted(X.gen[x], key=_label_key)
                         for x in X.points},
                 "ngens": dict(sheaf.ngens),
                 "rels": {x: list(sheaf.rels[x]) for x in X.points},
                 "maps": {k: m.entries for k, m in sheaf.maps.items()},
                 "group": pic,
                 "budget": _budget(args)}
        verdicts.append(("picard group by cocycle enumeration",
                         verify(claim)))
    return _group_json(pic), verdicts


@_command("cartier")
def _cmd_cartier(doc, kind, args):
    _no_verify(args, "cartier")
    X, _ = _doc_scheme(doc, kind)
    rep = cartier_report(X)
    payload = {"cartier_divisors": _group_json(rep.cartier_group),
               "modulo_principal": _group_json(rep.modulo_principal),
               "picard": _group_json(rep.picard),
               "matches_picard": rep.matches_picard,
               "h1_constant": _group_json(rep.h1_constant),
               "locally_factorial": is_locally_factorial(X)}
    return payload, []


_NOR_TERMS = ("global units", "global units of the normalization",
              "sections of the quotient sheaf", "picard group",
              "picard group of the normalization", "h1 of the quotient sheaf")

_MV_TERMS = ("global units", "global units of the pieces",
             "global units of the overlap", "picard group",
             "picard group of the pieces", "picard group of the overlap")


def _six_term_json(rep, labels) -> dict:
    return {"sequence": [{"term": lab, "group": _group_json(g)}
                         for lab, g in zip(labels, rep.terms)],
            "injective_start": rep.injective_start,
            "exact_joints": list(rep.exact_joints),
            "surjective_end": rep.surjective_end,
            "exact": rep.exact}


@_command("nor-compare")
def _cmd_nor_compare(doc, kind, args):
    _no_verify(args, "nor-compare")
    X, _ = _doc_scheme(doc, kind)
    rep = nor_comparison(X)
    pstar = rep.maps[3]
    payload = _six_term_json(rep, _NOR_TERMS)
    payload["pullback_on_picard"] = {
        "injective": pstar.is_injective(),
        "surjective": pstar.is_surjective(),
        "kernel": _group_json(pstar.kernel_group()),
        "cokernel": _group_json(pstar.cokernel_group())}
    return payload, []


@_command("mayer-vietoris")
def _cmd_mayer_vietoris(doc, kind, args):
    _no_verify(args, "mayer-vietoris")
    X, _ = _doc_scheme(doc, kind)
    mv = mayer_vietoris(X)
    payload = _six_term_json(mv.report, _MV_TERMS)
    payload["piece_terms_match"] = mv.piece_terms_match
    return payload, []


_CHECKS = ("ideal-equality", "primary", "radical-membership",
           "hilbert-basis", "seminormal-membership")


@_command("verify")
def _cmd_verify(doc, kind, args):
    _require_kind(kind, "monoid", "verify")
    canc, ideal, ctx = _parse_monoid_body(doc, "$")
    pc = PcMonoid(canc, ideal or [])
    claim_doc = doc.get("claim")
    if not isinstance(claim_doc, dict):
        raise DocumentError("verify needs a claim object")
    check = claim_doc.get("check")
    if check not in _CHECKS:
        _fail("$.claim.check", f"expected one of {', '.join(_CHECKS)}")

    def elements(key):
        return _parse_elements(_get(claim_doc, "$.claim", key), ctx,
                               f"$.claim.{key}")

    def element(key):
        return _parse_element(_get(claim_doc, "$.claim", key), ctx,
                              f"$.claim.{key}")

    claim = {"kind": check, "budget": _budget(args)}
    if check == "ideal-equality":
        _check_keys(claim_doc, "$.claim", {"check", "left", "right"})
        claim["left"] = MonoidIdeal(pc, elements("left"))
        claim["right"] = MonoidIdeal(pc, elements("right"))
    elif check == "primary":
        _check_keys(claim_doc, "$.claim", {"check", "ideal"})
        claim["ideal"] = MonoidIdeal(pc, elements("ideal"))
    elif check == "radical-membership":
        _check_keys(claim_doc, "$.claim", {"check", "ideal", "element"})
        claim["ideal"] = MonoidIdeal(pc, elements("ideal"))
        claim["element"] = element("element")
    elif check == "hilbert-basis":
        _check_keys(claim_doc, "$.claim", {"check", "units", "atoms"})
        claim["monoid"] = canc
        claim["units"] = elements("units")
        claim["atoms"] = elements("atoms")
    else:
        _check_keys(claim_doc, "$.claim", {"check", "element"})
        claim["monoid"] = canc
        claim["element"] = element("element")
    v = verify(claim)
    payload = {"check": check, "status": v.status, "complete": v.complete,
               "witness": _json_safe(v.witness), "detail": v.detail}
    return payload, []


# ---------------------------------------------------------------------------
# entry point

_COMMAND_HELP = {
    "mspec": "list the prime ideals of a monoid",
    "ideal-op": "sum, product, intersection, or colon of two ideals",
    "radical": "radical of the ideal of a monoid document",
    "primary-decomp": "minimal primary decomposition of the ideal",
    "ass": "associated primes of the ideal",
    "normalize": "integral closure of a cancellative monoid",
    "seminormalize": "seminormalization of a cancellative monoid",
    "normalization-scheme": "normalizations of the quotients by the "
                            "minimal primes",
    "class-group": "Weil divisor class group of the scheme",
    "divisor": "principal divisor of an element of the generic stalk group",
    "picard": "Picard group of the scheme",
    "cartier": "Cartier divisors, modulo principal ones, against Picard",
    "nor-compare": "six-term units/Picard sequence against the normalization",
    "mayer-vietoris": "six-term sequence for a reducible scheme",
    "verify": "check a claim by independent enumeration",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="monoscheme",
        description="ideal theory, normalization, and divisor class "
                    "computations for monoid schemes")
    sub = parser.add_subparsers(dest="command", required=True,
                                metavar="command")
    for name, help_text in _COMMAND_HELP.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("document", nargs="?", default="-",
                        help="input document path (default: stdin)")
        sp.add_argument("--format", choices=("json", "text"), default="json",
                        help="output format (default: json)")
        sp.add_argument("--quiet", action="store_true",
                        help="suppress verification notes on stderr")
        sp.add_argument("--verify", action="store_true",
                        help="cross-check the result by enumeration")
        sp.add_argument("--degree-bound", type=int, default=8, metavar="N",
                        help="degree cap for enumeration (default: 8)")
        if name == "ideal-op":
            sp.add_argument("--op", required=True,
                            choices=("sum", "product", "intersection",
                                     "colon"))
        if name == "divisor":
            sp.add_argument("--element", default=None,
                            help="element as a JSON vector or named product")
    return parser


def _load_document(source: str) -> dict:
    try:
        if source == "-":
            return json.load(sys.stdin)
        with open(source, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise DocumentError(f"cannot read {source}: {e.strerror}")
    except json.JSONDecodeError as e:
        raise DocumentError(f"{source}: invalid JSON: {e}")


def _report_verdicts(verdicts, args) -> int:
    code = 0
    for name, v in verdicts:
        if not args.quiet:
            line = f"verify {name}: {v.status}"
            if v.detail:
                line += f" ({v.detail})"
            if v.status == "REFUTED" and v.witness is not None:
                line += f", witness {json.dumps(_json_safe(v.witness))}"
            print(line, file=sys.stderr)
        if v.status == "REFUTED":
            code = 1
        elif v.status == "INCONCLUSIVE" and code != 1:
            code = 3
    return code


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        doc = _load_document(args.document)
        kind = _document_kind(doc)
        payload, verdicts = _HANDLERS[args.command](doc, kind, args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(_emit(payload, args.format))
    if args.command == "verify":
        return 3 if payload["status"] == "INCONCLUSIVE" else 0
    return _report_verdicts(verdicts, args)


if __name__ == "__main__":
    sys.exit(main())
