"""JSON documents: ``{"kind": ..., "payload": ...}``.

Every document is schema-checked before any object is built, and ``emit``
writes a canonical form (sorted keys, sorted entries, two-space indent) so
``emit(parse(text)) == text`` for canonical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema

from .ainfty import AInftyAlgebra
from .bimod import AInftyBimodule, BimoduleHom
from .bndalg import AlgebraWithBoundary, GradedAlgebra
from .corelin import Generator, InputError, RSpace
from .crindex import CROperatorData, End, SLProblem
from .hoch import HochschildCochain

KINDS = ("ainfty_algebra", "ainfty_bimodule", "bimodule_hom", "hochschild_cochain",
         "boundary_algebra", "cr_operator")

_names = {"type": "array", "items": {"type": "string", "minLength": 1}}
_generator = {
    "type": "object",
    "required": ["name", "src", "tgt"],
    "additionalProperties": False,
    "properties": {"name": {"type": "string", "minLength": 1},
                   "src": {"type": "integer", "minimum": 1},
                   "tgt": {"type": "integer", "minimum": 1},
                   "deg": {"type": "integer"}},
}
_algebra = {
    "type": "object",
    "required": ["m", "generators", "ops"],
    "additionalProperties": False,
    "properties": {
        "m": {"type": "integer", "minimum": 1},
        "directed": {"type": "boolean"},
        "d_max": {"type": ["integer", "null"], "minimum": 1},
        "generators": {"type": "array", "items": _generator},
        "ops": {"type": "array", "items": {
            "type": "object",
            "required": ["arity", "inputs", "output"],
            "additionalProperties": False,
            "properties": {"arity": {"type": "integer", "minimum": 1},
                           "inputs": _names, "output": _names}}},
    },
}
_bientry = {
    "type": "object",
    "required": ["q", "p", "left", "elt", "right", "output"],
    "additionalProperties": False,
    "properties": {"q": {"type": "integer", "minimum": 0},
                   "p": {"type": "integer", "minimum": 0},
                   "left": _names, "elt": {"type": "string", "minLength": 1},
                   "right": _names, "output": _names},
}
_bimodule = {
    "type": "object",
    "required": ["algebra", "generators", "ops"],
    "additionalProperties": False,
    "properties": {"algebra": _algebra,
                   "generators": {"type": "array", "items": _generator},
                   "ops": {"type": "array", "items": _bientry}},
}
_hom = {
    "type": "object",
    "required": ["source", "target", "components"],
    "additionalProperties": False,
    "properties": {"source": _bimodule, "target": _bimodule,
                   "components": {"type": "array", "items": _bientry}},
}
_cochain = {
    "type": "object",
    "required": ["bimodule", "components"],
    "additionalProperties": False,
    "properties": {"bimodule": _bimodule,
                   "components": {"type": "array", "items": {
                       "type": "object",
                       "required": ["inputs", "output"],
                       "additionalProperties": False,
                       "properties": {"inputs": _names, "output": _names}}}},
}
_boundary = {
    "type": "object",
    "required": ["n", "unit", "generators", "product", "D"],
    "additionalProperties": False,
    "properties": {
        "n": {"type": "integer"},
        "unit": {"type": "string"},
        "generators": {"type": "array", "items": {
            "type": "object", "required": ["name", "deg"], "additionalProperties": False,
            "properties": {"name": {"type": "string", "minLength": 1}, "deg": {"type": "integer"}}}},
        "product": {"type": "array", "items": {
            "type": "object", "required": ["inputs", "output"], "additionalProperties": False,
            "properties": {"inputs": {**_names, "minItems": 2, "maxItems": 2}, "output": _names}}},
        "D": {"type": "array", "items": {**_names, "minItems": 2, "maxItems": 2}},
    },
}
_matrix = {"type": "array", "minItems": 2, "maxItems": 2,
           "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": {"type": "number"}}}
_cr = {
    "type": "object",
    "required": ["euler", "ends", "arcs"],
    "additionalProperties": False,
    "properties": {
        "euler": {"type": "integer"},
        "arcs": {"type": "array", "items": {"type": "number"}},
        "ends": {"type": "array", "minItems": 1, "items": {
            "type": "object",
            "required": ["role", "theta0", "theta1", "a"],
            "additionalProperties": False,
            "properties": {
                "role": {"enum": ["input", "output"]},
                "theta0": {"type": "number"}, "theta1": {"type": "number"},
                "a": {"oneOf": [
                    {"type": "object", "required": ["const"], "additionalProperties": False,
                     "properties": {"const": {"type": "number"}}},
                    {"type": "object", "required": ["samples"], "additionalProperties": False,
                     "properties": {"samples": {"type": "array", "minItems": 2, "items": _matrix}}},
                ]},
            }}},
    },
}
SCHEMAS = {"ainfty_algebra": _algebra, "ainfty_bimodule": _bimodule, "bimodule_hom": _hom,
           "hochschild_cochain": _cochain, "boundary_algebra": _boundary, "cr_operator": _cr}
ENVELOPE = {
    "type": "object",
    "required": ["kind", "payload"],
    "additionalProperties": False,
    "properties": {"kind": {"enum": list(KINDS)}, "payload": {"type": "object"}},
}


@dataclass
class Document:
    kind: str
    obj: object


def _path(err: jsonschema.ValidationError) -> str:
    out = ""
    for p in err.absolute_path:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else p)
    return out or "<document>"


def _validate(data, schema, prefix: str) -> None:
    v = jsonschema.Draft202012Validator(schema)
    errors = sorted(v.iter_errors(data), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        e = errors[0]
        where = _path(e)
        raise InputError(f"{prefix}{'.' if prefix and where != '<document>' else ''}"
                         f"{'' if where == '<document>' and prefix else where}: {e.message}")


def _no_duplicate_keys(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise InputError(f"duplicate key {k!r}")
        out[k] = v
    return out


# ---------------------------------------------------------------------------
# payload -> objects
# ---------------------------------------------------------------------------


def _space(m: int, gens: list, where: str) -> RSpace:
    try:
        return RSpace(m, tuple(Generator(g["name"], g["src"], g["tgt"], g.get("deg", 0))
                               for g in gens))
    except InputError as e:
        raise InputError(f"{where}.generators: {e}") from None


def _entry(fn, where: str):
    try:
        return fn()
    except InputError as e:
        raise InputError(f"{where}: {e}") from None


def algebra_from(p: dict, where: str = "payload") -> AInftyAlgebra:
    space = _space(p["m"], p["generators"], where)
    mu: dict = {}
    for k, op in enumerate(p["ops"]):
        if len(op["inputs"]) != op["arity"]:
            raise InputError(f"{where}.ops[{k}]: arity {op['arity']} but "
                             f"{len(op['inputs'])} inputs")
        key = tuple(op["inputs"])
        table = mu.setdefault(op["arity"], {})
        if key in table:
            raise InputError(f"{where}.ops[{k}]: repeated entry for inputs {list(key)}")
        for n in key + tuple(op["output"]):
            if n not in space:
                raise InputError(f"{where}.ops[{k}]: unknown generator {n!r}")
        table[key] = op["output"]
        # build each table as we go so the error names the offending entry
        _entry(lambda: AInftyAlgebra(space, {op["arity"]: {key: op["output"]}},
                                     p.get("directed", True), p.get("d_max")),
               f"{where}.ops[{k}]")
    return _entry(lambda: AInftyAlgebra(space, mu, p.get("directed", True), p.get("d_max")), where)


def _bientries(entries: list, dom_alg, dom_mod, codomain, where: str) -> dict:
    out: dict = {}
    for k, e in enumerate(entries):
        if len(e["left"]) != e["q"] or len(e["right"]) != e["p"]:
            raise InputError(f"{where}[{k}]: q/p do not match the left/right lists")
        for n in e["left"] + e["right"]:
            if n not in dom_alg.space:
                raise InputError(f"{where}[{k}]: unknown algebra generator {n!r}")
        if e["elt"] not in dom_mod:
            raise InputError(f"{where}[{k}]: unknown module generator {e['elt']!r}")
        for n in e["output"]:
            if n not in codomain:
                raise InputError(f"{where}[{k}]: unknown output generator {n!r}")
        key = tuple(e["left"]) + (e["elt"],) + tuple(e["right"])
        table = out.setdefault((e["q"], e["p"]), {})
        if key in table:
            raise InputError(f"{where}[{k}]: repeated entry {list(key)}")
        table[key] = e["output"]
    return out


def bimodule_from(p: dict, where: str = "payload") -> AInftyBimodule:
    A = algebra_from(p["algebra"], f"{where}.algebra")
    space = _space(A.m, p["generators"], where)
    ops = _bientries(p["ops"], A, space, space, f"{where}.ops")
    for (q, pp), table in ops.items():
        for key, outs in table.items():
            _entry(lambda: AInftyBimodule(A, space, {(q, pp): {key: outs}}), f"{where}.ops {list(key)}")
    return _entry(lambda: AInftyBimodule(A, space, ops), where)


def hom_from(p: dict, where: str = "payload") -> BimoduleHom:
    P = bimodule_from(p["source"], f"{where}.source")
    Q = bimodule_from(p["target"], f"{where}.target")
    comps = _bientries(p["components"], P.algebra, P.space, Q.space, f"{where}.components")
    return _entry(lambda: BimoduleHom(P, Q, comps), where)


def cochain_from(p: dict, where: str = "payload") -> HochschildCochain:
    P = bimodule_from(p["bimodule"], f"{where}.bimodule")
    comps: dict = {}
    for k, e in enumerate(p["components"]):
        key = tuple(e["inputs"])
        if key in comps:
            raise InputError(f"{where}.components[{k}]: repeated entry {list(key)}")
        for n in key:
            if n not in P.algebra.space:
                raise InputError(f"{where}.components[{k}]: unknown algebra generator {n!r}")
        for n in e["output"]:
            if n not in P.space:
                raise InputError(f"{where}.components[{k}]: unknown output generator {n!r}")
        comps[key] = e["output"]
        _entry(lambda: HochschildCochain(P.algebra, P, {key: e["output"]}), f"{where}.components[{k}]")
    return HochschildCochain(P.algebra, P, comps)


def boundary_from(p: dict, where: str = "payload") -> AlgebraWithBoundary:
    degrees: dict = {}
    for k, g in enumerate(p["generators"]):
        if g["name"] in degrees:
            raise InputError(f"{where}.generators[{k}]: duplicate generator name {g['name']!r}")
        degrees[g["name"]] = g["deg"]
    product: dict = {}
    for k, e in enumerate(p["product"]):
        key = tuple(e["inputs"])
        if key in product:
            raise InputError(f"{where}.product[{k}]: repeated entry {list(key)}")
        product[key] = e["output"]
    A = _entry(lambda: GradedAlgebra(degrees, product, p["unit"]), where)
    return _entry(lambda: AlgebraWithBoundary(A, [tuple(d) for d in p["D"]], p["n"]), where)


def cr_from(p: dict, where: str = "payload") -> CROperatorData:
    ends = []
    for k, e in enumerate(p["ends"]):
        a = e["a"]
        prob = _entry(lambda: SLProblem(e["theta0"], e["theta1"], const=a.get("const"),
                                        samples=a.get("samples")), f"{where}.ends[{k}]")
        ends.append(End(prob, e["role"]))
    return _entry(lambda: CROperatorData(p["euler"], tuple(ends), tuple(p["arcs"])), where)


_BUILDERS = {"ainfty_algebra": algebra_from, "ainfty_bimodule": bimodule_from,
             "bimodule_hom": hom_from, "hochschild_cochain": cochain_from,
             "boundary_algebra": boundary_from, "cr_operator": cr_from}


def parse(text: str) -> Document:
    try:
        data = json.loads(text, object_pairs_hook=_no_duplicate_keys)
    except json.JSONDecodeError as e:
        raise InputError(f"line {e.lineno} column {e.colno}: {e.msg}") from None
    _validate(data, ENVELOPE, "")
    kind = data["kind"]
    _validate(data["payload"], SCHEMAS[kind], "payload")
    return Document(kind, _BUILDERS[kind](data["payload"]))


# ---------------------------------------------------------------------------
# objects -> payload
# ---------------------------------------------------------------------------


def _gens(space: RSpace, with_deg: bool = True) -> list:
    out = []
    for g in space.gens:
        d = {"name": g.name, "src": g.src, "tgt": g.tgt}
        if with_deg:
            d["deg"] = g.deg
        out.append(d)
    return out


def algebra_payload(A: AInftyAlgebra) -> dict:
    ops = []
    for d in sorted(A.mu):
        for key in sorted(A.mu[d].entries):
            ops.append({"arity": d, "inputs": list(key), "output": sorted(A.mu[d].entries[key])})
    return {"m": A.m, "directed": A.directed, "d_max": A.d_max,
            "generators": _gens(A.space), "ops": ops}


def _bientry_list(tables: dict) -> list:
    out = []
    for (q, p) in sorted(tables):
        for key in sorted(tables[(q, p)]):
            out.append({"q": q, "p": p, "left": list(key[:q]), "elt": key[q],
                        "right": list(key[q + 1:]), "output": sorted(tables[(q, p)][key])})
    return out


def bimodule_payload(P: AInftyBimodule) -> dict:
    return {"algebra": algebra_payload(P.algebra), "generators": _gens(P.space),
            "ops": _bientry_list(P.ops)}


def hom_payload(f: BimoduleHom) -> dict:
    return {"source": bimodule_payload(f.source), "target": bimodule_payload(f.target),
            "components": _bientry_list(f.components)}


def cochain_payload(c: HochschildCochain) -> dict:
    comps = [{"inputs": list(k), "output": sorted(v)}
             for k, v in sorted(c.components.items(), key=lambda kv: (len(kv[0]), kv[0]))]
    return {"bimodule": bimodule_payload(c.P), "components": comps}


def boundary_payload(B: AlgebraWithBoundary) -> dict:
    A = B.A
    product = [{"inputs": [a, b], "output": sorted(v)} for (a, b), v in sorted(A.table.items())
               if A.unit not in (a, b)]
    return {"n": B.n, "unit": A.unit,
            "generators": [{"name": n, "deg": A.degrees[n]} for n in A.names],
            "product": product, "D": [list(d) for d in sorted(B.D)]}


def cr_payload(data: CROperatorData) -> dict:
    ends = []
    for e in data.ends:
        p = e.problem
        a = {"const": p.const} if p.const is not None else {"samples": [list(map(list, m)) for m in p.samples]}
        ends.append({"role": e.role, "theta0": p.theta0, "theta1": p.theta1, "a": a})
    return {"euler": data.euler, "ends": ends, "arcs": list(data.arcs)}


_PAYLOADS = {AInftyAlgebra: ("ainfty_algebra", algebra_payload),
             AInftyBimodule: ("ainfty_bimodule", bimodule_payload),
             BimoduleHom: ("bimodule_hom", hom_payload),
             HochschildCochain: ("hochschild_cochain", cochain_payload),
             AlgebraWithBoundary: ("boundary_algebra", boundary_payload),
             CROperatorData: ("cr_operator", cr_payload)}


def emit(obj) -> str:
    """Canonical text for a library object (or a :class:`Document`)."""
    if isinstance(obj, Document):
        obj = obj.obj
    for cls, (kind, fn) in _PAYLOADS.items():
        if isinstance(obj, cls):
            return json.dumps({"kind": kind, "payload": fn(obj)}, indent=2, sort_keys=True) + "\n"
    raise InputError(f"cannot serialize {type(obj).__name__}")


def read(path: str | Path) -> Document:
    """Parse a file; bare names of bundled examples resolve to the packaged copy."""
    p = Path(path)
    if not p.exists():
        bundled = example_path(p.name)
        if bundled is None:
            raise InputError(f"{path}: no such file")
        p = bundled
    try:
        text = p.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(f"{path}: {e}") from None
    try:
        return parse(text)
    except InputError as e:
        raise InputError(f"{path}: {e}") from None


def example_path(name: str) -> Path | None:
    ref = resources.files("thimble") / "data" / name
    return Path(str(ref)) if ref.is_file() else None


def bundled_examples() -> list[str]:
    root = resources.files("thimble") / "data"
    return sorted(r.name for r in root.iterdir() if r.name.endswith(".json"))
