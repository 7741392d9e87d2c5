"""JSON model documents: strict parsing with locations, canonical serialization.

Every document is one JSON object::

    {"schema_version": 1, "kind": "cdga", "name": "cp2",
     "generators": [{"name": "x2", "degree": 2, "parity": "even"}, ...],
     "differential": {"y5": [{"coeff": "1", "mono": {"x2": 3}}]}}

``kind`` is one of ``algebra``, ``presentation``, ``cdga`` or
``ks-extension``.  Coefficients are reduced fractions written as strings
(``"-3/2"``); monomials are exponent maps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from json.decoder import JSONArray, JSONObject
from json.scanner import py_make_scanner
from pathlib import Path

from .algebra import CDGA, Element, FreeGCA, Generator
from .cohomology import DGMorphism
from .elliptic import Presentation
from .errors import ParseError, SullivanError
from .fibration import KSExtension

SCHEMA_VERSION = 1
KINDS = ("algebra", "presentation", "cdga", "ks-extension")

_COMMON = {"schema_version", "kind", "name", "description"}
_FIELDS = {
    "algebra": {"generators"},
    "presentation": {"generators", "relations", "test_mode"},
    "cdga": {"generators", "differential", "ideal"},
    "ks-extension": {"base", "fiber_generators", "ks_order", "total_differential", "base_formality"},
}
_REQUIRED = {
    "algebra": {"generators"},
    "presentation": {"generators", "relations"},
    "cdga": {"generators"},
    "ks-extension": {"base", "fiber_generators", "total_differential"},
}


class _LocDict(dict):
    line = col = None


class _LocList(list):
    line = col = None


def _locate(s, pos):
    line = s.count("\n", 0, pos) + 1
    col = pos - (s.rfind("\n", 0, pos) + 1) + 1
    return line, col


class _LocatingDecoder(json.JSONDecoder):
    """Decoder whose objects and arrays remember where they start."""

    def __init__(self):
        super().__init__()

        def parse_object(s_and_end, strict, scan_once, object_hook, object_pairs_hook, memo=None):
            s, end = s_and_end
            obj, new_end = JSONObject(s_and_end, strict, scan_once, object_hook, object_pairs_hook, memo)
            out = _LocDict(obj)
            out.line, out.col = _locate(s, end - 1)
            return out, new_end

        def parse_array(s_and_end, scan_once):
            s, end = s_and_end
            arr, new_end = JSONArray(s_and_end, scan_once)
            out = _LocList(arr)
            out.line, out.col = _locate(s, end - 1)
            return out, new_end

        self.parse_object = parse_object
        self.parse_array = parse_array
        self.memo = {}
        self.scan_once = py_make_scanner(self)


def _fail(msg, node=None):
    line = getattr(node, "line", None)
    col = getattr(node, "col", None)
    raise ParseError(msg, line, col)


@dataclass
class ModelDocument:
    kind: str
    payload: object
    name: str | None = None
    description: str | None = None
    base_formality: DGMorphism | None = None

    @property
    def extension(self) -> KSExtension:
        if self.kind != "ks-extension":
            raise SullivanError(f"document is a {self.kind}, not a ks-extension")
        return self.payload


# -- parsing -----------------------------------------------------------------


def _check_fields(obj, allowed, required, what):
    if not isinstance(obj, dict):
        _fail(f"{what} must be an object", obj)
    unknown = sorted(set(obj) - allowed)
    if unknown:
        _fail(f"unknown field {unknown[0]!r} in {what}", obj)
    missing = sorted(required - set(obj))
    if missing:
        _fail(f"missing field {missing[0]!r} in {what}", obj)


def _parse_generators(arr, what="generators"):
    if not isinstance(arr, list):
        _fail(f"{what} must be a list", arr)
    gens = []
    for g in arr:
        _check_fields(g, {"name", "degree", "parity", "lower"}, {"name", "degree", "parity"}, "generator")
        name, deg, parity = g["name"], g["degree"], g["parity"]
        if not isinstance(name, str):
            _fail("generator name must be a string", g)
        if not isinstance(deg, int) or isinstance(deg, bool) or deg < 1:
            _fail(f"generator {name} needs a positive integer degree", g)
        if parity not in ("even", "odd"):
            _fail(f"generator {name} has parity {parity!r}; expected 'even' or 'odd'", g)
        if (parity == "odd") != (deg % 2 == 1):
            _fail(f"parity mismatch: generator {name} of degree {deg} declared {parity}", g)
        lower = g.get("lower")
        if lower is not None and (not isinstance(lower, int) or isinstance(lower, bool) or lower < 0):
            _fail(f"generator {name} has a bad lower degree", g)
        try:
            gens.append(Generator(name, deg, lower))
        except ValueError as exc:
            _fail(str(exc), g)
    names = [g.name for g in gens]
    if len(set(names)) != len(names):
        _fail("duplicate generator names", arr)
    return gens


def _parse_coeff(text, node):
    if not isinstance(text, str):
        _fail("coefficient must be a fraction string such as \"-3/2\"", node)
    try:
        c = Fraction(text)
    except (ValueError, ZeroDivisionError):
        _fail(f"malformed coefficient {text!r}", node)
    if "." in text or "e" in text.lower() or str(c) != text.strip():
        _fail(f"coefficient {text!r} is not a reduced fraction", node)
    if not c:
        _fail("zero coefficient in term list", node)
    return c


def _parse_terms(arr, alg: FreeGCA, what):
    if not isinstance(arr, list):
        _fail(f"{what} must be a list of terms", arr)
    out = alg.zero()
    seen = set()
    for t in arr:
        _check_fields(t, {"coeff", "mono"}, {"coeff", "mono"}, "term")
        c = _parse_coeff(t["coeff"], t)
        mono = t["mono"]
        if not isinstance(mono, dict):
            _fail("mono must be an exponent map", t)
        for name, e in mono.items():
            if name not in alg.index:
                _fail(f"dangling generator reference {name!r} in {what}", t)
            if not isinstance(e, int) or isinstance(e, bool) or e < 1:
                _fail(f"exponent of {name} must be a positive integer", t)
            if e > 1 and alg.generator(name).odd:
                _fail(f"odd generator {name} with exponent {e}", t)
        m = alg.monomial(mono)
        if m in seen:
            _fail(f"repeated monomial in {what}", t)
        seen.add(m)
        out = out + Element(alg, {m: c})
    return out


def _parse_cdga(obj, nested=False):
    allowed = _COMMON | _FIELDS["cdga"]
    _check_fields(obj, allowed, _REQUIRED["cdga"] | ({"kind"} if nested else set()), "cdga")
    if obj.get("kind", "cdga") != "cdga":
        _fail("nested algebra must have kind 'cdga'", obj)
    alg = FreeGCA(_parse_generators(obj["generators"]))
    diff = {}
    dobj = obj.get("differential", {})
    if not isinstance(dobj, dict):
        _fail("differential must map generator names to term lists", dobj)
    for name, terms in dobj.items():
        if name not in alg.index:
            _fail(f"differential given on unknown generator {name!r}", dobj)
        img = _parse_terms(terms, alg, f"d({name})")
        if img and img.degree != alg.generator(name).degree + 1:
            _fail(f"d({name}) has degree {img.degree}, expected {alg.generator(name).degree + 1}", terms)
        diff[name] = img
    ideal = []
    iobj = obj.get("ideal", [])
    if not isinstance(iobj, list):
        _fail("ideal must be a list of term lists", iobj)
    for terms in iobj:
        r = _parse_terms(terms, alg, "ideal generator")
        if not r.is_homogeneous():
            _fail("ideal generator is not homogeneous", terms)
        ideal.append(r)
    return CDGA(alg, diff, ideal)


def _parse_presentation(obj):
    gens = _parse_generators(obj["generators"])
    for g in gens:
        if g.odd:
            _fail(f"presentation generator {g.name} must have even degree", obj["generators"])
    alg = FreeGCA([Generator(g.name, g.degree) for g in gens])
    rels = obj["relations"]
    if not isinstance(rels, list):
        _fail("relations must be a list", rels)
    parsed = [_parse_terms(r, alg, "relation") for r in rels]
    test_mode = obj.get("test_mode", False)
    if not isinstance(test_mode, bool):
        _fail("test_mode must be a boolean", obj)
    try:
        return Presentation(gens, parsed, test_mode=test_mode, name=obj.get("name"))
    except ValueError as exc:
        _fail(str(exc), obj)


def _parse_extension(obj):
    base = _parse_cdga(obj["base"], nested=True)
    fgens = _parse_generators(obj["fiber_generators"], "fiber_generators")
    order = obj.get("ks_order")
    names = {g.name for g in fgens}
    if order is not None:
        if not isinstance(order, list) or sorted(order) != sorted(names):
            _fail("ks_order must list every fiber generator exactly once", order if isinstance(order, list) else obj)
    try:
        ext = KSExtension(base, fgens, {}, order, obj.get("name"))
    except (ValueError, KeyError) as exc:
        _fail(str(exc), obj)
    tot = ext.total_algebra
    dobj = obj["total_differential"]
    if not isinstance(dobj, dict):
        _fail("total_differential must map fiber generator names to term lists", dobj)
    images = {}
    for name, terms in dobj.items():
        if name not in names:
            _fail(f"total differential given on non-fiber generator {name!r}", dobj)
        img = _parse_terms(terms, tot, f"D({name})")
        if img and img.degree != ext.generator(name).degree + 1:
            _fail(f"D({name}) has degree {img.degree}, expected {ext.generator(name).degree + 1}", terms)
        images[name] = img
    ext = ext.with_images(images)
    formality = None
    fobj = obj.get("base_formality")
    if fobj is not None:
        _check_fields(fobj, {"target", "images"}, {"target", "images"}, "base_formality")
        target = _parse_cdga(fobj["target"], nested=True)
        imgs = {}
        if not isinstance(fobj["images"], dict):
            _fail("base_formality images must be an object", fobj)
        for name, terms in fobj["images"].items():
            if name not in base.algebra.index:
                _fail(f"formality map given on unknown base generator {name!r}", fobj)
            imgs[name] = _parse_terms(terms, target.algebra, f"image of {name}")
        try:
            formality = DGMorphism(base, target, imgs)
        except SullivanError as exc:
            _fail(f"base_formality is not a chain map: {exc}", fobj)
    return ext, formality


def parse(text: str) -> ModelDocument:
    """Parse and validate a document; errors carry line and column."""
    try:
        obj = _LocatingDecoder().decode(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(obj, dict):
        _fail("document must be a JSON object", obj)
    kind = obj.get("kind")
    if kind not in KINDS:
        _fail(f"unknown kind {kind!r}", obj)
    _check_fields(obj, _COMMON | _FIELDS[kind], _REQUIRED[kind] | {"schema_version", "kind"}, kind)
    if obj["schema_version"] != SCHEMA_VERSION:
        _fail(f"unsupported schema_version {obj['schema_version']!r}", obj)
    name = obj.get("name")
    desc = obj.get("description")
    for key, val in (("name", name), ("description", desc)):
        if val is not None and not isinstance(val, str):
            _fail(f"{key} must be a string", obj)
    formality = None
    if kind == "algebra":
        payload = FreeGCA(_parse_generators(obj["generators"]))
    elif kind == "cdga":
        payload = _parse_cdga(obj)
    elif kind == "presentation":
        payload = _parse_presentation(obj)
    else:
        payload, formality = _parse_extension(obj)
    return ModelDocument(kind, payload, name, desc, formality)


def load(path) -> ModelDocument:
    path = Path(path)
    try:
        return parse(path.read_text())
    except ParseError as exc:
        raise ParseError(f"{path}: {exc.reason}", exc.line, exc.column) from None


# -- serialization -------------------------------------------------------------


def _gen_obj(g: Generator, with_lower=True):
    out = {"name": g.name, "degree": g.degree, "parity": "odd" if g.odd else "even"}
    if with_lower and g.lower is not None:
        out["lower"] = g.lower
    return out


def _terms_obj(e: Element):
    alg = e.algebra
    out = []
    for m in sorted(e.terms, key=lambda m: (-alg.degree(m), tuple(-x for x in m))):
        mono = {g.name: k for g, k in zip(alg.generators, m) if k}
        out.append({"coeff": str(e.terms[m]), "mono": mono})
    return out


def _cdga_obj(cdga: CDGA, nested=False):
    out = {} if not nested else {"kind": "cdga"}
    out["generators"] = [_gen_obj(g) for g in cdga.algebra.generators]
    if cdga.images:
        out["differential"] = {g.name: _terms_obj(cdga.images[g.name])
                               for g in cdga.algebra.generators if g.name in cdga.images}
    if cdga.ideal:
        out["ideal"] = [_terms_obj(r) for r in cdga.ideal]
    return out


def to_object(doc: ModelDocument) -> dict:
    out = {"schema_version": SCHEMA_VERSION, "kind": doc.kind}
    if doc.name is not None:
        out["name"] = doc.name
    if doc.description is not None:
        out["description"] = doc.description
    p = doc.payload
    if doc.kind == "algebra":
        out["generators"] = [_gen_obj(g) for g in p.generators]
    elif doc.kind == "cdga":
        out.update(_cdga_obj(p))
    elif doc.kind == "presentation":
        out["generators"] = [_gen_obj(g, False) for g in p.generators]
        out["relations"] = [_terms_obj(r) for r in p.relations]
        if p.test_mode:
            out["test_mode"] = True
    else:
        ext: KSExtension = p
        out["base"] = _cdga_obj(ext.base, nested=True)
        out["fiber_generators"] = [_gen_obj(g) for g in ext.fiber_generators]
        out["ks_order"] = list(ext.order)
        out["total_differential"] = {n: _terms_obj(ext.images[n]) for n in ext.order if ext.images[n]}
        if doc.base_formality is not None:
            phi = doc.base_formality
            out["base_formality"] = {
                "target": _cdga_obj(phi.target, nested=True),
                "images": {n: _terms_obj(e) for n, e in phi.images.items() if e},
            }
    return out


def serialize(doc: ModelDocument) -> str:
    return json.dumps(to_object(doc), indent=2) + "\n"


def save(doc: ModelDocument, path):
    Path(path).write_text(serialize(doc))
