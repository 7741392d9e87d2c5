"""Full analysis of one document: verdicts, invariants and the inequality table."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .algebra import CDGA, check_d_squared
from .cohomology import cohomology
from .derivations import derivation_space, meier_verdict
from .elliptic import (
    Presentation,
    PureModel,
    check_hplus_zero,
    euler_report,
    pure_model_from_presentation,
    regularity_certificate,
)
from .errors import NotMaximalSequence, SullivanError
from .fibration import (
    KSExtension,
    _base_is_odd_wedge,
    check_pure,
    check_tncz,
    filtered_normalize,
    fiber_is_pure,
    formality_certificate_of_total,
    normalize_over_odd_sphere,
    pushout,
    trivialize_over_odd_wedge,
    validate,
)
from .invariants import (
    InvariantReport,
    check_fibration_inequalities,
    cl0_upper_via_acyclic_quotient,
    cup_length,
    is_minimal,
    lift_to_free_base,
    make_report,
    nil0,
    toomer,
    wedge_minimal_model,
)
from .io import ModelDocument

# rule names attached to every verdict a report can carry
ANCHORS = {
    "valid": "ks-extension: well-ordered basis with D restricting to the base differential and D^2 = 0",
    "d_squared": "leibniz: d^2 = 0 checked on generators",
    "pure": "pure-extension: D(V^even) = 0 and D(V^odd) inside the base tensor Λ(V^even)",
    "tncz": "tncz: restriction to the fiber is onto in cohomology",
    "regular": "regular-sequence: Hilbert series equals the complete-intersection series",
    "hplus_zero": "pure-lower-grading: positive lower cohomology vanishes for elliptic pure models",
    "positively_elliptic": "euler-consistency: euler > 0, chi_pi = 0 and vanishing odd cohomology agree",
    "halperin": "meier-criterion: no negative-degree derivations of the fiber cohomology",
    "trivialize": "odd-wedge-trivialization: a KS basis with D = 1 (x) d exists over a wedge of odd spheres",
    "normalize_odd_sphere": "odd-sphere-normalization: D(V^even) inside u Λ(V^even)",
    "filter_normalize": "filtered-normalization: D(V_0) = 0 and D(V_1) inside H(B) (x) (ΛV)_0",
    "formality": "lower-zero-projection: the total algebra maps quasi-isomorphically onto its lower-degree-0 part",
}


@dataclass
class Verdict:
    value: object
    detail: str = ""

    def as_dict(self, name):
        return {"value": self.value, "detail": self.detail, "anchor": ANCHORS.get(name, name)}


@dataclass
class VerdictReport:
    fixture: str
    kind: str
    verdicts: dict = field(default_factory=dict)
    invariants: dict = field(default_factory=dict)
    betti: dict = field(default_factory=dict)
    rules: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)
    seconds: float = 0.0

    def verdict(self, name):
        v = self.verdicts.get(name)
        return None if v is None else v.value

    def as_dict(self):
        return {
            "fixture": self.fixture,
            "kind": self.kind,
            "verdicts": {k: v.as_dict(k) for k, v in self.verdicts.items()},
            "invariants": {k: v.as_dict() for k, v in self.invariants.items()},
            "betti": self.betti,
            "rules": [dict(zip(("rule", "status", "detail", "anchor"), r.as_row())) for r in self.rules],
            "extras": self.extras,
            "errors": self.errors,
            "seconds": round(self.seconds, 4),
        }


def _record(report, name, fn):
    """Run ``fn``; a library error becomes a ``None`` verdict with the message."""
    try:
        value, detail = fn()
    except SullivanError as exc:
        report.verdicts[name] = Verdict(None, f"{type(exc).__name__}: {exc}")
        return None
    report.verdicts[name] = Verdict(value, detail)
    return value


# -- presentations ---------------------------------------------------------------


def analyze_presentation(p: Presentation, name: str, cap: int | None = None) -> VerdictReport:
    rep = VerdictReport(name, "presentation")
    try:
        cert = regularity_certificate(p, cap)
    except NotMaximalSequence as exc:
        rep.verdicts["regular"] = Verdict(False, str(exc))
        cert = None
    if cert is not None:
        detail = f"status {cert.status}"
        if cert.witness_degree is not None:
            detail += f", dimensions differ in degree {cert.witness_degree}"
        if cert.regular:
            detail += f", formal dimension {cert.formal_dimension}"
        rep.verdicts["regular"] = Verdict(True if cert.regular else (None if cert.status == "inconclusive" else False),
                                          detail)
        rep.extras["regularity_status"] = cert.status
        rep.extras["witness_degree"] = cert.witness_degree
        rep.extras["formal_dimension"] = cert.formal_dimension
    if p.test_mode and not p.square:
        top = max(p.algebra.degrees, default=0)
        rep.extras["derivation_dims"] = {
            str(k): derivation_space(p, k, check_regular=False).dimension for k in range(-top, 0) if k % 2 == 0
        }
    if not rep.verdict("regular"):
        return rep
    model = pure_model_from_presentation(p)
    _analyze_pure(rep, model)
    hv = meier_verdict(p)
    dims = {str(s.shift): s.dimension for s in hv.evidence}
    rep.verdicts["halperin"] = Verdict(hv.holds, f"derivation dimensions by shift {dims}")
    return rep


def _analyze_pure(rep: VerdictReport, model: PureModel, role: str = "self"):
    fd = model.formal_dimension
    hp = check_hplus_zero(model)
    rep.verdicts["hplus_zero" if role == "self" else f"{role}_hplus_zero"] = Verdict(
        hp.ok, "" if hp.ok else f"witness {hp.witness} in degree {hp.degree}, lower degree {hp.lower}")
    er = euler_report(model)
    key = "positively_elliptic" if role == "self" else f"{role}_positively_elliptic"
    rep.verdicts[key] = Verdict(er.positively_elliptic,
                                f"euler {er.euler}, chi_pi {er.chi_pi}" + "".join(f"; {v}" for v in er.violations))
    cap = fd + 2
    win = cohomology(model.cdga, cap)
    rep.betti[role] = win.betti[: fd + 1]
    cup = cup_length(win)
    e0 = toomer(model.cdga, cap)
    nil = nil0(win, model.cdga, hp.ok, cap) if hp.ok else None
    rep.invariants[role] = make_report(cup, e0.value, nil, minimal=e0.minimal)
    return hp.ok and er.positively_elliptic


# -- CDGAs -------------------------------------------------------------------------


def _trivial_products(cdga: CDGA) -> bool:
    alg = cdga.algebra
    gens = alg.generators
    return all(not cdga.reduce(alg.gen(a.name) * alg.gen(b.name))
               for i, a in enumerate(gens) for b in gens[i:])


def _finite_top(cdga: CDGA) -> int:
    degs = cdga.algebra.degrees
    top = 0
    for k in range(sum(degs) + 2 * max(degs, default=0) + 1):
        if cdga.basis(k):
            top = k
    return top


def default_cap(cdga: CDGA) -> int:
    """A window that reaches past the top class for the models this package handles."""
    if not cdga.images:
        return _finite_top(cdga) + 2
    alg = cdga.algebra
    if cdga.ideal:
        return _finite_top(cdga) + 2
    return sum(g.degree for g in alg.generators if g.odd) + 2


def cdga_invariants(cdga: CDGA, cap: int | None = None, rep: VerdictReport | None = None, role="self"):
    """Betti numbers and an invariant report for a finite-cohomology CDGA."""
    cap = default_cap(cdga) if cap is None else cap
    win = cohomology(cdga, cap)
    top = max((k for k, b in enumerate(win.betti) if b), default=0)
    if rep is not None:
        rep.betti[role] = win.betti[: top + 1]
    cup = cup_length(win)
    if not cdga.ideal and not cdga.images:
        # a free algebra with zero differential is its own cohomology, hence formal
        e0 = toomer(cdga, cap)
        return make_report(cup, e0.value, nil0(win, cdga, True, cap)), False
    if not cdga.ideal:
        try:
            model = PureModel(cdga)
        except SullivanError:
            model = None
        if model is not None and rep is not None:
            ok = _analyze_pure(rep, model, role)
            return rep.invariants[role], ok
        e0 = toomer(cdga, cap)
        return make_report(cup, e0.value, minimal=e0.minimal), False
    if not cdga.images and _trivial_products(cdga):
        model = wedge_minimal_model(cdga, cap)
        e0 = toomer(model, cap)
        return make_report(cup, e0.value, nil0(win, model, True, cap)), False
    raise SullivanError("no Toomer computation available for this algebra")


def analyze_cdga(cdga: CDGA, name: str, cap: int | None = None) -> VerdictReport:
    rep = VerdictReport(name, "cdga")
    sq = check_d_squared(cdga)
    rep.verdicts["d_squared"] = Verdict(sq.ok, "" if sq.ok else f"d^2({sq.generator}) = {sq.residual}")
    if not sq.ok:
        rep.extras["failing_generator"] = sq.generator
        return rep
    inv, _ = cdga_invariants(cdga, cap, rep)
    rep.invariants.setdefault("self", inv)
    rep.extras["minimal"] = is_minimal(cdga)
    return rep


# -- extensions -------------------------------------------------------------------


def _cohomology_base(ext: KSExtension, formality, rep: VerdictReport) -> KSExtension | None:
    """The extension over a zero-differential base, pushing out along ``formality`` if needed."""
    if not ext.base.images:
        return ext
    if formality is None:
        return None
    try:
        res = pushout(ext, formality, require_quasi_iso=True)
    except SullivanError as exc:
        rep.errors.append(f"pushout: {exc}")
        return None
    rep.extras["pushout"] = {n: str(e) for n, e in res.extension.images.items() if e}
    return res.extension


def _is_odd_wedge(base: CDGA) -> bool:
    try:
        _base_is_odd_wedge(base)
    except SullivanError:
        return False
    return True


def _formal_model(ext_h: KSExtension, cap: int):
    """Free model of the total space whose Toomer invariant is meaningful."""
    if not ext_h.base.images and ext_h.base.ideal:
        return lift_to_free_base(ext_h, cap).total
    return ext_h.total


def analyze_extension(ext: KSExtension, name: str, formality=None, cap: int | None = None) -> VerdictReport:
    rep = VerdictReport(name, "ks-extension")
    v = validate(ext)
    rep.verdicts["valid"] = Verdict(v.ok, "" if v.ok else f"{v.generator}: {v.reason}")
    if not v.ok:
        rep.extras["failing_generator"] = v.generator
        rep.extras["failure"] = ("ks-order" if "KS order" in v.reason
                                 else "d-squared" if "D^2" in v.reason else "base-differential")
        return rep
    rep.extras["product"] = ext.is_product()
    _record(rep, "pure", lambda: (check_pure(ext), ""))
    tv = _record(rep, "tncz", lambda: _tncz(ext, rep))
    ext_h = _cohomology_base(ext, formality, rep)

    # invariants of base and fiber
    try:
        inv_b, _ = cdga_invariants(ext.base, None, rep, "base")
        rep.invariants["base"] = inv_b
    except SullivanError as exc:
        rep.errors.append(f"base invariants: {exc}")
    pe = False
    if fiber_is_pure(ext):
        try:
            pe = _analyze_pure(rep, PureModel(ext.fiber), "fiber")
        except SullivanError as exc:
            rep.errors.append(f"fiber invariants: {exc}")
    wedge = ext_h is not None and _is_odd_wedge(ext_h.base)

    if ext_h is not None:
        if len(ext_h.base.algebra) == 1 and ext_h.base.algebra.generators[0].odd and not ext_h.base.ideal:
            _record(rep, "normalize_odd_sphere", lambda: _normalized(normalize_over_odd_sphere(ext_h)))
        _record(rep, "trivialize", lambda: _normalized(trivialize_over_odd_wedge(ext_h)))
        fn = _record(rep, "filter_normalize", lambda: _filtered(ext_h, rep))
        if fn:
            _record(rep, "formality", lambda: _certificate(rep.extras.pop("_filtered"), rep))

    # invariants of the total space
    fib_fd = ext.fiber_formal_dimension()
    base_top = ext_h.base_top_degree() if ext_h is not None else rep.betti.get("base", [0]).__len__() - 1
    cap_e = cap if cap is not None else base_top + fib_fd + 2
    try:
        win = cohomology(ext.total, cap_e)
        rep.betti["total"] = win.betti[: base_top + fib_fd + 1]
        cup = cup_length(win)
        model = _formal_model(ext_h, cap_e) if ext_h is not None else ext.total
        e0 = toomer(model, cap_e)
        formal = rep.verdict("formality") is True
        nil = nil0(win, model, True, cap_e) if formal else None
        cl0 = None
        if wedge and fiber_is_pure(ext_h):
            aq = cl0_upper_via_acyclic_quotient(ext_h)
            cl0 = aq.nilpotency_length
        rep.invariants["total"] = make_report(cup, e0.value, nil, cl0, minimal=e0.minimal)
    except SullivanError as exc:
        rep.errors.append(f"total invariants: {exc}")

    if {"total", "base", "fiber"} <= rep.invariants.keys():
        flags = {
            "tncz": bool(tv),
            "base_formal": not ext.base.images or formality is not None,
            "base_odd_wedge": wedge,
            "fiber_positively_elliptic": pe,
        }
        reports = {"E": rep.invariants["total"], "B": rep.invariants["base"], "F": rep.invariants["fiber"]}
        try:
            rep.rules = check_fibration_inequalities(reports, flags)
        except SullivanError as exc:
            rep.errors.append(f"inequalities: {exc}")
    return rep


def _tncz(ext, rep):
    tv = check_tncz(ext)
    rep.extras["tncz_degree"] = tv.degree
    if tv.ok:
        return True, f"checked through degree {tv.cap}"
    return False, f"fiber class {tv.fiber_class} in degree {tv.degree} does not extend"


def _normalized(res):
    images = {n: str(e) for n, e in res.extension.images.items() if e}
    detail = "; ".join(f"D({n}) = {e}" for n, e in images.items())
    return True, detail


def _filtered(ext_h, rep):
    res = filtered_normalize(ext_h)
    rep.extras["_filtered"] = res.extension
    return _normalized(res)


def _certificate(ext_n, rep):
    cert = formality_certificate_of_total(ext_n)
    return cert.hplus_zero, f"projection verified through degree {cert.verified_cap}"


def analyze(doc: ModelDocument, cap: int | None = None) -> VerdictReport:
    start = time.perf_counter()
    name = doc.name or doc.kind
    if doc.kind == "presentation":
        rep = analyze_presentation(doc.payload, name, cap)
    elif doc.kind == "cdga":
        rep = analyze_cdga(doc.payload, name, cap)
    elif doc.kind == "ks-extension":
        rep = analyze_extension(doc.payload, name, doc.base_formality, cap)
    else:
        rep = VerdictReport(name, doc.kind)
        rep.extras["generators"] = [g.name for g in doc.payload.generators]
    rep.seconds = time.perf_counter() - start
    return rep


__all__ = ["ANCHORS", "InvariantReport", "Verdict", "VerdictReport", "analyze", "cdga_invariants", "default_cap"]
