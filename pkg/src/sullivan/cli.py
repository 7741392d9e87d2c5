"""Command-line verdicts on model documents.

Exit status is 0 when the checked property holds, 1 when it fails and 2 on
errors (unreadable input, unmet preconditions).  ``--strict`` turns an
inconclusive verdict into a failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import oracle as dense
from .cohomology import cohomology
from .derivations import derivation_space, meier_verdict
from .elliptic import (
    PureModel,
    check_hplus_zero,
    euler_report,
    pure_model_from_presentation,
    quotient_dimensions,
    regularity_certificate,
)
from .errors import NotMaximalSequence, ParseError, PreconditionError, SullivanError
from .fibration import (
    check_pure,
    check_tncz,
    filtered_normalize,
    formality_certificate_of_total,
    normalize_over_odd_sphere,
    pushout,
    trivialize_over_odd_wedge,
    validate,
)
from .io import ModelDocument, load
from .pipeline import ANCHORS, analyze, default_cap

EXIT = {"pass": 0, "fail": 1, "inconclusive": 0, "error": 2}


@dataclass
class Outcome:
    status: str
    lines: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def exit_code(self, strict: bool) -> int:
        if self.status == "inconclusive" and strict:
            return 1
        return EXIT[self.status]


def _yes(flag) -> str:
    return "yes" if flag else "no"


def _require(doc: ModelDocument, *kinds):
    if doc.kind not in kinds:
        raise PreconditionError(f"expected a {' or '.join(kinds)} document, got {doc.kind}")


def _oracle_betti(out: Outcome, cdga, cap, label):
    engine = cohomology(cdga, cap).betti
    brute = dense.dense_betti(cdga, cap)
    agree = engine == brute
    out.lines.append(f"oracle {label} betti through {cap}: {'agree' if agree else f'DISAGREE {engine} vs {brute}'}")
    out.data.setdefault("oracle", []).append({"quantity": f"{label} betti", "engine": engine, "oracle": brute})
    if not agree:
        out.status = "fail"


# -- elliptic / halperin ---------------------------------------------------------


def cmd_elliptic(doc: ModelDocument, args) -> Outcome:
    _require(doc, "presentation", "cdga")
    out = Outcome("pass", data={"anchors": {k: ANCHORS[k] for k in ("regular", "hplus_zero", "positively_elliptic")}})
    if doc.kind == "presentation":
        p = doc.payload
        try:
            cert = regularity_certificate(p, args.cap)
        except NotMaximalSequence as exc:
            out.status = "fail"
            out.lines.append(f"regular: no ({exc})")
            out.data["regular"] = False
            return out
        out.data.update(regular=cert.status, dimensions=cert.dimensions, expected=cert.expected)
        if cert.status == "notRegular":
            out.status = "fail"
            out.lines.append(f"regular: no (quotient dimension differs from the series in degree {cert.witness_degree})")
            return out
        if cert.status == "inconclusive":
            out.status = "inconclusive"
            out.lines.append(f"regular: inconclusive (window stops at degree {cert.cap})")
            return out
        out.lines.append(f"regular: yes (formal dimension {cert.formal_dimension})")
        model = pure_model_from_presentation(p)
        if args.oracle:
            fd = cert.formal_dimension
            brute = dense.dense_quotient_dimensions(p, fd)
            engine = quotient_dimensions(p, fd)
            out.lines.append(f"oracle quotient dimensions: {'agree' if brute == engine else 'DISAGREE'}")
            out.data.setdefault("oracle", []).append({"quantity": "quotient dims", "engine": engine, "oracle": brute})
            if brute != engine:
                out.status = "fail"
    else:
        model = PureModel(doc.payload)
    hp = check_hplus_zero(model, args.cap if args.cap and args.cap >= model.formal_dimension + model.max_odd_degree else None)
    er = euler_report(model)
    out.lines.append(f"H_+=0: {_yes(hp.ok)}" + ("" if hp.ok else f" (witness {hp.witness} in degree {hp.degree})"))
    out.lines.append(f"betti: {er.betti}")
    out.lines.append(f"euler characteristic: {er.euler}, chi_pi: {er.chi_pi}")
    out.lines.append(f"positively elliptic: {_yes(er.positively_elliptic)}")
    for v in er.violations:
        out.lines.append(f"violation: {v}")
    out.data.update(hplus_zero=hp.ok, betti=er.betti, euler=er.euler, chi_pi=er.chi_pi,
                    positively_elliptic=er.positively_elliptic, formal_dimension=model.formal_dimension)
    if args.oracle:
        _oracle_betti(out, model.cdga, model.formal_dimension + 2, "pure model")
    if not (hp.ok and er.positively_elliptic):
        out.status = "fail"
    return out


def cmd_halperin(doc: ModelDocument, args) -> Outcome:
    _require(doc, "presentation")
    p = doc.payload
    hv = meier_verdict(p)
    out = Outcome("pass" if hv.holds else "fail", data={"anchor": ANCHORS["halperin"]})
    out.lines.append(f"Der^{{<0}}=0: {_yes(hv.holds)}")
    dims = {s.shift: s.dimension for s in hv.evidence}
    out.lines.append("scanned shifts: " + ", ".join(f"{k}: dim {d}" for k, d in dims.items()))
    if hv.skipped_odd_shifts:
        out.lines.append("odd shifts skipped (target degrees are odd): " + ", ".join(map(str, hv.skipped_odd_shifts)))
    if hv.certificate:
        shown = ", ".join(f"{n} -> {e}" for n, e in hv.certificate.items() if e)
        out.lines.append(f"certificate derivation: {shown}")
    out.data.update(holds=hv.holds, dimensions={str(k): d for k, d in dims.items()},
                    skipped=hv.skipped_odd_shifts,
                    certificate={n: str(e) for n, e in (hv.certificate or {}).items() if e})
    if args.oracle:
        for k, d in dims.items():
            brute = dense.dense_derivation_dimension(p, k)
            out.data.setdefault("oracle", []).append({"quantity": f"Der^{k}", "engine": d, "oracle": brute})
            out.lines.append(f"oracle Der^{k}: {'agree' if brute == d else f'DISAGREE {d} vs {brute}'}")
            if brute != d:
                out.status = "fail"
    return out


# -- fibrations ----------------------------------------------------------------------


def _extension(doc: ModelDocument, out: Outcome):
    _require(doc, "ks-extension")
    ext = doc.extension
    v = validate(ext)
    if not v:
        out.status = "fail"
        out.lines.append(f"valid: no ({v.generator}: {v.reason})")
        if v.witness is not None and v.reason and "D^2" in v.reason:
            out.lines.append(f"residual: {v.witness}")
        out.data.update(valid=False, generator=v.generator, reason=v.reason)
        return None
    return ext


def _over_cohomology(doc, ext, out):
    """Push out to the base cohomology when the document supplies a formality map."""
    if ext.base.images and doc.base_formality is not None:
        res = pushout(ext, doc.base_formality, require_quasi_iso=True)
        out.lines.append("pushed out along the base formality map (quasi-isomorphism verified)")
        return res.extension
    return ext


def _show_images(out, ext, label="D"):
    for n in ext.order:
        img = ext.images[n]
        if img:
            out.lines.append(f"  {label}({n}) = {img}")
    out.data["images"] = {n: str(ext.images[n]) for n in ext.order if ext.images[n]}


def cmd_fibration(doc: ModelDocument, args) -> Outcome:
    out = Outcome("pass")
    action = args.action
    ext = _extension(doc, out)
    if ext is None:
        return out
    out.data["anchor"] = ANCHORS.get({"validate": "valid", "normalize-odd-sphere": "normalize_odd_sphere",
                                      "filter-normalize": "filter_normalize"}.get(action, action), action)
    if action == "validate":
        out.lines.append("valid: yes")
        out.data["valid"] = True
    elif action == "pure":
        ok = check_pure(ext)
        out.status = "pass" if ok else "fail"
        out.lines.append(f"pure: {_yes(ok)}")
        out.data["pure"] = ok
    elif action == "tncz":
        tv = check_tncz(ext, args.cap)
        out.status = "pass" if tv else "fail"
        out.lines.append(f"TNCZ: {_yes(tv.ok)}")
        out.lines.append(f"fiber betti: {tv.fiber_betti}")
        if not tv.ok:
            out.lines.append(f"fiber class {tv.fiber_class} in degree {tv.degree} is not a restriction")
        out.data.update(tncz=tv.ok, cap=tv.cap, fiber_betti=tv.fiber_betti)
        if args.oracle:
            _oracle_betti(out, ext.total, tv.cap, "total")
    elif action == "normalize-odd-sphere":
        res = normalize_over_odd_sphere(ext)
        out.lines.append("normalized: D(V^even) lies in u * Λ(V^even)")
        _show_images(out, res.extension)
        out.lines.extend(f"note: {n}" for n in res.notes)
    elif action == "trivialize":
        ext = _over_cohomology(doc, ext, out)
        res = trivialize_over_odd_wedge(ext)
        out.lines.append("trivialized: D = 1 (x) d")
        _show_images(out, res.extension)
        out.data["substitutions"] = {n: str(e) for n, e in res.change.substitutions.items()}
    elif action == "filter-normalize":
        ext = _over_cohomology(doc, ext, out)
        res = filtered_normalize(ext)
        out.lines.append("filtered: D(V_0) = 0 and D(V_1) inside H(B) (x) (ΛV)_0")
        _show_images(out, res.extension)
        cert = formality_certificate_of_total(res.extension, args.cap)
        out.lines.append(f"formality certificate: {_yes(cert.hplus_zero)} (verified through degree {cert.verified_cap})")
        out.data.update(formality=cert.hplus_zero, verified_cap=cert.verified_cap)
        if not cert:
            out.status = "fail"
    return out


# -- invariants / oracle -------------------------------------------------------------


def cmd_invariants(doc: ModelDocument, args) -> Outcome:
    rep = analyze(doc, args.cap)
    out = Outcome("pass", data=rep.as_dict())
    if not rep.invariants:
        out.status = "error"
        out.lines.append("no invariants computed: " + "; ".join(
            [f"{k}: {v.detail}" for k, v in rep.verdicts.items() if v.value is not True] + rep.errors))
        return out
    for role, inv in rep.invariants.items():
        fields = ", ".join(f"{k}={getattr(inv, k)}" for k in ("cup0", "e0", "nil0", "cat0", "cl0_upper")
                           if getattr(inv, k) is not None)
        out.lines.append(f"{role}: {fields}")
        for name, value, rule in inv.provenance:
            out.lines.append(f"  {name} = {value}  [{rule}]")
    for r in rep.rules:
        rule, status, detail, anchor = r.as_row()
        out.lines.append(f"{status:>4}  {rule}: {detail}")
        if status == "FAIL":
            out.status = "fail"
    out.lines.extend(f"note: {e}" for e in rep.errors)
    return out


def cmd_oracle(doc: ModelDocument, args) -> Outcome:
    out = Outcome("pass")
    if doc.kind == "presentation":
        p = doc.payload
        top = dense._top_degree(p)
        engine = quotient_dimensions(p, top + 2)
        brute = dense.dense_quotient_dimensions(p, top + 2)
        out.data.setdefault("oracle", []).append({"quantity": "quotient dims", "engine": engine, "oracle": brute})
        out.lines.append(f"oracle quotient dimensions through {top + 2}: {'agree' if engine == brute else 'DISAGREE'}")
        if engine != brute:
            out.status = "fail"
        for k in range(-max(p.algebra.degrees, default=0), 0, 1):
            if k % 2:
                continue
            e = derivation_space(p, k, check_regular=False).dimension
            b = dense.dense_derivation_dimension(p, k)
            out.data["oracle"].append({"quantity": f"Der^{k}", "engine": e, "oracle": b})
            out.lines.append(f"oracle Der^{k}: {'agree' if e == b else f'DISAGREE {e} vs {b}'} (dim {e})")
            if e != b:
                out.status = "fail"
    elif doc.kind == "cdga":
        cdga = doc.payload
        _oracle_betti(out, cdga, args.cap if args.cap is not None else default_cap(cdga), "cdga")
    elif doc.kind == "ks-extension":
        ext = doc.extension
        if args.cap is not None:
            cap = args.cap
        elif ext.base.images:
            cap = default_cap(ext.total)
        else:
            cap = ext.base_top_degree() + ext.fiber_formal_dimension() + 2
        _oracle_betti(out, ext.total, cap, "total")
    else:
        raise PreconditionError("nothing to cross-check on a bare algebra")
    return out


# -- entry point -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cap", type=int, default=None, help="degree cap override")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--strict", action="store_true", help="treat inconclusive verdicts as failures")
    common.add_argument("--oracle", action="store_true", help="also run the dense brute-force cross-check")
    common.add_argument("--out", type=Path, default=None, help="write the machine-readable report here")

    parser = argparse.ArgumentParser(prog="sullivan", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    ell = sub.add_parser("elliptic", parents=[common], help="regularity, pure model and ellipticity")
    ell.add_argument("action", choices=("check",))
    ell.add_argument("file", type=Path)
    ell.set_defaults(run=cmd_elliptic)
    hal = sub.add_parser("halperin", parents=[common], help="negative-degree derivation criterion")
    hal.add_argument("action", choices=("check",))
    hal.add_argument("file", type=Path)
    hal.set_defaults(run=cmd_halperin)
    fib = sub.add_parser("fibration", parents=[common], help="KS-extension verdicts and normalizations")
    fib.add_argument("action", choices=("validate", "pure", "tncz", "normalize-odd-sphere", "trivialize",
                                        "filter-normalize"))
    fib.add_argument("file", type=Path)
    fib.set_defaults(run=cmd_fibration)
    inv = sub.add_parser("invariants", parents=[common], help="cup length, Toomer invariant and cone-length bound")
    inv.add_argument("file", type=Path)
    inv.set_defaults(run=cmd_invariants)
    rep = sub.add_parser("report", parents=[common], help="full pipeline over a fixture directory with a manifest")
    rep.add_argument("fixture_set", help="directory with manifest.json, or 'corpus' for the bundled set")
    rep.set_defaults(run=None)
    orc = sub.add_parser("oracle", parents=[common], help="dense brute-force cross-checks")
    orc.add_argument("file", type=Path)
    orc.set_defaults(run=cmd_oracle)
    return parser


def _emit(out: Outcome, args, code: int, stream):
    payload = {"command": args.command, "status": out.status, "exit": code, **out.data}
    if getattr(args, "file", None) is not None:
        payload["file"] = str(args.file)
    if args.format == "json":
        stream.write(json.dumps(payload, indent=2, default=str) + "\n")
    else:
        for line in out.lines:
            stream.write(line + "\n")
    if args.out is not None:
        target = args.out
        if target.suffix != ".json":
            target.mkdir(parents=True, exist_ok=True)
            target = target / "report.json"
        target.write_text(json.dumps(payload, indent=2, default=str) + "\n")


def main(argv=None, stream=None) -> int:
    stream = stream or sys.stdout
    args = build_parser().parse_args(argv)
    if args.command == "report":
        from .report import run_report  # defer the matplotlib import to reports

        return run_report(args, stream)
    try:
        doc = load(args.file)
        out = args.run(doc, args)
    except ParseError as exc:
        out = Outcome("error", [f"error: {exc}"], {"error": str(exc), "line": exc.line, "column": exc.column})
    except PreconditionError as exc:
        out = Outcome("error", [f"precondition: {exc}"], {"error": str(exc)})
    except SullivanError as exc:
        out = Outcome("error", [f"error: {type(exc).__name__}: {exc}"], {"error": str(exc)})
    except OSError as exc:
        out = Outcome("error", [f"error: {exc}"], {"error": str(exc)})
    code = out.exit_code(args.strict)
    _emit(out, args, code, stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
