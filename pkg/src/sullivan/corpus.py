"""The bundled fixture corpus and its manifest of expected outcomes.

The JSON files under ``sullivan/fixtures`` are generated from the builders
below (``python3 -m sullivan.corpus``) and checked back against them in the
test suite.  Expectations in the manifest are worked out by hand, not by
running the engine.
"""

from __future__ import annotations

import json
import random
import sys
from importlib import resources
from pathlib import Path

from .algebra import CDGA, FreeGCA, Generator
from .cohomology import DGMorphism
from .elliptic import Presentation
from .fibration import BasisChange, KSExtension, change_basis, product_extension, random_basis_change
from .io import ModelDocument, load, serialize

MANIFEST = "manifest.json"


def fixtures_dir() -> Path:
    return Path(str(resources.files("sullivan") / "fixtures"))


def _pure(signature: str, images: dict) -> CDGA:
    """Pure Sullivan algebra with lower degrees 0 (even) and 1 (odd)."""
    gens = []
    for tok in signature.split():
        name, deg = tok.split(":")
        gens.append(Generator(name, int(deg), int(deg) % 2))
    alg = FreeGCA(gens, canonical=False)
    return CDGA(alg, images)


def _presentations():
    def pres(name, gens, rels, expect, test_mode=False, description=None):
        p = Presentation(gens, rels, test_mode=test_mode, name=name)
        return name, ModelDocument("presentation", p, name, description), expect

    def sphere_like(fd, betti, cup):
        return {"regular": True, "formal_dimension": fd, "betti": betti, "halperin": True, "cup0": cup, "e0": cup}

    yield pres("s2", [("x", 2)], ["x^2"], sphere_like(2, [1, 0, 1], 1))
    yield pres("s4", [("x", 4)], ["x^2"], sphere_like(4, [1, 0, 0, 0, 1], 1))
    yield pres("s6", [("x", 6)], ["x^2"], sphere_like(6, [1, 0, 0, 0, 0, 0, 1], 1))
    for n in range(1, 5):
        betti = [1 if k % 2 == 0 else 0 for k in range(2 * n + 1)]
        yield pres(f"cp{n}", [("x", 2)], [f"x^{n + 1}"], sphere_like(2 * n, betti, n))
    yield pres("s2xs2", [("a", 2), ("b", 2)], ["a^2", "b^2"], sphere_like(4, [1, 0, 2, 0, 1], 2))
    yield pres("s2xs4", [("a", 2), ("b", 4)], ["a^2", "b^2"], sphere_like(6, [1, 0, 1, 0, 1, 0, 1], 2))
    yield pres("s2xs6", [("a", 2), ("b", 6)], ["a^2", "b^2"],
               sphere_like(8, [1, 0, 1, 0, 0, 0, 1, 0, 1], 2))
    yield pres("hp2", [("x", 4)], ["x^3"], sphere_like(8, [1, 0, 0, 0, 1, 0, 0, 0, 1], 2))
    yield pres("flag-u3", [("a", 2), ("b", 2)], ["a^2 + a*b + b^2", "a^2*b + a*b^2"],
               sphere_like(6, [1, 0, 2, 0, 2, 0, 1], 3),
               description="complete flags in C^3 after eliminating the third Chern root")
    yield pres("cp2-sum-cp2", [("a", 2), ("b", 2)], ["a^2 - b^2", "a*b"], sphere_like(4, [1, 0, 2, 0, 1], 2))
    yield pres("square-and-mixed", [("a", 2), ("b", 2)], ["a^2", "a*b"],
               {"regular": False, "witness_degree": 6})
    yield pres("truncated-two-generator", [("x", 2), ("y", 4)], ["x^2", "x*y", "y^2"],
               {"regular": False, "not_square": True, "derivation_dims": {"-2": 1, "-4": 0}},
               test_mode=True, description="non-square test-mode presentation with a negative derivation")


def _cdgas():
    def doc(name, signature, diff=None, ideal=(), expect=None, description=None):
        cdga = CDGA(FreeGCA.on(signature), diff or {}, list(ideal))
        return name, ModelDocument("cdga", cdga, name, description), expect or {}

    yield doc("s3", "u3:3", expect={"betti": [1, 0, 0, 1], "cup0": 1, "e0": 1, "minimal": True})
    yield doc("s5", "u5:5", expect={"betti": [1, 0, 0, 0, 0, 1], "cup0": 1, "e0": 1, "minimal": True})
    yield doc("s3-wedge-s5", "u3:3 u5:5", ideal=["u3*u5"],
              expect={"betti": [1, 0, 0, 1, 0, 1], "cup0": 1})
    yield doc("s4-minimal", "w4:4 w7:7", {"w7": "w4^2"},
              expect={"betti": [1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0], "cup0": 1, "e0": 1, "minimal": True})
    yield doc("s4-cohomology", "w4:4", ideal=["w4^2"], expect={"betti": [1, 0, 0, 0, 1], "cup0": 1})
    yield doc("cp3-over-s4-total", "v2:2 v3:3 w4:4 w7:7", {"v3": "v2^2 - w4", "w7": "w4^2"},
              expect={"betti": [1, 0, 1, 0, 1, 0, 1, 0, 0], "cup0": 3, "e0": 3, "minimal": False})
    yield doc("d-squared-fails", "x2:2 y3:3 z4:4", {"y3": "x2^2", "z4": "x2*y3"},
              expect={"d_squared": False, "failing_generator": "z4"},
              description="d(d(z4)) = x2^3 is nonzero")


def _twisted(ext: KSExtension, seed: int, name: str) -> KSExtension:
    """A seeded random triangular change of basis that is not the identity."""
    rng = random.Random(seed)
    while True:
        bc = random_basis_change(ext, rng)
        out = change_basis(ext, bc, name)
        if not out.is_product():
            return out


def _extensions():
    def doc(name, ext, expect, formality=None, description=None):
        ext.name = name
        return name, ModelDocument("ks-extension", ext, name, description, formality), expect

    s4 = CDGA(FreeGCA.on("w4:4 w7:7"), {"w7": "w4^2"})
    s4_coh = CDGA(FreeGCA.on("w4:4"), ideal=["w4^2"])
    fiber_cp1 = [Generator("v2", 2, 0), Generator("v3", 3, 1)]
    hopf = KSExtension(s4, fiber_cp1, {"v3": "v2^2 - w4"})
    formality = DGMorphism(s4, s4_coh, {"w4": "w4"})
    yield doc("cp3-over-s4", hopf,
              {"valid": True, "pure": True, "tncz": True, "trivialize": "precondition",
               "filter_normalize": "ok", "total_betti": [1, 0, 1, 0, 1, 0, 1], "total_cup0": 3},
              formality, "twistor-type fibration CP^1 -> CP^3 -> S^4 over the minimal model of S^4")
    reversed_ = KSExtension(s4, fiber_cp1, {"v3": "v2^2 - w4"}, order=["v3", "v2"])
    yield doc("cp3-over-s4-reversed", reversed_, {"valid": False, "failure": "ks-order", "at": "v3"})

    s2_base = CDGA(FreeGCA.on("x2:2 y3:3"), {"y3": "x2^2"})
    circle = KSExtension(s2_base, [Generator("u1", 1, 1)], {"u1": "x2"})
    yield doc("circle-bundle-over-s2", circle,
              {"valid": True, "pure": True, "tncz": False, "tncz_degree": 1},
              description="Hopf circle bundle; the fiber class does not extend")

    s3 = CDGA(FreeGCA.on("u3:3"))
    broken = KSExtension(s3, [Generator("a2", 2, 0), Generator("y3", 3, 1)], {"a2": "u3", "y3": "a2^2"})
    yield doc("d-squared-over-s3", broken, {"valid": False, "failure": "d-squared", "at": "y3"})

    cp2 = _pure("x2:2 y5:5", {"y5": "x2^3"})
    s2xs4 = _pure("a2:2 b4:4 y3:3 z7:7", {"y3": "a2^2", "z7": "b4^2"})
    s2xs6 = _pure("a2:2 b6:6 y3:3 z11:11", {"y3": "a2^2", "z11": "b6^2"})
    wedge = CDGA(FreeGCA.on("u3:3 u5:5"), ideal=["u3*u5"])
    s7 = CDGA(FreeGCA.on("u7:7"))

    product_expect = {"valid": True, "pure": True, "tncz": True, "trivialize": "ok", "product_after": True}
    yield doc("cp2-times-s3", product_extension(s3, cp2),
              dict(product_expect, cl0_upper=3, total_cup0=3))
    yield doc("s2xs4-times-s7", product_extension(s7, s2xs4),
              dict(product_expect, cl0_upper=3, total_cup0=3))
    yield doc("cp2-over-s3-wedge-s5", product_extension(wedge, cp2),
              dict(product_expect, cl0_upper=3, total_cup0=3))

    # a twist of an even generator leaves D(V^even) nonzero, so the input is not pure
    twisted = dict(product_expect, pure=False, product_before=False)
    yield doc("s2xs6-twisted-over-s3-wedge-s5", _twisted(product_extension(wedge, s2xs6), 7, None),
              dict(twisted, cl0_upper=3, total_cup0=3))
    yield doc("s2xs6-twisted-over-s3", _twisted(product_extension(s3, s2xs6), 11, None),
              dict(twisted, normalize_odd_sphere="ok", total_cup0=3))
    yield doc("s2xs6-twisted-over-s4-cohomology", _twisted(product_extension(s4_coh, s2xs6), 5, None),
              {"valid": True, "pure": True, "tncz": True, "trivialize": "precondition",
               "filter_normalize": "ok", "product_before": False},
              description="twisted product over the cohomology of an even sphere")

    spheres = _pure("a2:2 b2:2 c2:2 x12:12 y3:3 z3:3 t3:3 y23:23",
                    {"y3": "a2^2", "z3": "b2^2", "t3": "c2^2", "y23": "x12^2"})
    lemma = product_extension(s3, spheres)
    bc = BasisChange(lemma, {"x12": "u3*y3*z3*t3 + u3*a2*b2*c2*y3"})
    yield doc("s2-cubed-times-s12-twisted-over-s3", change_basis(lemma, bc),
              {"valid": True, "pure": False, "tncz": True, "normalize_odd_sphere": "ok",
               "trivialize": "ok", "product_before": False, "total_cup0": 5, "cl0_upper": 5})


def build_corpus():
    """Yield ``(name, document, expectations)`` for every fixture."""
    yield from _presentations()
    yield from _cdgas()
    yield from _extensions()


def write_corpus(directory: Path | None = None) -> Path:
    directory = Path(directory or fixtures_dir())
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for name, document, expect in build_corpus():
        fname = f"{name}.json"
        (directory / fname).write_text(serialize(document))
        entries.append({"file": fname, "kind": document.kind, "expect": expect})
    manifest = {"schema_version": 1, "fixtures": entries}
    (directory / MANIFEST).write_text(json.dumps(manifest, indent=2) + "\n")
    return directory


def read_manifest(directory: Path | None = None) -> list[dict]:
    directory = Path(directory or fixtures_dir())
    return json.loads((directory / MANIFEST).read_text())["fixtures"]


def load_fixture(name: str, directory: Path | None = None) -> ModelDocument:
    directory = Path(directory or fixtures_dir())
    fname = name if name.endswith(".json") else f"{name}.json"
    return load(directory / fname)


if __name__ == "__main__":
    print(write_corpus(sys.argv[1] if len(sys.argv) > 1 else None))
