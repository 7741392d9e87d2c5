"""Tabulate four unresolved questions about fibrations over the fixture corpus.

Nothing here is asserted. Each row records whether the hypotheses of a question
hold for a fixture and, when they do, what the computed invariants say. Cells
read "n/a" when a hypothesis fails and "?" when only a bound is available.

    python3 experiments/open_questions.py [--out table.tsv]
"""

import argparse
import csv
import sys
from contextlib import nullcontext

from sullivan.corpus import load_fixture, read_manifest
from sullivan.pipeline import analyze

COLUMNS = [
    "fixture", "tncz", "fiber_pos_elliptic", "base_formal", "total_formal", "odd_wedge_base",
    "nil0_F", "e0_B", "cup0_E", "e0_E", "cl0_E_upper",
    "formal_implies_tncz", "cup_equals_1_plus_nil", "cl_superadditive", "e0_B2_bound", "e0_bound",
]


def _formal(inv) -> bool:
    return any(rule.startswith("formal-agreement") for name, _, rule in inv.provenance if name == "nil0")


def _yes(flag):
    return "yes" if flag else "no"


def row(name, rep):
    inv = rep.invariants
    base, fiber, total = inv["base"], inv["fiber"], inv["total"]
    tncz = rep.verdict("tncz")
    pos = bool(rep.verdict("fiber_positively_elliptic"))
    base_formal, total_formal = _formal(base), bool(rep.verdict("formality"))
    odd_wedge = rep.verdict("trivialize") is not None
    nil_f = fiber.nil0

    # positively elliptic fibers are formal, so the first question reduces to these flags
    q1 = _yes(tncz) if pos and base_formal and total_formal else "n/a"
    q2 = _yes(total.cup0 == 1 + nil_f) if pos and odd_wedge else "n/a"
    if tncz and fiber.nil0 is not None and base.cat0 is not None:
        need = base.cat0 + nil_f
        # e0 bounds cl0 from below, so reaching the target with e0 settles the instance
        q3 = "yes" if total.e0 >= need else ("no" if total.cl0_upper is not None and total.cl0_upper < need else "?")
    else:
        q3 = "n/a"
    q4a = _yes(total.e0 >= 2 + nil_f) if pos and base.e0 == 2 else "n/a"
    q4b = _yes(total.e0 >= 1 + nil_f) if pos else "n/a"
    return [name, _yes(tncz), _yes(pos), _yes(base_formal), _yes(total_formal), _yes(odd_wedge),
            nil_f, base.e0, total.cup0, total.e0, total.cl0_upper, q1, q2, q3, q4a, q4b]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", help="write the table here instead of stdout")
    args = parser.parse_args(argv)
    rows = []
    for entry in read_manifest():
        if entry["kind"] != "ks-extension" or not entry["expect"].get("valid"):
            continue
        name = entry["file"].removesuffix(".json")
        rep = analyze(load_fixture(name))
        if {"base", "fiber", "total"} <= rep.invariants.keys():
            rows.append(row(name, rep))
    with open(args.out, "w", newline="") if args.out else nullcontext(sys.stdout) as stream:
        writer = csv.writer(stream, delimiter="\t", lineterminator="\n")
        writer.writerow(COLUMNS)
        writer.writerows(rows)


if __name__ == "__main__":
    main()
