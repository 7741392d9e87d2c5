"""The ``report`` command: run the whole pipeline over a fixture set.

Writes ``report.json``, ``report.txt``, ``inequalities.tsv`` and PNG charts
into the output directory and compares every fixture with the expectations
in its manifest.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.ticker import MaxNLocator  # noqa: E402

from .corpus import MANIFEST, fixtures_dir  # noqa: E402
from .errors import SullivanError  # noqa: E402
from .io import load  # noqa: E402
from .pipeline import VerdictReport, analyze  # noqa: E402

DEFAULT_OUT = Path("sullivan-report")

# manifest keys that name a verdict; "ok" / "precondition" map to True / None
_VERDICT_KEYS = {
    "valid": "valid",
    "pure": "pure",
    "tncz": "tncz",
    "halperin": "halperin",
    "regular": "regular",
    "d_squared": "d_squared",
    "trivialize": "trivialize",
    "filter_normalize": "filter_normalize",
    "normalize_odd_sphere": "normalize_odd_sphere",
}


def _strip(betti):
    out = list(betti)
    while out and not out[-1]:
        out.pop()
    return out


def _invariant(rep: VerdictReport, role, name):
    inv = rep.invariants.get(role)
    return None if inv is None else getattr(inv, name)


def check_expectations(rep: VerdictReport, expect: dict) -> list[str]:
    """Human-readable mismatches between a report and manifest expectations."""
    problems = []

    def compare(key, got, want):
        if got != want:
            problems.append(f"{key}: expected {want!r}, got {got!r}")

    for key, want in expect.items():
        if key in _VERDICT_KEYS:
            got = rep.verdict(_VERDICT_KEYS[key])
            if want == "ok":
                want = True
            elif want == "precondition":
                want = None
                detail = rep.verdicts.get(key)
                if detail is None or "PreconditionError" not in detail.detail:
                    problems.append(f"{key}: expected a precondition refusal")
                    continue
            compare(key, got, want)
        elif key == "betti":
            role = "self"
            compare(key, _strip(rep.betti.get(role, [])), _strip(want))
        elif key == "total_betti":
            compare(key, _strip(rep.betti.get("total", [])), _strip(want))
        elif key in ("cup0", "e0"):
            compare(key, _invariant(rep, "self", key), want)
        elif key == "total_cup0":
            compare(key, _invariant(rep, "total", "cup0"), want)
        elif key == "cl0_upper":
            compare(key, _invariant(rep, "total", "cl0_upper"), want)
        elif key == "product_before":
            compare(key, rep.extras.get("product"), want)
        elif key == "product_after":
            if want and rep.verdict("trivialize") is not True:
                problems.append("product_after: trivialization did not succeed")
        elif key == "at":
            compare(key, rep.extras.get("failing_generator"), want)
        elif key in ("failure", "failing_generator", "minimal", "witness_degree", "formal_dimension",
                     "derivation_dims", "tncz_degree"):
            compare(key, rep.extras.get(key), want)
        elif key == "not_square":
            compare(key, rep.verdict("regular") is False and "relations for" in rep.verdicts["regular"].detail, want)
        else:
            problems.append(f"unknown expectation {key!r}")
    return problems


def _plot_betti(rep: VerdictReport, path: Path):
    roles = [r for r in ("self", "base", "fiber", "total") if rep.betti.get(r)]
    fig, axes = plt.subplots(1, len(roles), figsize=(3.2 * len(roles), 2.6), squeeze=False)
    for ax, role in zip(axes[0], roles):
        betti = rep.betti[role]
        ax.bar(range(len(betti)), betti, color="#3b6ea5")
        ax.set_title(role if role != "self" else rep.fixture, fontsize=9)
        ax.set_xlabel("degree")
        ax.set_xticks(range(len(betti)))
        ax.yaxis.set_major_locator(MaxNLocator(integer=True))
        ax.tick_params(labelsize=7)
    axes[0][0].set_ylabel("betti number")
    fig.suptitle(rep.fixture, fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=90)
    plt.close(fig)


def _plot_invariants(reports, path: Path):
    rows = [(r.fixture, r.invariants["total"]) for r in reports if "total" in r.invariants]
    if not rows:
        return
    fig, ax = plt.subplots(figsize=(max(5, 1.1 * len(rows)), 3.2))
    width = 0.25
    for j, (field, color) in enumerate((("cup0", "#3b6ea5"), ("e0", "#e08a2c"), ("cl0_upper", "#4a9b5d"))):
        xs = [i + (j - 1) * width for i in range(len(rows))]
        ys = [getattr(inv, field) or 0 for _, inv in rows]
        ax.bar(xs, ys, width, label=field, color=color)
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels([n for n, _ in rows], rotation=35, ha="right", fontsize=7)
    ax.set_ylabel("value")
    ax.set_title("total-space invariants")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=90)
    plt.close(fig)


def build_report(directory: Path, cap=None):
    """Analyze every manifest entry; returns ``(rows, reports)``."""
    manifest = json.loads((directory / MANIFEST).read_text())["fixtures"]
    rows, reports = [], []
    for entry in manifest:
        name = entry["file"].removesuffix(".json")
        try:
            rep = analyze(load(directory / entry["file"]), cap)
            rep.fixture = name
            problems = check_expectations(rep, entry.get("expect", {}))
        except SullivanError as exc:
            rep = VerdictReport(name, entry.get("kind", "?"), errors=[f"{type(exc).__name__}: {exc}"])
            problems = [f"analysis failed: {exc}"]
        reports.append(rep)
        rows.append({"fixture": name, "ok": not problems, "problems": problems})
    return rows, reports


def write_outputs(out: Path, rows, reports):
    out.mkdir(parents=True, exist_ok=True)
    figures = out / "figures"
    figures.mkdir(exist_ok=True)
    payload = {
        "fixtures": [dict(r.as_dict(), expectations_ok=row["ok"], problems=row["problems"])
                     for r, row in zip(reports, rows)],
        "passed": sum(r["ok"] for r in rows),
        "total": len(rows),
    }
    (out / "report.json").write_text(json.dumps(payload, indent=2, default=str) + "\n")

    with open(out / "inequalities.tsv", "w", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t")
        writer.writerow(["fixture", "rule", "status", "detail", "anchor"])
        for rep in reports:
            for rule in rep.rules:
                writer.writerow([rep.fixture, *rule.as_row()])

    lines = []
    for rep, row in zip(reports, rows):
        mark = "ok  " if row["ok"] else "FAIL"
        lines.append(f"{mark} {rep.fixture}  ({rep.seconds:.2f} s)")
        for name, v in rep.verdicts.items():
            lines.append(f"       {name}: {v.value}" + (f"  ({v.detail})" if v.detail and v.value is not True else ""))
        for role, inv in rep.invariants.items():
            lines.append(f"       {role}: cup0={inv.cup0} e0={inv.e0} nil0={inv.nil0} cl0_upper={inv.cl0_upper}")
        for rule in rep.rules:
            r, status, detail, _ = rule.as_row()
            lines.append(f"       [{status}] {r}: {detail}")
        lines.extend(f"       problem: {p}" for p in row["problems"])
    lines.append(f"{payload['passed']}/{payload['total']} fixtures match their expectations")
    (out / "report.txt").write_text("\n".join(lines) + "\n")

    for rep in reports:
        if rep.betti:
            _plot_betti(rep, figures / f"betti-{rep.fixture}.png")
    _plot_invariants(reports, figures / "invariants.png")
    return payload


def run_report(args, stream) -> int:
    directory = fixtures_dir() if args.fixture_set == "corpus" else Path(args.fixture_set)
    if not (directory / MANIFEST).exists():
        stream.write(f"error: no {MANIFEST} in {directory}\n")
        return 2
    rows, reports = build_report(directory, args.cap)
    out = args.out or DEFAULT_OUT
    payload = write_outputs(out, rows, reports)
    if args.format == "json":
        stream.write(json.dumps({"out": str(out), "rows": rows}, indent=2) + "\n")
    else:
        for row in rows:
            stream.write(("ok   " if row["ok"] else "FAIL ") + row["fixture"] + "\n")
            for p in row["problems"]:
                stream.write(f"     {p}\n")
        stream.write(f"{payload['passed']}/{payload['total']} fixtures match; outputs in {out}\n")
    return 0 if payload["passed"] == payload["total"] else 1
