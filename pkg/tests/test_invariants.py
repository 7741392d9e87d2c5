import copy

import pytest

from sullivan.algebra import CDGA, FreeGCA
from sullivan.cohomology import cohomology
from sullivan.errors import CapError, IncompleteContext, PreconditionError, TheoryViolation
from sullivan.invariants import (
    MODEL_DEPENDENT,
    check_fibration_inequalities,
    cl0_upper_via_acyclic_quotient,
    cup_length,
    is_minimal,
    lift_to_free_base,
    make_report,
    nilpotency_length,
    toomer,
    wedge_minimal_model,
)
from sullivan.pipeline import analyze


def test_cup_length_and_toomer_of_cp3():
    cp3 = CDGA(FreeGCA.on("x:2 y:7"), {"y": "x^4"})
    win = cohomology(cp3, 9)
    assert cup_length(win) == 3
    assert toomer(cp3, 9).value == 3


def test_cup_length_refuses_truncated_windows():
    cp3 = CDGA(FreeGCA.on("x:2 y:7"), {"y": "x^4"})
    with pytest.raises(CapError):
        cup_length(cohomology(cp3, 6))


def test_non_minimal_toomer_is_flagged():
    model = CDGA(FreeGCA.on("v2:2 v3:3 w4:4 w7:7"), {"v3": "v2^2 - w4", "w7": "w4^2"})
    assert not is_minimal(model)
    result = toomer(model, 8)
    assert result.value == 3 and not result.minimal
    prov = dict((k, rule) for k, _, rule in make_report(3, 3, minimal=False).provenance)
    assert MODEL_DEPENDENT in prov["e0"]


def test_toomer_needs_a_free_model():
    with pytest.raises(PreconditionError):
        toomer(CDGA(FreeGCA.on("w4:4"), ideal=["w4^2"]), 6)


def test_wedge_minimal_model_has_the_wedge_cohomology():
    wedge = CDGA(FreeGCA.on("u3:3 u5:5"), ideal=["u3*u5"])
    model = wedge_minimal_model(wedge, 12)
    assert is_minimal(model)
    assert cohomology(model, 12).betti == cohomology(wedge, 12).betti
    assert "w7_1" in model.algebra.names


def test_lift_to_free_base_keeps_the_total_cohomology(fixture_doc):
    ext = fixture_doc("cp2-over-s3-wedge-s5").extension
    lifted = lift_to_free_base(ext, 14)
    assert cohomology(lifted.total, 14).betti == cohomology(ext.total, 14).betti


def test_acyclic_quotient_bound_on_a_twisted_product(fixture_doc):
    aq = cl0_upper_via_acyclic_quotient(fixture_doc("s2xs6-twisted-over-s3-wedge-s5").extension)
    assert aq.nilpotency_length == 3
    assert sum(aq.betti) == 3 * 4


def test_nilpotency_length_of_a_truncated_algebra():
    assert nilpotency_length(CDGA(FreeGCA.on("x:2"), ideal=["x^4"]), 6) == 3


def test_report_consistency_is_enforced():
    with pytest.raises(TheoryViolation):
        make_report(3, 2)
    with pytest.raises(TheoryViolation):
        make_report(2, 2, nil0_value=3)
    with pytest.raises(TheoryViolation):
        make_report(2, 3, cl0_upper=2)
    assert make_report(2, 2, nil0_value=2).cat0 == 2


def _reports(fixture_doc, name):
    rep = analyze(fixture_doc(name))
    reports = {"E": rep.invariants["total"], "B": rep.invariants["base"], "F": rep.invariants["fiber"]}
    flags = {"tncz": True, "base_formal": True, "base_odd_wedge": True, "fiber_positively_elliptic": True}
    return rep, reports, flags


def test_all_rules_pass_on_a_product(fixture_doc):
    rep, _, _ = _reports(fixture_doc, "cp2-times-s3")
    assert rep.rules and all(r.applicable and r.passed for r in rep.rules)


def test_corrupted_report_fails_the_rules(fixture_doc):
    _, reports, flags = _reports(fixture_doc, "cp2-times-s3")
    # attribute assignment skips the constructor's consistency checks
    bad = copy.copy(reports["E"])
    bad.e0 = 1
    verdicts = check_fibration_inequalities(dict(reports, E=bad), flags)
    failed = {r.rule for r in verdicts if r.applicable and not r.passed}
    assert {"toomer-superadditivity", "odd-wedge-nil", "toomer-step", "odd-wedge-cone-length"} <= failed


def test_missing_invariant_raises_incomplete_context(fixture_doc):
    _, reports, flags = _reports(fixture_doc, "cp2-times-s3")
    with pytest.raises(IncompleteContext):
        check_fibration_inequalities({"E": reports["E"], "B": reports["B"]}, flags)


def test_rules_without_hypotheses_are_not_applicable(fixture_doc):
    _, reports, _ = _reports(fixture_doc, "cp2-times-s3")
    verdicts = check_fibration_inequalities(reports, {})
    assert all(not r.applicable and r.passed is None for r in verdicts)
    assert verdicts[0].as_row()[1] == "n/a"
