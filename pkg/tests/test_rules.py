import pytest

from cbi.display import PostulateStep, parse_consecution
from cbi.rules import (DISPLAY_RULE, RULE_NAMES, RULES, RuleInstanceError, audit_belnap_conditions,
                       canonical_rule_name, check_rule_instance, mutation_controls, postulate_rules)


def c(text):
    return parse_consecution(text)


def test_rule_table_covers_every_rule():
    expected = {"Id", "Cut", "TopL", "TopR", "BotL", "BotR", "NotL", "NotR", "AndL", "AndR", "OrL", "OrR",
                "ImpL", "ImpR", "MTopL", "MTopR", "MBotL", "MBotR", "MNotL", "MNotR", "StarL", "StarR",
                "ParL", "ParR", "WandL", "WandR", "AAL", "AAR", "MAL", "MAR", "AEL", "AER", "MEL", "MER",
                "WkL", "WkR", "CtrL", "CtrR", DISPLAY_RULE}
    assert set(RULE_NAMES) == expected
    assert {n for n, r in RULES.items() if r.bidirectional} == {
        "AAL", "AAR", "MAL", "MAR", "AEL", "AER", "MEL", "MER"}


def test_symbolic_aliases():
    assert canonical_rule_name("∗R") == "StarR"
    assert canonical_rule_name("≡D") == DISPLAY_RULE
    assert canonical_rule_name("⊘L") == "MEL"
    with pytest.raises(KeyError):
        canonical_rule_name("Frobnicate")


def test_star_right_instance():
    check_rule_instance("∗R", c("X , Y |- F * G"), [c("X |- F"), c("Y |- G")])


def test_id_needs_a_variable():
    check_rule_instance("Id", c("P |- P"), [])
    with pytest.raises(RuleInstanceError):
        check_rule_instance("Id", c("P & Q |- P & Q"), [])


def test_mismatch_reports_position():
    with pytest.raises(RuleInstanceError) as err:
        check_rule_instance("StarR", c("X , Y |- F * G"), [c("X |- F"), c("Z |- G")])
    assert "premise 1" in str(err.value)


def test_premise_count_checked():
    with pytest.raises(RuleInstanceError, match="premises"):
        check_rule_instance("AndR", c("X ; Y |- F & G"), [c("X |- F")])


def test_display_rule_trace_replay():
    check_rule_instance(DISPLAY_RULE, c("X , Y |- Z"), [c("X |- %Y , Z")],
                        {"trace": [PostulateStep("MD1a")]})
    with pytest.raises(RuleInstanceError, match="not the premise"):
        check_rule_instance(DISPLAY_RULE, c("X , Y |- Z"), [c("Y |- %X , Z")],
                            {"trace": [PostulateStep("MD1a")]})
    with pytest.raises(RuleInstanceError, match="trace"):
        check_rule_instance(DISPLAY_RULE, c("X , Y |- Z"), [c("X |- %Y , Z")], {})


def test_bidirectional_direction():
    concl, prem = c("(W ; X) ; Y |- Z"), c("W ; (X ; Y) |- Z")
    check_rule_instance("AAL", concl, [prem], {"direction": "fwd"})
    check_rule_instance("AAL", prem, [concl], {"direction": "bwd"})
    with pytest.raises(RuleInstanceError):
        check_rule_instance("AAL", prem, [concl], {"direction": "fwd"})
    with pytest.raises(RuleInstanceError, match="not bidirectional"):
        check_rule_instance("WkL", c("X ; Y |- Z"), [c("X |- Z")], {"direction": "bwd"})


def test_contraction_needs_equal_copies():
    check_rule_instance("CtrL", c("P |- Q"), [c("P ; P |- Q")])
    with pytest.raises(RuleInstanceError):
        check_rule_instance("CtrL", c("P |- Q"), [c("P ; R |- Q")])


def test_structural_rules_apply_at_top_level_only():
    with pytest.raises(RuleInstanceError):
        check_rule_instance("AEL", c("#P |- Q"), [c("#(AE ; P) |- Q")])


# ---------------------------------------------------------------- Belnap audit

def test_audit_full_table_passes():
    report = audit_belnap_conditions()
    assert report.ok
    assert all(report.passed(k) for k in ("C1", "C3", "C4", "C5"))
    assert len(report.checked) == len(RULES) + 12


def test_audit_flags_mutation_controls():
    rules = list(RULES.values()) + postulate_rules() + mutation_controls()
    report = audit_belnap_conditions(rules)
    assert report.violators("C3") == {"DupX"}
    assert report.violators("C4") == {"FlipX"}
    assert report.to_json()["conditions"]["C1"] is True
