import pytest

from mgumt.fixtures import SESSION_SCRIPT, teaching_gold
from mgumt.grammar import complete_derivations, save_lexicon
from mgumt.learner import LearnerState
from mgumt.teacher import (
    GoldGrammar, ScriptInvalid, Verdict, judge, parse_script, run_session,
)
from mgumt.terms import alpha_equivalent, parse_term
from mgumt.transducer import produce

p = parse_term


@pytest.fixture(scope="module")
def gold():
    return GoldGrammar(teaching_gold(), budget=200)


def test_judge_endorses_grammatical_pair(gold):
    assert judge(gold, "the rat eats cheese", p("eat(cheese)(rat)")) \
        is Verdict.ENDORSE


def test_judge_rejects_agreement_error(gold):
    assert judge(gold, "the rats eats carrot", p("eat(carrot)(rats)")) \
        is Verdict.REJECT_UNGRAMMATICAL


def test_judge_rejects_meaning_mismatch(gold):
    assert judge(gold, "the mouse eats cheese", p("eat(carrot)(mouse)")) \
        is Verdict.REJECT_MEANING


def test_judge_is_pure(gold):
    args = ("the rats eat cheese", p("eat(cheese)(rats)"))
    assert judge(gold, *args) is judge(gold, *args) is Verdict.ENDORSE


def test_teacher_self_consistency(gold):
    signs = complete_derivations(gold.lexicon, 200).complete_signs()
    assert len(signs) == 8
    for sign in signs:
        said = produce(gold.lexicon, sign.semantics, 200)
        assert judge(gold, said.utterance, sign.semantics) is Verdict.ENDORSE


def test_script_parsing_round_trip():
    script = parse_script(SESSION_SCRIPT)
    ops = [line.op for line in script]
    assert ops == ["teach", "teach", "probe", "expect", "teach", "probe",
                   "expect", "teach", "probe", "expect", "teach"]


def test_script_rejects_garbage():
    with pytest.raises(ScriptInvalid):
        parse_script("teach\tonly-two-fields\n")
    with pytest.raises(ScriptInvalid):
        parse_script("expect\tmaybe\n")


def test_session_snapshots_follow_the_published_course(gold):
    log, learner = run_session(gold, SESSION_SCRIPT)
    counts = [len(lex) for _, lex in log.snapshots()]
    # teach, teach, probe, teach, probe, teach, probe(+repair), teach
    assert counts == [1, 4, 4, 6, 6, 8, 9, 11]
    verdicts = [v.value for v in log.verdicts()]
    assert verdicts == ["endorse", "endorse", "reject-ungrammatical"]


def test_empty_script(gold):
    log, learner = run_session(gold, "")
    assert log.events == []
    assert len(learner.lexicon) == 0 and learner.time == 0


def test_probe_after_third_iteration(gold):
    script = (
        "teach\tthe mouse eats cheese\teat(cheese)(mouse)\n"
        "teach\tthe rat eats cheese\teat(cheese)(rat)\n"
        "teach\tthe mouse eats carrot\teat(carrot)(mouse)\n"
        "probe\teat(cheese)(mouse)\n"
        "expect\tendorse\n")
    log, learner = run_session(gold, script)
    # oracle: the learner's own grammar derives the probed pair
    hits = [s for s in complete_derivations(learner.lexicon, 100).complete_signs()
            if s.exponent == "the mouse eats cheese"
            and alpha_equivalent(s.semantics, p("eat(cheese)(mouse)"))]
    assert hits
    said = [e for e in log.events if e.kind == "learner-said"]
    assert said[-1].payload[0] == "the mouse eats cheese"
    assert log.verdicts()[-1] is Verdict.ENDORSE


def test_invalid_teach_rejected(gold):
    with pytest.raises(ScriptInvalid):
        run_session(gold, "teach\tcheese mouse the\teat(cheese)(mouse)\n")


def test_expectation_failure(gold):
    script = (
        "teach\tthe mouse eats cheese\teat(cheese)(mouse)\n"
        "probe\teat(cheese)(mouse)\n"
        "expect\treject\n")
    with pytest.raises(ScriptInvalid):
        run_session(gold, script)


def test_session_replay_byte_identical(gold):
    log1, _ = run_session(gold, SESSION_SCRIPT)
    log2, _ = run_session(gold, log1.to_script())
    snaps1 = [(t, save_lexicon(lex)) for t, lex in log1.snapshots()]
    snaps2 = [(t, save_lexicon(lex)) for t, lex in log2.snapshots()]
    assert snaps1 == snaps2
    assert log1.render() == log2.render()


def test_gold_lexicon_type_pattern_enforced():
    from mgumt.grammar import load_lexicon
    from mgumt.teacher import GoldLexiconInvalid
    with pytest.raises(GoldLexiconInvalid):
        GoldGrammar(load_lexicon("x\t::\tn =d\tmouse\n"))
