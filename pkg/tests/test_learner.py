import random

import pytest
from iso import X1_TABLE, X21_TABLE, X3_TABLE, X41_TABLE, X4_TABLE, assert_isomorphic

from mgumt.grammar import complete_derivations, load_lexicon, save_lexicon
from mgumt.learner import (
    FactoringRegression, LearnerState, NoRepairFound, align, express, factor,
    ingest, repair,
)
from mgumt.terms import alpha_equivalent, parse_term, render_term
from mgumt.transducer import UMP, Unrealizable

p = parse_term

U1 = UMP("the mouse eats cheese", p("eat(cheese)(mouse)"))
U2 = UMP("the rat eats cheese", p("eat(cheese)(rat)"))
U3 = UMP("the mouse eats carrot", p("eat(carrot)(mouse)"))
U4 = UMP("the rats eat cheese", p("eat(cheese)(rats)"))
U5 = UMP("the mice eat cheese", p("eat(cheese)(mice)"))

PUNISHED = ("the rats eats carrot", p("eat(carrot)(rats)"))


def teach(state, *umps):
    for u in umps:
        ingest(state, u)
    return state


# --- align ------------------------------------------------------------------------

def test_align_sentence_pair():
    al = align(U1, U2)
    assert al is not None
    assert al.shared_exponent_segments == [["the"], ["eats", "cheese"]]
    assert al.residue_exponents == (["mouse"], ["rat"])
    assert alpha_equivalent(al.shared_semantic_subterm, p("eat(cheese)"))
    a, b = al.semantic_residues
    assert (render_term(a), render_term(b)) == ("mouse", "rat")


def test_align_against_entry():
    entry = load_lexicon(X21_TABLE).entries[3]
    al = align(U3, entry)
    assert al is not None
    assert al.shared_exponent_segments == [["eats"]]
    assert al.residue_exponents == (["carrot"], ["cheese"])
    assert render_term(al.shared_semantic_subterm) == "eat"


def test_align_character_phase():
    al = align("rat", "rats")
    assert al is not None
    assert al.shared_exponent_segments == [["rat"]]
    assert al.residue_exponents == ([], ["s"])
    assert align("rat", "mice") is None


def test_align_none_without_common_material():
    assert align(U1, UMP("birds fly", p("fly(birds)"))) is None


# --- ingest -----------------------------------------------------------------------

def test_ingest_first_pair_stored_whole():
    s = teach(LearnerState(), U1)
    assert_isomorphic(s.lexicon, X1_TABLE)


def test_ingest_second_pair_factors():
    s = teach(LearnerState(), U1, U2)
    assert_isomorphic(s.lexicon, X21_TABLE)
    # the intermediate split is on record
    assert any("factored" in r for r in s.revisions)


def test_ingest_duplicate_is_idempotent():
    s = teach(LearnerState(), U1, U2)
    before = save_lexicon(s.lexicon)
    t = s.time
    ingest(s, U1)
    assert save_lexicon(s.lexicon) == before
    assert s.time == t + 1


def test_ingest_third_pair_segments_the_verb_entry():
    s = teach(LearnerState(), U1, U2, U3)
    assert_isomorphic(s.lexicon, X3_TABLE)


def test_ingest_fourth_pair_adds_analogues():
    s = teach(LearnerState(), U1, U2, U3, U4)
    assert_isomorphic(s.lexicon, X4_TABLE)


def test_state_update_law_without_alignment():
    s = teach(LearnerState(), U1)
    before = set(map(str, s.lexicon.entries))
    ingest(s, UMP("birds fly", p("fly(birds)")))
    after = set(map(str, s.lexicon.entries))
    assert len(after) == len(before) + 1 and before < after


# --- factor -----------------------------------------------------------------------

def x2_state():
    """The intermediate three-entry lexicon, before the second-pass split."""
    s = LearnerState()
    s.lexicon = load_lexicon(
        "the mouse\t:\td\tmouse\n"
        "the rat\t:\td\trat\n"
        "eats cheese\t:\t=d c\t\\y.eat(cheese)(y)\n")
    s.fresh_type_counter = 1
    s.endorsed = [U1, U2]
    return s


def test_factor_second_pass_segmentation():
    s = x2_state()
    al = align(s.lexicon.entries[0], s.lexicon.entries[1])
    factor(s, al)
    assert_isomorphic(s.lexicon, X21_TABLE)


def test_factor_nothing_shared_is_rejected():
    s = x2_state()
    al = align(s.lexicon.entries[0], s.lexicon.entries[2])
    assert al is None or al.residue_exponents[0] == []
    with pytest.raises(FactoringRegression):
        factor(s, align(s.lexicon.entries[0], s.lexicon.entries[0]) or
               _dummy_alignment(s))


def _dummy_alignment(s):
    from mgumt.learner import Alignment
    return Alignment("pair", [], ([], []), None, None,
                     source=s.lexicon.entries[0], target=s.lexicon.entries[0])


# --- express ----------------------------------------------------------------------

def test_express_from_learned_lexicons():
    s = teach(LearnerState(), U1, U2)
    assert express(s, p("eat(cheese)(rat)")).utterance == "the rat eats cheese"
    s = teach(s, U3)
    assert express(s, p("eat(carrot)(rat)")).utterance == "the rat eats carrot"
    s = teach(s, U4)
    assert express(s, p("eat(carrot)(rats)")).utterance == "the rats eats carrot"


def test_express_unrealizable_propagates():
    s = teach(LearnerState(), U1)
    with pytest.raises(Unrealizable):
        express(s, p("sleep(mouse)"))


# --- repair -----------------------------------------------------------------------

def full_session_state():
    s = teach(LearnerState(), U1, U2, U3, U4)
    repair(s, PUNISHED)
    return s


def test_repair_extracts_number_morphology():
    s = full_session_state()
    assert_isomorphic(s.lexicon, X41_TABLE)


def test_repair_blocks_punished_meaning():
    s = full_session_state()
    with pytest.raises(Unrealizable):
        express(s, p("eat(carrot)(rats)"))


def test_repair_keeps_endorsed_coverage():
    s = full_session_state()
    assert s.covers_endorsed()


def test_overgeneralization_until_suppletion():
    s = full_session_state()
    strings = {t.sign.exponent
               for t in complete_derivations(s.lexicon, 200).complete}
    assert "the mouses eats cheese" in strings
    assert "the rats eat cheese" in strings
    ingest(s, U5)
    strings = {t.sign.exponent
               for t in complete_derivations(s.lexicon, 200).complete}
    assert "the mouses eats cheese" not in strings
    assert "the mice eat cheese" in strings
    assert "the mouse eats cheese" in strings
    assert "the rats eat cheese" in strings


def test_repair_without_applicable_operator():
    s = teach(LearnerState(), U1)
    with pytest.raises(NoRepairFound):
        repair(s, ("the mouse eats cheese", p("sleep(mouse)")))
    assert_isomorphic(s.lexicon, X1_TABLE)
    assert s.punished


# --- invariants --------------------------------------------------------------------

def test_monotone_coverage_over_session_orders():
    corpus = [U1, U2, U3, U4]
    rng = random.Random(7)
    orders = set()
    while len(orders) < 8:
        orders.add(tuple(rng.sample(range(4), 4)))
    for order in sorted(orders):
        s = LearnerState()
        for i in order:
            ingest(s, corpus[i])
            assert s.covers_endorsed(), f"coverage broken at order {order}"


def test_factoring_conserves_exponents_and_meanings():
    s = teach(LearnerState(), U1, U2, U3, U4)
    for u in (U1, U2, U3, U4):
        hits = [t for t in complete_derivations(s.lexicon, 200).complete
                if t.sign.exponent == u.exponent]
        assert hits
        assert any(alpha_equivalent(t.sign.semantics, u.meaning) for t in hits)


def test_session_determinism():
    a = teach(LearnerState(), U1, U2, U3, U4)
    b = teach(LearnerState(), U1, U2, U3, U4)
    assert save_lexicon(a.lexicon) == save_lexicon(b.lexicon)
    repair(a, PUNISHED)
    repair(b, PUNISHED)
    assert save_lexicon(a.lexicon) == save_lexicon(b.lexicon)


def test_checkpoint_round_trip():
    from mgumt.learner import load_checkpoint, save_checkpoint
    s = teach(LearnerState(), U1, U2)
    text = save_checkpoint(s)
    assert text.startswith("# t=2 ")
    back = load_checkpoint(text)
    assert back.time == s.time
    assert back.fresh_type_counter == s.fresh_type_counter
    assert save_lexicon(back.lexicon) == save_lexicon(s.lexicon)


def test_single_factoring_step_yields_intermediate_stage():
    # One factor application on the whole-sentence entry gives the
    # three-entry stage; the second-pass sweep then reaches the revised one.
    s = LearnerState()
    s.lexicon = load_lexicon(X1_TABLE)
    s.endorsed = [U1]
    al = align(U2, s.lexicon.entries[0])
    al.kind = "pair"
    factor(s, al)
    assert_isomorphic(s.lexicon, (
        "the mouse\t:\td\tmouse\n"
        "the rat\t:\td\trat\n"
        "eats cheese\t:\t=d c\t\\y.eat(cheese)(y)\n"))
