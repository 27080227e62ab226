"""Corpus parsing, Hearst-pattern salience, paraphrase mining, npmi."""

import math
from random import Random

import pytest

import oracles
from kgquiz import KnowledgeGraph
from kgquiz.corpus import (
    EntityLexicon,
    Mention,
    PredicateLexicon,
    TypeLexicon,
    TypeSalienceTable,
    disambiguate_type,
    lemmatize_type_word,
    mine_predicate_phrases,
    mine_surface_forms,
    mine_type_salience,
    npmi,
    parse_corpus_line,
)
from kgquiz.errors import EmptyEntityId, EmptySurface, UnbalancedBracket, UnknownType


# --- parsing -------------------------------------------------------------------

def test_parse_annotated_sentence():
    tokens = parse_corpus_line(
        "[Obama|BarackObama] endorsed [Clinton|HillaryClinton] earlier today")
    assert tokens == [
        Mention("Obama", "BarackObama"),
        "endorsed",
        Mention("Clinton", "HillaryClinton"),
        "earlier",
        "today",
    ]
    assert sum(isinstance(t, Mention) for t in tokens) == 2


def test_parse_tokenized_punctuation_is_a_token():
    tokens = parse_corpus_line("[Obama|B] endorsed [Clinton|H] earlier today .")
    assert len(tokens) == 6
    assert tokens[-1] == "."


def test_parse_plain_line():
    tokens = parse_corpus_line("no annotations at all")
    assert tokens == ["no", "annotations", "at", "all"]
    assert all(isinstance(t, str) for t in tokens)


def test_parse_multiword_surface():
    tokens = parse_corpus_line("[Barack Obama|BarackObama] spoke")
    assert tokens[0] == Mention("Barack Obama", "BarackObama")


def test_parse_empty_entity_id():
    with pytest.raises(EmptyEntityId):
        parse_corpus_line("[x|]")
    with pytest.raises(EmptyEntityId):
        parse_corpus_line("[no separator]")


def test_parse_empty_surface():
    with pytest.raises(EmptySurface):
        parse_corpus_line("[|X]")


def test_parse_unbalanced_brackets():
    with pytest.raises(UnbalancedBracket) as err:
        parse_corpus_line("text [never closed")
    assert err.value.position == 5
    with pytest.raises(UnbalancedBracket):
        parse_corpus_line("stray ] bracket")
    with pytest.raises(UnbalancedBracket):
        parse_corpus_line("[nested [x|y]|z]")


# --- type salience ---------------------------------------------------------------

@pytest.fixture()
def small_kg():
    return KnowledgeGraph([
        ("president", "subClassOf", "politician"),
        ("politician", "subClassOf", "person"),
        ("lawyer", "subClassOf", "person"),
        ("BarackObama", "type", "president"),
        ("BarackObama", "type", "lawyer"),
    ])


@pytest.fixture()
def small_lexicon():
    return TypeLexicon([
        ("president", "president"),
        ("lawyer", "lawyer"),
        ("attorney", "lawyer"),
        ("leader", "person"),
        ("leader", "president"),
    ])


def test_hearst_pattern_entity_first(small_kg, small_lexicon):
    sentences = [parse_corpus_line(
        "[Obama|BarackObama] and other presidents attended .")]
    table = mine_type_salience(sentences, small_kg, small_lexicon)
    assert table.salience("BarackObama") == {"president": 1.0}


def test_hearst_pattern_type_first(small_kg, small_lexicon):
    sentences = [parse_corpus_line(
        "several attorneys including [Obama|BarackObama] spoke")]
    table = mine_type_salience(sentences, small_kg, small_lexicon)
    assert table.salience("BarackObama") == {"lawyer": 1.0}


def test_salience_relative_frequency(small_kg, small_lexicon):
    sentences = [
        parse_corpus_line("[Obama|BarackObama] is a president ."),
        parse_corpus_line("[Obama|BarackObama] , a president , spoke ."),
        parse_corpus_line("presidents like [Obama|BarackObama] vote ."),
        parse_corpus_line("[Obama|BarackObama] is a lawyer ."),
    ]
    table = mine_type_salience(sentences, small_kg, small_lexicon)
    assert table.salience("BarackObama") == {"president": 0.75, "lawyer": 0.25}


def test_unmatched_sentences_skipped(small_kg, small_lexicon):
    sentences = [
        parse_corpus_line("[Obama|BarackObama] attended the ceremony ."),
        parse_corpus_line("presidents attended too ."),
    ]
    table = mine_type_salience(sentences, small_kg, small_lexicon)
    assert table.salience("BarackObama") == {}


def test_type_word_must_be_single_word_not_mention(small_kg, small_lexicon):
    sentences = [parse_corpus_line(
        "[Obama|BarackObama] and other [presidents|Group] gathered")]
    table = mine_type_salience(sentences, small_kg, small_lexicon)
    assert table.salience("BarackObama") == {}


def test_salience_matches_regex_oracle(corpus_lines, corpus_sentences, kg, type_lexicon):
    mined = mine_type_salience(corpus_sentences, kg, type_lexicon)
    expected = oracles.regex_type_salience(
        corpus_lines, type_lexicon.candidates, kg.direct_types, kg.supertypes)
    assert set(mined.entities()) == set(expected)
    for e in expected:
        got = mined.salience(e)
        assert set(got) == set(expected[e])
        for t in got:
            assert got[t] == pytest.approx(expected[e][t], abs=1e-12)


def test_salience_rows_sum_to_one(type_salience):
    for e in type_salience.entities():
        assert sum(type_salience.salience(e).values()) == pytest.approx(1.0, abs=1e-9)


# --- lemmatization and disambiguation --------------------------------------------

def test_lemmatization_order(small_lexicon):
    assert lemmatize_type_word("presidents", small_lexicon) == "president"
    assert lemmatize_type_word("Attorneys", small_lexicon) == "attorney"
    assert lemmatize_type_word("president", small_lexicon) == "president"
    assert lemmatize_type_word("nonsense", small_lexicon) is None


def test_disambiguate_requires_membership(small_kg, small_lexicon):
    assert disambiguate_type("attorney", "BarackObama", small_lexicon, small_kg) == "lawyer"
    assert disambiguate_type("nolemma", "BarackObama", small_lexicon, small_kg) is None
    assert disambiguate_type("president", "UnknownGuy", small_lexicon, small_kg) is None


def test_disambiguate_prefers_deepest(small_kg, small_lexicon):
    # 'leader' maps to both person (depth 0) and president (depth 2)
    got = disambiguate_type("leader", "BarackObama", small_lexicon, small_kg)
    assert got == "president"
    depth = {t: oracles.longest_path_to_root(small_kg.supertypes, t)
             for t in ("person", "president")}
    assert depth["president"] > depth["person"]


# --- npmi ------------------------------------------------------------------------

def test_npmi_perfect_cooccurrence():
    assert npmi(5, 5, 5, 10) == pytest.approx(1.0)


def test_npmi_independence():
    assert npmi(1, 4, 5, 20) == pytest.approx(0.0, abs=1e-12)


def test_npmi_hand_value():
    expected = math.log(2) / math.log(12)
    assert npmi(1, 2, 3, 12) == pytest.approx(expected, rel=1e-12)
    assert npmi(1, 2, 3, 12) == pytest.approx(0.2789, abs=5e-5)


def test_npmi_degenerate_joint_equals_total():
    assert npmi(4, 4, 4, 4) == 1.0


def test_npmi_rejects_inconsistent_counts():
    with pytest.raises(ValueError):
        npmi(0, 2, 3, 10)
    with pytest.raises(ValueError):
        npmi(5, 2, 3, 10)
    with pytest.raises(ValueError):
        npmi(1, 11, 3, 10)


def test_npmi_symmetry_and_range():
    rng = Random(5)
    for _ in range(300):
        total = rng.randint(2, 400)
        joint = rng.randint(1, total)
        cx = rng.randint(joint, total)
        cy = rng.randint(joint, total)
        v = npmi(joint, cx, cy, total)
        assert v == npmi(joint, cy, cx, total)
        assert -1.0 - 1e-12 <= v <= 1.0 + 1e-12


# --- predicate paraphrases ---------------------------------------------------------

@pytest.fixture()
def born_kg():
    return KnowledgeGraph([
        ("BarackObama", "type", "president"),
        ("Hawaii", "type", "state"),
        ("BarackObama", "bornIn", "Hawaii"),
    ])


def test_subject_first_phrase(born_kg):
    sentences = [parse_corpus_line("[Obama|BarackObama] was born in [Hawaii|Hawaii]")]
    lex = mine_predicate_phrases(sentences, born_kg)
    assert [p for p, _ in lex.phrases("bornIn", "SubjectFirst")] == ["was born in"]
    assert lex.phrases("bornIn", "ObjectFirst") == []


def test_object_first_phrase(born_kg):
    sentences = [parse_corpus_line("[Hawaii|Hawaii] is the birthplace of [Obama|BarackObama]")]
    lex = mine_predicate_phrases(sentences, born_kg)
    assert [p for p, _ in lex.phrases("bornIn", "ObjectFirst")] == ["is the birthplace of"]


def test_third_mention_blocks_window(born_kg):
    sentences = [parse_corpus_line(
        "[Obama|BarackObama] met [Biden|JoeBiden] in [Hawaii|Hawaii]")]
    lex = mine_predicate_phrases(sentences, born_kg)
    assert lex.phrases("bornIn", "SubjectFirst") == []


def test_gap_limit(born_kg):
    long_sentence = "[Obama|BarackObama] " + "w " * 7 + "[Hawaii|Hawaii]"
    lex = mine_predicate_phrases([parse_corpus_line(long_sentence)], born_kg, max_gap=6)
    assert lex.phrases("bornIn", "SubjectFirst") == []
    lex = mine_predicate_phrases([parse_corpus_line(long_sentence)], born_kg, max_gap=7)
    assert len(lex.phrases("bornIn", "SubjectFirst")) == 1


def test_adjacent_mentions_have_no_phrase(born_kg):
    sentences = [parse_corpus_line("[Obama|BarackObama] [Hawaii|Hawaii]")]
    lex = mine_predicate_phrases(sentences, born_kg)
    assert lex.table == {}


def test_overlong_phrase_dropped(born_kg):
    words = "verylongword " * 5  # > 50 characters once joined
    sentence = f"[Obama|BarackObama] {words}[Hawaii|Hawaii]"
    lex = mine_predicate_phrases([parse_corpus_line(sentence)], born_kg, max_gap=10)
    assert lex.phrases("bornIn", "SubjectFirst") == []


def test_predicate_lexicon_matches_window_oracle(corpus_lines, corpus_sentences, kg):
    mined = mine_predicate_phrases(corpus_sentences, kg)
    events = oracles.window_scan_predicate_events(corpus_lines, kg.instance_facts)
    expected = oracles.score_predicate_events(events)
    assert set(mined.table) == set(expected)
    for key in expected:
        got = mined.table[key]
        assert [p for p, _ in got] == [p for p, _ in expected[key]]
        for (_, a), (_, b) in zip(got, expected[key]):
            assert a == pytest.approx(b, rel=1e-12)


def test_predicate_lexicon_invariants(bundle):
    for (pred, orient), entries in bundle.pred_lex.table.items():
        assert orient in ("SubjectFirst", "ObjectFirst")
        assert len(entries) <= 5
        scores = [s for _, s in entries]
        assert scores == sorted(scores, reverse=True)
        for phrase, score in entries:
            assert score > 0
            assert len(phrase) <= 50
            assert "[" not in phrase and "]" not in phrase


# --- surface forms -----------------------------------------------------------------

def test_surface_counting():
    sentences = [parse_corpus_line("[Obama|B] met [Obama|B]")] * 5
    sentences += [parse_corpus_line("[Barack Obama|B] spoke")] * 5
    lex = mine_surface_forms(sentences)
    assert lex.surfaces("B") == [("Obama", 10), ("Barack Obama", 5)]
    assert lex.best_surface("B") == "Obama"


def test_surface_truncation_to_five():
    sentences = []
    for i in range(7):
        sentences += [parse_corpus_line(f"[form{i}|E] here")] * (i + 1)
    lex = mine_surface_forms(sentences)
    forms = lex.surfaces("E")
    assert len(forms) == 5
    assert forms[0] == ("form6", 7)


def test_surface_forms_match_grep_oracle(corpus_lines, corpus_sentences):
    mined = mine_surface_forms(corpus_sentences)
    expected = oracles.grep_surface_counts(corpus_lines)
    assert mined.table == expected


# --- determinism and file round-trips ------------------------------------------------

def test_mining_is_deterministic(corpus_sentences, kg, type_lexicon, tmp_path):
    paths = []
    for run in (1, 2):
        d = tmp_path / str(run)
        d.mkdir()
        mine_type_salience(corpus_sentences, kg, type_lexicon).to_tsv(d / "ts.tsv")
        mine_predicate_phrases(corpus_sentences, kg).to_tsv(d / "pl.tsv")
        mine_surface_forms(corpus_sentences).to_tsv(d / "sf.tsv")
        paths.append(d)
    for name in ("ts.tsv", "pl.tsv", "sf.tsv"):
        assert (paths[0] / name).read_bytes() == (paths[1] / name).read_bytes()


def test_lexicon_tsv_roundtrips(bundle, type_salience, tmp_path):
    type_salience.to_tsv(tmp_path / "ts.tsv")
    loaded = TypeSalienceTable.from_tsv(tmp_path / "ts.tsv")
    assert {e: loaded.salience(e) for e in loaded.entities()} == \
        {e: type_salience.salience(e) for e in type_salience.entities()}

    bundle.pred_lex.to_tsv(tmp_path / "pl.tsv")
    assert PredicateLexicon.from_tsv(tmp_path / "pl.tsv").table == bundle.pred_lex.table

    bundle.entity_lex.to_tsv(tmp_path / "sf.tsv")
    assert EntityLexicon.from_tsv(tmp_path / "sf.tsv").table == bundle.entity_lex.table


def test_type_lexicon_validates_types(tmp_path, kg):
    path = tmp_path / "lex.tsv"
    path.write_text("president\tpresident\nghost\tnosuchtype\n")
    with pytest.raises(UnknownType):
        TypeLexicon.from_tsv(path, kg)
    assert TypeLexicon.from_tsv(path).candidates["ghost"] == {"nosuchtype"}
