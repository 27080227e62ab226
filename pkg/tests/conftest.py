"""Session fixtures: the synthetic fixture world, mined tables, and a model."""

import pytest

import make_fixtures
from kgquiz import (
    FeatureTables,
    LinkGraph,
    TypeLexicon,
    VerbalizationBundle,
    build_salience,
    load_corpus,
    load_kg,
    load_topic,
    mine_predicate_phrases,
    mine_surface_forms,
    mine_type_salience,
)
from kgquiz.model import build_dataset, load_training_data, train


@pytest.fixture(scope="session")
def fixture_paths(tmp_path_factory):
    return make_fixtures.write_all(tmp_path_factory.mktemp("world"))


@pytest.fixture(scope="session")
def kg(fixture_paths):
    return load_kg(fixture_paths["kg"])


@pytest.fixture(scope="session")
def corpus_sentences(fixture_paths):
    return load_corpus(fixture_paths["corpus"])


@pytest.fixture(scope="session")
def corpus_lines(fixture_paths):
    with open(fixture_paths["corpus"], encoding="utf-8") as fh:
        return [line.rstrip("\n") for line in fh if line.strip()]


@pytest.fixture(scope="session")
def type_lexicon(fixture_paths, kg):
    return TypeLexicon.from_tsv(fixture_paths["type_lexicon"], kg)


@pytest.fixture(scope="session")
def links(fixture_paths):
    return LinkGraph.load(fixture_paths["links"])


@pytest.fixture(scope="session")
def tables(kg, links):
    return FeatureTables(salience=build_salience(links), links=links, kg=kg)


@pytest.fixture(scope="session")
def type_salience(corpus_sentences, kg, type_lexicon):
    return mine_type_salience(corpus_sentences, kg, type_lexicon)


@pytest.fixture(scope="session")
def bundle(corpus_sentences, kg, type_lexicon):
    return VerbalizationBundle(
        entity_lex=mine_surface_forms(corpus_sentences),
        pred_lex=mine_predicate_phrases(corpus_sentences, kg),
        type_lex=type_lexicon,
    )


@pytest.fixture(scope="session")
def topic(fixture_paths, kg):
    return load_topic(fixture_paths["topic"], kg)


@pytest.fixture(scope="session")
def training_instances(fixture_paths, kg):
    return load_training_data(fixture_paths["train"], kg)


@pytest.fixture(scope="session")
def training_data(training_instances, tables):
    return build_dataset(training_instances, tables)


@pytest.fixture(scope="session")
def model(training_data):
    return train(training_data)
