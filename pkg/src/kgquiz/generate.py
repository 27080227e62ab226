"""Question generation: build a query with a guaranteed unique answer.

For a topic entity e the generator picks an answer type by salience, then
adds instance patterns derived from e's facts (with e replaced by the
variable) one at a time in seeded random order until the query's answer set
is exactly {e}.  Facts whose other entity shares a surface word with the
answer are never used, so the question cannot leak its answer; every
emitted query has one type pattern and 1..max_instance_patterns instance
patterns.
"""

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from random import Random

from .corpus import EntityLexicon, TypeSalienceTable
from .errors import EmptyTopic, NoSalientType, QueryGenerationFailed
from .features import FeatureTables, QuestionInstance, extract_features
from .kg import TYPE_PRED, VAR, KnowledgeGraph, Query, Topic, TriplePattern
from .model import EASY, HARD, DifficultyModel
from .verbalize import VerbalizationBundle, verbalize_query


@dataclass(frozen=True)
class GenConfig:
    max_instance_patterns: int = 4
    entity_retries: int = 20
    subset_attempts: int = 50
    seed: int = 42
    stopword_path: str | None = None

    def __post_init__(self):
        for name in ("max_instance_patterns", "entity_retries", "subset_attempts"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class GeneratedQuestion:
    query: Query
    answer: str
    answer_type: str
    p_easy: float
    difficulty: str
    verbalization: str


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Load the stopword list; defaults to the packaged ~50-word file."""
    if path is None:
        text = resources.files("kgquiz").joinpath("data/stopwords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return frozenset(w.strip().lower() for w in text.split() if w.strip())


def select_answer_type(e: str, salience: TypeSalienceTable, kg: KnowledgeGraph,
                       rng: Random) -> str:
    """Sample a type for the answer proportionally to its corpus salience.

    Entities absent from the salience table fall back to a uniform draw over
    their direct KG types; with neither, NoSalientType is raised.
    """
    row = salience.salience(e)
    if row:
        types = sorted(row)
        return rng.choices(types, weights=[row[t] for t in types])[0]
    direct = sorted(kg.direct_types.get(e, ()))
    if direct:
        return direct[rng.randrange(len(direct))]
    raise NoSalientType(e)


def surface_words(e: str, lex: EntityLexicon, stopwords: frozenset[str]) -> set[str]:
    """Lowercased, stopword-free word set over all of an entity's surfaces.

    Entities without mined surface forms use their id with underscores as
    word separators.
    """
    forms = [s for s, _ in lex.surfaces(e)]
    if not forms:
        forms = [e.replace("_", " ")]
    words = set()
    for form in forms:
        words.update(w.lower() for w in form.split())
    return words - stopwords


def surface_overlap(e1: str, e2: str, lex: EntityLexicon, stopwords: frozenset[str]) -> bool:
    """True iff the two entities share any non-stopword surface word."""
    return bool(surface_words(e1, lex, stopwords) & surface_words(e2, lex, stopwords))


def is_redundant_type(new_type: str, selected, kg: KnowledgeGraph) -> bool:
    """True iff the new type is a supertype of (or equal to) a selected one."""
    return any(kg.is_subtype(t, new_type) for t in selected)


def _candidate_facts(kg: KnowledgeGraph, e: str, bundle: VerbalizationBundle,
                     stopwords: frozenset[str]) -> list[tuple[str, str, str]]:
    """Facts of e usable as instance patterns, in canonical sorted order.

    The other item must be an entity (literals are not verbalizable), must
    not overlap the answer's surface forms, and its predicate must have at
    least one mined phrase so the final verbalization cannot fail.
    """
    from .corpus import OBJECT_FIRST, SUBJECT_FIRST

    def verbalizable(p: str) -> bool:
        return bool(bundle.pred_lex.phrases(p, SUBJECT_FIRST)
                    or bundle.pred_lex.phrases(p, OBJECT_FIRST))

    out = []
    for fact in kg.by_subject.get(e, set()) | kg.by_object.get(e, set()):
        s, p, o = fact
        other = o if s == e else s
        if other == e or other not in kg.entities:
            continue
        if not verbalizable(p):
            continue
        if surface_overlap(other, e, bundle.entity_lex, stopwords):
            continue
        out.append(fact)
    return sorted(out)


def _attempt(kg: KnowledgeGraph, e: str, type_candidates: frozenset[str],
             candidates: list, config: GenConfig, rng: Random):
    """One greedy pass: shuffle facts, add patterns until the answer is unique.

    Patterns that do not shrink the current answer set are skipped as
    redundant, except that a unique-by-type query still receives one
    instance pattern (a bare type is not a usable question).
    """
    order = list(candidates)
    rng.shuffle(order)
    answers = set(type_candidates)
    chosen: list[TriplePattern] = []
    for s, p, o in order:
        if len(chosen) >= config.max_instance_patterns:
            break
        if len(answers) == 1 and chosen:
            break
        pattern = TriplePattern(VAR if s == e else s, p, VAR if s != e else o)
        narrowed = answers & kg.pattern_candidates(pattern)
        if narrowed == answers and not (len(answers) == 1 and not chosen):
            continue
        chosen.append(pattern)
        answers = narrowed
    if len(answers) == 1 and chosen:
        return chosen
    return None


def generate_query(kg: KnowledgeGraph, topic: Topic, bundle: VerbalizationBundle,
                   type_salience: TypeSalienceTable, tables: FeatureTables,
                   model: DifficultyModel, config: GenConfig, rng: Random) -> GeneratedQuestion:
    """Generate one question with a unique answer drawn from the topic.

    Retries with fresh fact orders (``subset_attempts``) and fresh entities
    (``entity_retries``) before giving up with QueryGenerationFailed.
    """
    if not topic.members:
        raise EmptyTopic(topic.name)
    stopwords = load_stopwords(config.stopword_path)
    members = sorted(topic.members)

    for _ in range(config.entity_retries):
        e = members[rng.randrange(len(members))]
        try:
            answer_type = select_answer_type(e, type_salience, kg, rng)
        except NoSalientType:
            continue
        if answer_type not in kg.entity_types(e):
            # salience table disagrees with this KG; not usable as a cue
            continue
        candidates = _candidate_facts(kg, e, bundle, stopwords)
        if not candidates:
            continue
        type_candidates = kg.instances_of(answer_type)
        for _ in range(config.subset_attempts):
            chosen = _attempt(kg, e, type_candidates, candidates, config, rng)
            if chosen is None:
                continue
            query = Query((TriplePattern(VAR, TYPE_PRED, answer_type), *chosen))
            inst = QuestionInstance(query.question_entities(), e)
            fv = extract_features(inst, tables.salience, tables.links, kg,
                                  model.feature_groups or ("SAL", "COH", "TYPE"))
            p_easy = model.predict_p_easy(fv)
            return GeneratedQuestion(
                query=query,
                answer=e,
                answer_type=answer_type,
                p_easy=p_easy,
                difficulty=EASY if p_easy > 0.5 else HARD,
                verbalization=verbalize_query(query, bundle, rng),
            )
    raise QueryGenerationFailed(
        f"no unique-answer query found for topic {topic.name!r} "
        f"after {config.entity_retries} entity retries"
    )


def question_record(q: GeneratedQuestion, seed: int) -> dict:
    """JSON-serializable record for one generated question."""
    return {
        "query": [list(p.as_triple()) for p in q.query.patterns],
        "answer": q.answer,
        "answer_type": q.answer_type,
        "p_easy": q.p_easy,
        "difficulty": q.difficulty,
        "verbalization": q.verbalization,
        "seed": seed,
    }


def question_from_record(record: dict) -> GeneratedQuestion:
    return GeneratedQuestion(
        query=Query(tuple(TriplePattern(*triple) for triple in record["query"])),
        answer=record["answer"],
        answer_type=record["answer_type"],
        p_easy=record["p_easy"],
        difficulty=record["difficulty"],
        verbalization=record["verbalization"],
    )
