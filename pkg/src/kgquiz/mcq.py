"""Multiple-choice extension: distractors from relaxed queries.

A relaxation widens the unique-answer query by replacing the type pattern
with the answer's coarse type (mandatory; kept as-is when the coarse type
is ``other``) and removing a subset of instance patterns.  Relaxations that
add more than ``alpha`` extra answers are discarded.  Distractor candidates
are pooled from all admissible relaxations and ranked by confusability:
one minus the gap between the model's easy-probability for the true answer
and for the candidate standing in as the answer.
"""

from dataclasses import dataclass
from itertools import combinations
from random import Random

from .errors import (
    EmptyDistractorSet,
    InsufficientCandidates,
    NoAdmissibleRelaxation,
    NoCandidates,
)
from .features import FeatureTables, QuestionInstance, extract_features
from .generate import GeneratedQuestion
from .kg import OTHER, TYPE_PRED, VAR, KnowledgeGraph, Query, TriplePattern
from .model import HARD, DifficultyModel

DEFAULT_ALPHA = 10


@dataclass(frozen=True)
class RelaxedQuery:
    query: Query
    removed_patterns: tuple[TriplePattern, ...]
    type_relaxed_to: str | None
    distance: int


@dataclass
class MCQ:
    question: GeneratedQuestion
    distractors: list[tuple[str, float]]
    set_confusability: float
    overall_difficulty: str
    choices: list[str]
    answer_index: int


def relax(query: Query, kg: KnowledgeGraph, answer_type: str,
          alpha: int = DEFAULT_ALPHA) -> list[RelaxedQuery]:
    """Enumerate admissible relaxations (1 <= extra answers <= alpha).

    The distance of each relaxation is measured by evaluation.  When the
    answer type has no coarse ancestor the type pattern stays unrelaxed and
    relaxation comes from dropping instance patterns alone; in that case at
    least the type pattern always remains, so type compatibility holds
    either way.
    """
    coarse = kg.coarse_type_of_type(answer_type)
    if coarse == OTHER:
        relaxed_to = None
        type_patterns = query.type_patterns
    else:
        relaxed_to = kg.coarse_roots[coarse]
        type_patterns = (TriplePattern(VAR, TYPE_PRED, relaxed_to),)

    instance_patterns = query.instance_patterns
    out = []
    for r in range(len(instance_patterns) + 1):
        for removed in combinations(instance_patterns, r):
            if relaxed_to is not None and r == len(instance_patterns) and r > 0:
                continue  # coarse type alone is no longer anchored to the query
            kept = tuple(p for p in instance_patterns if p not in removed)
            relaxed = Query(type_patterns + kept)
            distance = len(kg.evaluate(relaxed)) - 1
            if 1 <= distance <= alpha:
                out.append(RelaxedQuery(relaxed, removed, relaxed_to, distance))
    if not out:
        raise NoAdmissibleRelaxation(
            f"no relaxation within distance {alpha} for answer type {answer_type!r}"
        )
    return out


def candidate_distractors(query: Query, kg: KnowledgeGraph, answer: str,
                          answer_type: str, alpha: int = DEFAULT_ALPHA) -> set[str]:
    """Pool the answers of all admissible relaxations, minus the true answer."""
    try:
        relaxations = relax(query, kg, answer_type, alpha)
    except NoAdmissibleRelaxation as exc:
        raise NoCandidates(str(exc)) from exc
    pool: set[str] = set()
    for rq in relaxations:
        pool |= kg.evaluate(rq.query)
    pool.discard(answer)
    if not pool:
        raise NoCandidates("relaxations produced no distractor candidates")
    return pool


def confusability(model: DifficultyModel, question_entities, e_answer: str,
                  e_distractor: str, tables: FeatureTables) -> float:
    """1 - |P(easy | answer) - P(easy | distractor-as-answer)|, in [0, 1]."""
    groups = model.feature_groups or ("SAL", "COH", "TYPE")

    def p_easy(entity: str) -> float:
        inst = QuestionInstance(tuple(question_entities), entity)
        fv = extract_features(inst, tables.salience, tables.links, tables.kg, groups)
        return model.predict_p_easy(fv)

    if e_answer == e_distractor:
        return 1.0
    return 1.0 - abs(p_easy(e_answer) - p_easy(e_distractor))


def set_confusability(members) -> float:
    """A distractor set is as confusing as its most confusing member."""
    members = list(members)
    if not members:
        raise EmptyDistractorSet("no distractor confusabilities given")
    return max(members)


def mcq_difficulty(question_difficulty: str, set_conf: float) -> str:
    """Combine question difficulty with set confusability.

    A hard question stays hard; an easy one turns hard when the set
    confusability exceeds 0.5.  Exactly 0.5 counts as the low side.
    """
    if not 0.0 <= set_conf <= 1.0:
        raise ValueError(f"set confusability out of range: {set_conf}")
    if question_difficulty == HARD or set_conf > 0.5:
        return HARD
    return question_difficulty


def build_mcq(question: GeneratedQuestion, kg: KnowledgeGraph, model: DifficultyModel,
              tables: FeatureTables, k: int = 3, target: str = HARD,
              alpha: int = DEFAULT_ALPHA, rng: Random | None = None) -> MCQ:
    """Pick k-1 distractors by extreme confusability and assemble the MCQ.

    ``target=hard`` takes the most confusable candidates, ``target=easy``
    the least; ties break lexicographically by entity id.  Candidates that
    already appear among the question's entities are excluded (the reader
    can see them in the question).  Choices are shuffled under ``rng``.
    """
    if k < 2:
        raise ValueError("k must be at least 2 (answer plus one distractor)")
    rng = rng or Random(0)
    pool = candidate_distractors(question.query, kg, question.answer,
                                 question.answer_type, alpha)
    question_entities = question.query.question_entities()
    pool -= set(question_entities)
    if not pool:
        raise NoCandidates("all distractor candidates appear in the question")

    scored = [
        (e, confusability(model, question_entities, question.answer, e, tables))
        for e in sorted(pool)
    ]
    needed = k - 1
    if len(scored) < needed:
        raise InsufficientCandidates(len(scored), needed)
    if target == HARD:
        scored.sort(key=lambda item: (-item[1], item[0]))
    else:
        scored.sort(key=lambda item: (item[1], item[0]))
    chosen = scored[:needed]

    set_conf = set_confusability(c for _, c in chosen)
    choices = [question.answer] + [e for e, _ in chosen]
    rng.shuffle(choices)
    return MCQ(
        question=question,
        distractors=chosen,
        set_confusability=set_conf,
        overall_difficulty=mcq_difficulty(question.difficulty, set_conf),
        choices=choices,
        answer_index=choices.index(question.answer),
    )


def mcq_record(mcq: MCQ, seed: int) -> dict:
    """JSON-serializable record: the question record plus the choice block."""
    from .generate import question_record

    record = question_record(mcq.question, seed)
    record.update({
        "choices": mcq.choices,
        "answer_index": mcq.answer_index,
        "distractors": [{"entity": e, "confusability": c} for e, c in mcq.distractors],
        "set_confusability": mcq.set_confusability,
        "overall_difficulty": mcq.overall_difficulty,
    })
    return record
