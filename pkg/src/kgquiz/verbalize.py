"""Template rendering of a query into a Jeopardy!-style declarative question.

The template is ``This <type phrases> <instance phrases>.`` where type
verbalizations join with `` and `` and instance verbalizations join with
commas plus a final `` and ``.  Type lemmas are drawn uniformly at random
for variety; entity surfaces use the most frequent form; predicate phrases
are drawn from the mined lexicon, preferring the subject-first orientation.
"""

from dataclasses import dataclass
from random import Random

from .corpus import OBJECT_FIRST, SUBJECT_FIRST, EntityLexicon, PredicateLexicon, TypeLexicon
from .errors import MissingLexiconEntry
from .kg import Query, TriplePattern, is_var


@dataclass(frozen=True)
class VerbalizationBundle:
    """The three lexicons needed to render a query."""

    entity_lex: EntityLexicon
    pred_lex: PredicateLexicon
    type_lex: TypeLexicon


def entity_surface(e: str, entity_lex: EntityLexicon) -> str:
    """Most frequent surface form, falling back to the id without underscores."""
    best = entity_lex.best_surface(e)
    return best if best is not None else e.replace("_", " ")


def _pick_phrase(phrases, rng: Random) -> str:
    return phrases[rng.randrange(len(phrases))][0]


def verbalize_triple(pattern: TriplePattern, bundle: VerbalizationBundle, rng: Random) -> str:
    """Render one pattern; the variable position is elided.

    TYPE gives a random lemma for the type (id fallback).  PO renders
    ``<phrase> <object surface>``; SP renders ``<subject surface> <phrase>``.
    When a predicate only has object-first phrases the order flips:
    ``<object surface> <phrase>`` for PO, ``<phrase> <subject surface>`` for
    SP.  A predicate with no phrase at all raises MissingLexiconEntry; raw
    predicate ids are never emitted.
    """
    kind = pattern.kind
    if kind == "TYPE":
        type_id = pattern.object if is_var(pattern.subject) else pattern.subject
        lemmas = bundle.type_lex.lemmas(type_id)
        if lemmas:
            return lemmas[rng.randrange(len(lemmas))]
        return type_id.replace("_", " ")

    subject_first = bundle.pred_lex.phrases(pattern.predicate, SUBJECT_FIRST)
    object_first = bundle.pred_lex.phrases(pattern.predicate, OBJECT_FIRST)
    ground = entity_surface(pattern.ground_term, bundle.entity_lex)
    if kind == "PO":
        if subject_first:
            return f"{_pick_phrase(subject_first, rng)} {ground}"
        if object_first:
            return f"{ground} {_pick_phrase(object_first, rng)}"
    else:  # SP
        if subject_first:
            return f"{ground} {_pick_phrase(subject_first, rng)}"
        if object_first:
            return f"{_pick_phrase(object_first, rng)} {ground}"
    raise MissingLexiconEntry(pattern.predicate)


def verbalize_query(query: Query, bundle: VerbalizationBundle, rng: Random) -> str:
    """Render a whole query through the declarative template.

    The query must contain at least one TYPE pattern.  The result starts
    with a capitalized "This", never contains brackets, raw ids, or the
    variable, and carries exactly one terminal period.
    """
    type_patterns = query.type_patterns
    if not type_patterns:
        raise ValueError("query has no TYPE pattern to verbalize")
    instance_patterns = query.instance_patterns

    type_parts = [verbalize_triple(p, bundle, rng) for p in type_patterns]
    instance_parts = [verbalize_triple(p, bundle, rng) for p in instance_patterns]

    sentence = "This " + " and ".join(type_parts)
    if instance_parts:
        if len(instance_parts) == 1:
            tail = instance_parts[0]
        else:
            tail = ", ".join(instance_parts[:-1]) + " and " + instance_parts[-1]
        sentence = f"{sentence} {tail}"
    sentence = sentence[0].upper() + sentence[1:]
    return sentence.rstrip(" .") + "."
