"""Mining over an entity-annotated corpus.

Three extractors feed the question pipeline:

* type salience per entity, from Hearst-style patterns
  (``X and other presidents``, ``cities such as Y``);
* predicate paraphrases by distant supervision over KG facts, scored with
  normalized pointwise mutual information;
* entity surface forms with mention counts.

Corpus format: UTF-8, one sentence per line, entity annotations written
inline as ``[surface|EntityId]``.
"""

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path

from ._io import atomic_write
from .errors import EmptyEntityId, EmptySurface, MalformedLine, UnbalancedBracket, UnknownType
from .kg import KnowledgeGraph

SUBJECT_FIRST = "SubjectFirst"
OBJECT_FIRST = "ObjectFirst"

MAX_PHRASE_CHARS = 50
MAX_LEXICON_ENTRIES = 5
DEFAULT_MAX_GAP = 6

# Trigger token sequences; matching is case-sensitive and token-based.
ENTITY_TYPE_TRIGGERS = (("is", "a"), ("is", "an"), (",", "a"), ("and", "other"), ("or", "other"))
TYPE_ENTITY_TRIGGERS = (("like",), ("such", "as"), ("including",), ("especially",))


@dataclass(frozen=True)
class Mention:
    """An entity mention token: the surface text and the entity it denotes."""

    surface: str
    entity: str


def parse_corpus_line(line: str) -> list:
    """Split one corpus line into Word (plain ``str``) and Mention tokens.

    Text outside brackets is split on whitespace; each balanced
    ``[surface|EntityId]`` span becomes a single :class:`Mention`.
    """
    tokens: list = []
    word: list[str] = []

    def flush():
        if word:
            tokens.append("".join(word))
            word.clear()

    i, n = 0, len(line)
    while i < n:
        c = line[i]
        if c == "[":
            flush()
            end = line.find("]", i + 1)
            body = line[i + 1:end] if end >= 0 else ""
            if end < 0 or "[" in body:
                raise UnbalancedBracket(i)
            sep = body.rfind("|")
            if sep < 0 or not body[sep + 1:]:
                raise EmptyEntityId(f"annotation {body!r} at column {i} has no entity id")
            if sep == 0:
                raise EmptySurface(f"annotation {body!r} at column {i} has no surface text")
            tokens.append(Mention(surface=body[:sep], entity=body[sep + 1:]))
            i = end + 1
        elif c == "]":
            raise UnbalancedBracket(i)
        elif c.isspace():
            flush()
            i += 1
        else:
            word.append(c)
            i += 1
    flush()
    return tokens


def load_corpus(path: str | Path) -> list[list]:
    """Parse every non-blank line of a corpus file into token lists."""
    sentences = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if line.strip():
                sentences.append(parse_corpus_line(line))
    return sentences


class TypeLexicon:
    """Maps lowercase lemmas to candidate type ids (and back)."""

    def __init__(self, entries):
        self.candidates: dict[str, set[str]] = defaultdict(set)
        self.lemmas_by_type: dict[str, set[str]] = defaultdict(set)
        for lemma, type_id in entries:
            self.candidates[lemma].add(type_id)
            self.lemmas_by_type[type_id].add(lemma)

    def lemmas(self, type_id: str) -> list[str]:
        return sorted(self.lemmas_by_type.get(type_id, ()))

    @classmethod
    def from_tsv(cls, path: str | Path, kg: KnowledgeGraph | None = None) -> "TypeLexicon":
        """Load ``lemma<TAB>TypeId`` rows; validates ids against ``kg`` if given."""
        entries = []
        with open(path, encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                cols = line.split("\t")
                if len(cols) != 2 or not all(cols):
                    raise MalformedLine(line_no, "expected lemma<TAB>TypeId")
                lemma, type_id = cols
                if kg is not None and type_id not in kg.types:
                    raise UnknownType(f"{type_id} (line {line_no})")
                entries.append((lemma.lower(), type_id))
        return cls(entries)

    def to_tsv(self, path: str | Path) -> None:
        rows = sorted((lemma, t) for lemma, ts in self.candidates.items() for t in ts)
        atomic_write(path, "".join(f"{lemma}\t{t}\n" for lemma, t in rows))


class TypeSalienceTable:
    """Per-entity relative frequencies of corpus-observed types.

    Rows are normalized: for any entity with at least one observation the
    salience values sum to 1.
    """

    def __init__(self, counts: dict[str, Counter] | None = None,
                 salience: dict[str, dict[str, float]] | None = None):
        self.counts = {e: Counter(c) for e, c in (counts or {}).items()}
        if salience is None:
            salience = {}
            for e, c in self.counts.items():
                total = sum(c.values())
                if total:
                    salience[e] = {t: n / total for t, n in c.items()}
        self._salience = salience

    def salience(self, e: str) -> dict[str, float]:
        return self._salience.get(e, {})

    def entities(self) -> list[str]:
        return sorted(self._salience)

    def to_tsv(self, path: str | Path) -> None:
        lines = []
        for e in sorted(self._salience):
            for t in sorted(self._salience[e]):
                lines.append(f"{e}\t{t}\t{self._salience[e][t]}\n")
        atomic_write(path, "".join(lines))

    @classmethod
    def from_tsv(cls, path: str | Path) -> "TypeSalienceTable":
        salience: dict[str, dict[str, float]] = defaultdict(dict)
        with open(path, encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n")
                if not line.strip():
                    continue
                cols = line.split("\t")
                if len(cols) != 3:
                    raise MalformedLine(line_no, "expected entity<TAB>type<TAB>salience")
                salience[cols[0]][cols[1]] = float(cols[2])
        return cls(salience=dict(salience))


class PredicateLexicon:
    """Top paraphrases per (predicate, orientation), sorted by npmi."""

    def __init__(self, table: dict[tuple[str, str], list[tuple[str, float]]]):
        self.table = table

    def phrases(self, predicate: str, orientation: str) -> list[tuple[str, float]]:
        return self.table.get((predicate, orientation), [])

    def to_tsv(self, path: str | Path) -> None:
        lines = []
        for (pred, orient) in sorted(self.table):
            for phrase, score in self.table[(pred, orient)]:
                lines.append(f"{pred}\t{orient}\t{phrase}\t{score}\n")
        atomic_write(path, "".join(lines))

    @classmethod
    def from_tsv(cls, path: str | Path) -> "PredicateLexicon":
        table: dict[tuple[str, str], list[tuple[str, float]]] = defaultdict(list)
        with open(path, encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n")
                if not line.strip():
                    continue
                cols = line.split("\t")
                if len(cols) != 4:
                    raise MalformedLine(line_no, "expected predicate<TAB>orientation<TAB>phrase<TAB>npmi")
                table[(cols[0], cols[1])].append((cols[2], float(cols[3])))
        return cls(dict(table))


class EntityLexicon:
    """Most frequent surface forms per entity (at most 5, count-sorted)."""

    def __init__(self, table: dict[str, list[tuple[str, int]]]):
        self.table = table

    def surfaces(self, e: str) -> list[tuple[str, int]]:
        return self.table.get(e, [])

    def best_surface(self, e: str) -> str | None:
        forms = self.table.get(e)
        return forms[0][0] if forms else None

    def to_tsv(self, path: str | Path) -> None:
        lines = []
        for e in sorted(self.table):
            for surface, count in self.table[e]:
                lines.append(f"{e}\t{surface}\t{count}\n")
        atomic_write(path, "".join(lines))

    @classmethod
    def from_tsv(cls, path: str | Path) -> "EntityLexicon":
        table: dict[str, list[tuple[str, int]]] = defaultdict(list)
        with open(path, encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n")
                if not line.strip():
                    continue
                cols = line.split("\t")
                if len(cols) != 3:
                    raise MalformedLine(line_no, "expected entity<TAB>surface<TAB>count")
                table[cols[0]].append((cols[1], int(cols[2])))
        return cls(dict(table))


def lemmatize_type_word(word: str, lexicon: TypeLexicon) -> str | None:
    """Lowercase and strip plural suffixes until the lexicon knows the lemma.

    Tries the word as-is, then with a trailing ``es`` removed, then with a
    trailing ``s`` removed; the first form present in the lexicon wins.
    """
    w = word.lower()
    forms = [w]
    if w.endswith("es"):
        forms.append(w[:-2])
    if w.endswith("s"):
        forms.append(w[:-1])
    for form in forms:
        if form in lexicon.candidates:
            return form
    return None


def disambiguate_type(t_text: str, e: str, lexicon: TypeLexicon, kg: KnowledgeGraph) -> str | None:
    """Resolve a textual type to a KG type the entity actually belongs to.

    Among lexicon candidates for ``t_text`` that appear in the entity's
    transitive type set, the deepest type wins (longest subClassOf path to a
    root); ties break lexicographically.  Returns None when nothing passes.
    """
    cands = lexicon.candidates.get(t_text)
    if not cands or e not in kg.entities:
        return None
    ets = kg.entity_types(e)
    valid = [t for t in cands if t in ets]
    if not valid:
        return None
    return min(valid, key=lambda t: (-kg.type_depth(t), t))


def _match_words(tokens, start: int, trigger: tuple[str, ...]) -> bool:
    end = start + len(trigger)
    if end > len(tokens):
        return False
    return all(isinstance(tokens[k], str) and tokens[k] == trigger[k - start]
               for k in range(start, end))


def mine_type_salience(sentences, kg: KnowledgeGraph, lexicon: TypeLexicon) -> TypeSalienceTable:
    """Count (type, entity) pairs from the two extraction patterns.

    Pattern A: ``ENTITY (is a|is an|, a|and other|or other) TYPE``.
    Pattern B: ``TYPE (like|such as|including|especially) ENTITY``.
    TYPE must be a single non-mention word; unmatched sentences are skipped.
    Counts are normalized per entity into relative frequencies.
    """
    counts: dict[str, Counter] = defaultdict(Counter)

    def record(type_word: str, entity: str):
        lemma = lemmatize_type_word(type_word, lexicon)
        if lemma is None:
            return
        resolved = disambiguate_type(lemma, entity, lexicon, kg)
        if resolved is not None:
            counts[entity][resolved] += 1

    for tokens in sentences:
        for i, tok in enumerate(tokens):
            if isinstance(tok, Mention):
                for trig in ENTITY_TYPE_TRIGGERS:
                    j = i + 1 + len(trig)
                    if _match_words(tokens, i + 1, trig) and j < len(tokens) \
                            and isinstance(tokens[j], str):
                        record(tokens[j], tok.entity)
                        break
            else:
                for trig in TYPE_ENTITY_TRIGGERS:
                    j = i + 1 + len(trig)
                    if _match_words(tokens, i + 1, trig) and j < len(tokens) \
                            and isinstance(tokens[j], Mention):
                        record(tok, tokens[j].entity)
                        break
    return TypeSalienceTable(counts=dict(counts))


def npmi(joint_count: int, count_x: int, count_y: int, total: int) -> float:
    """Normalized pointwise mutual information over event counts, in [-1, 1].

    When the joint count equals the total, p(x,y) = 1 makes the normalizer
    vanish; by convention that degenerate distribution scores 1.0 (perfect
    association).
    """
    if joint_count < 1 or joint_count > min(count_x, count_y) or max(count_x, count_y) > total:
        raise ValueError(
            f"inconsistent counts: joint={joint_count} x={count_x} y={count_y} total={total}"
        )
    if joint_count == total:
        return 1.0
    p_xy = joint_count / total
    p_x = count_x / total
    p_y = count_y / total
    return math.log(p_xy / (p_x * p_y)) / -math.log(p_xy)


def mine_predicate_phrases(sentences, kg: KnowledgeGraph,
                           max_gap: int = DEFAULT_MAX_GAP) -> PredicateLexicon:
    """Distant-supervision paraphrase mining for KG predicates.

    For each fact (e1, p, e2) and each sentence where both entities are
    mentioned with 1..max_gap plain words between them (no third mention in
    the window), the inter-mention phrase is recorded under (p, SubjectFirst)
    when e1 precedes e2 and (p, ObjectFirst) otherwise.  Phrases longer than
    50 characters are dropped.  Each (predicate, orientation) keeps its five
    best phrases by npmi, positive scores only.
    """
    pair_preds: dict[tuple[str, str], set[str]] = defaultdict(set)
    for s, p, o in kg.instance_facts:
        if o in kg.entities:
            pair_preds[(s, o)].add(p)

    events: list[tuple[tuple[str, str], str]] = []
    for tokens in sentences:
        mentions = [(i, t) for i, t in enumerate(tokens) if isinstance(t, Mention)]
        for a in range(len(mentions)):
            i, m1 = mentions[a]
            for b in range(a + 1, len(mentions)):
                j, m2 = mentions[b]
                if j - i - 1 > max_gap:
                    break
                between = tokens[i + 1:j]
                if any(isinstance(t, Mention) for t in between):
                    break
                if not between:
                    continue
                phrase = " ".join(between)
                if len(phrase) > MAX_PHRASE_CHARS:
                    continue
                for p in sorted(pair_preds.get((m1.entity, m2.entity), ())):
                    events.append(((p, SUBJECT_FIRST), phrase))
                for p in sorted(pair_preds.get((m2.entity, m1.entity), ())):
                    events.append(((p, OBJECT_FIRST), phrase))

    total = len(events)
    key_counts = Counter(key for key, _ in events)
    phrase_counts = Counter(phrase for _, phrase in events)
    joint_counts = Counter(events)

    table: dict[tuple[str, str], list[tuple[str, float]]] = {}
    for key in sorted(key_counts):
        scored = []
        for (k, phrase), joint in joint_counts.items():
            if k != key:
                continue
            score = npmi(joint, key_counts[key], phrase_counts[phrase], total)
            if score > 0:
                scored.append((phrase, score))
        scored.sort(key=lambda item: (-item[1], item[0]))
        if scored:
            table[key] = scored[:MAX_LEXICON_ENTRIES]
    return PredicateLexicon(table)


def mine_surface_forms(sentences) -> EntityLexicon:
    """Count mention surfaces per entity; keep the five most frequent."""
    counts: dict[str, Counter] = defaultdict(Counter)
    for tokens in sentences:
        for tok in tokens:
            if isinstance(tok, Mention):
                counts[tok.entity][tok.surface] += 1
    table = {
        e: sorted(c.items(), key=lambda kv: (-kv[1], kv[0]))[:MAX_LEXICON_ENTRIES]
        for e, c in counts.items()
    }
    return EntityLexicon(table)
